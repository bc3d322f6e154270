#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "mtp/criteria.hpp"
#include "mtp/error.hpp"

using namespace mtp;

namespace {

Rational q(long p, long d = 1) { return make_rational(p, d); }

std::uint64_t brute_phi(std::uint64_t n) {
  std::uint64_t c = 0;
  for (std::uint64_t i = 1; i <= n; ++i) c += std::gcd(i, n) == 1;
  return c;
}

}  // namespace

TEST(Criteria, Conjecture1Examples) {
  EXPECT_EQ(sum_conjecture1(ApproximatingFunction::power(1), 1, 4), q(115, 72));
  EXPECT_EQ(sum_conjecture1(ApproximatingFunction::table({q(0), q(0), q(0)}), 1, 3), 0);
  // k = 2 is the sum of squared k = 1 terms.
  Rational expect(0);
  for (long n = 1; n <= 30; ++n) {
    Rational t = Rational(brute_phi(n)) * q(1, n) / n;
    expect += t * t;
  }
  EXPECT_EQ(sum_conjecture1(ApproximatingFunction::power(1), 2, 30), expect);
}

TEST(Criteria, Conjecture2Examples) {
  auto psi2 = ApproximatingFunction::power(2);
  Enclosure s = sum_conjecture2(psi2, DimensionFunction::power(q(2, 3)), 1, 2);
  EXPECT_TRUE(s.is_exact());
  EXPECT_EQ(s.lo, q(5, 4));
  Enclosure single = sum_conjecture2(ApproximatingFunction::power(3), DimensionFunction::power(q(1, 2)), 1, 1);
  EXPECT_EQ(single.lo, 1);
  for (unsigned k : {1u, 2u}) {
    auto psi = ApproximatingFunction::power(1);
    Enclosure e = sum_conjecture2(psi, DimensionFunction::power(k), k, 200);
    ASSERT_TRUE(e.is_exact());
    EXPECT_EQ(e.lo, sum_conjecture1(psi, k, 200));
  }
}

TEST(Criteria, Conjecture2IrrationalTermsAreEnclosed) {
  auto psi = ApproximatingFunction::power(1);
  auto f = DimensionFunction::power(q(1, 3));
  Enclosure e = sum_conjecture2(psi, f, 1, 50);
  EXPECT_FALSE(e.is_exact());
  EXPECT_LT(e.width(), pow2(-100));
  // Terms phi(n) n^(-2/3).
  double approx = 0;
  for (long n = 1; n <= 50; ++n) approx += static_cast<double>(brute_phi(n)) * std::pow(n, -2.0 / 3);
  EXPECT_NEAR(to_double(e.lo), approx, 1e-9);
}

TEST(Criteria, GallagherExamples) {
  EXPECT_EQ(sum_gallagher(ApproximatingFunction::power(1), 2, 3), q(49, 36));
  EXPECT_EQ(sum_gallagher(ApproximatingFunction::power(2), 2, 3), q(1393, 1296));
  EXPECT_EQ(sum_gallagher(ApproximatingFunction::table({q(0), q(1, 3), q(0)}), 2, 3), q(1, 9));
  for (unsigned k : {1u, 2u, 3u}) {
    auto psi = ApproximatingFunction::power(q(3, 2));
    Enclosure t = sum_theorem3(psi, DimensionFunction::power(k), k, 40);
    Enclosure g = sum_theorem3(ApproximatingFunction::power(q(3, 2)), DimensionFunction::power(k), k, 40);
    EXPECT_EQ(t.lo, g.lo);
    auto psi_int = ApproximatingFunction::power(2);
    Enclosure ti = sum_theorem3(psi_int, DimensionFunction::power(k), k, 40);
    ASSERT_TRUE(ti.is_exact());
    EXPECT_EQ(ti.lo, sum_gallagher(psi_int, k, 40));
  }
}

TEST(Criteria, PartialSumsNonDecreasing) {
  auto psi = ApproximatingFunction::power(1);
  Rational prev(0);
  for (std::uint64_t n = 1; n <= 64; ++n) {
    Rational s = sum_conjecture1(psi, 1, n);
    EXPECT_GE(s, prev);
    prev = s;
  }
}

TEST(Criteria, GrowthReportHarmonic) {
  std::vector<Rational> terms;
  for (long n = 1; n <= (1 << 16); ++n) terms.push_back(q(1, n));
  auto pts = partial_sums_at_powers_of_two(terms);
  ASSERT_EQ(pts.size(), 17u);
  auto rep = growth_report(pts);
  EXPECT_NEAR(rep.slope_vs_loglog, 1.0, 0.2);
}

TEST(Criteria, GrowthReportConvergentAndLinear) {
  std::vector<Rational> sq, constant;
  for (long n = 1; n <= (1 << 16); ++n) {
    sq.push_back(q(1, n * n));
    constant.push_back(q(3, 7));
  }
  EXPECT_NEAR(growth_report(partial_sums_at_powers_of_two(sq)).slope_vs_log, 0.0, 0.05);
  EXPECT_NEAR(growth_report(partial_sums_at_powers_of_two(constant)).slope_vs_log, 1.0, 1e-9);
  std::vector<GrowthPoint> zeros{{4, 0}, {8, 0}, {16, 0}, {32, 0}};
  EXPECT_THROW(growth_report(zeros), InvalidArgument);
}

TEST(Criteria, CsvHasHeaderAndRows) {
  std::vector<std::uint64_t> checkpoints{1, 2, 4};
  auto rows = criteria_table(ApproximatingFunction::power(1), DimensionFunction::power(1), 1, checkpoints);
  std::ostringstream out;
  write_criteria_csv(out, rows, nullptr);
  std::string text = out.str();
  EXPECT_NE(text.find("N,sum_conjecture1"), std::string::npos);
  EXPECT_NE(text.find("4,115/72"), std::string::npos);
}
