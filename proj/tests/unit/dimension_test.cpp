#include <gtest/gtest.h>

#include <cmath>

#include "mtp/criteria.hpp"
#include "mtp/dimension.hpp"
#include "mtp/error.hpp"

using namespace mtp;

namespace {

Rational q(long p, long d = 1) { return make_rational(p, d); }

std::vector<std::int64_t> scales_to(int top) {
  std::vector<std::int64_t> out;
  for (int e = 4; e <= top; ++e) out.push_back(std::int64_t{1} << e);
  return out;
}

Certificate passing_certificate(const Rational& eta, const Rational& c_emp, Mode mode) {
  Certificate c;
  c.status = "constructed";
  c.mode = mode;
  c.params = ConstructionParams::defaults(1, mode);
  c.params.eta = eta;
  auto& v = c.verification;
  v.p0 = v.p1 = v.p2 = v.p3 = v.p4 = v.p5 = v.nested = v.membership = v.conditions = v.conservation = true;
  v.node_bound_consistent = true;
  BallBoundReport bb;
  bb.c_emp = c_emp;
  c.ball_bound = bb;
  return c;
}

}  // namespace

TEST(Dimension, SingleBallCover) {
  auto f = DimensionFunction::power(q(2, 3));
  std::vector<Ball> cover{Ball::interval(q(1, 2), q(1, 8))};
  EXPECT_EQ(premeasure_upper(cover, f, q(1, 8)), Enclosure::exact(q(1, 4)));
  EXPECT_THROW(premeasure_upper(cover, f, q(1, 16)), InvalidArgument);
}

TEST(Dimension, DyadicSplitNeverLowersTheSum) {
  // Two halves of radius r/2 give 2 (r/2)^s = 2^(1-s) r^s >= r^s when s <= 1.
  for (Rational s : {q(1, 3), q(1, 2), q(2, 3), q(1)}) {
    auto f = DimensionFunction::power(s);
    Ball whole = Ball::interval(q(1, 2), q(1, 8));
    std::vector<Ball> one{whole};
    std::vector<Ball> halves{Ball::interval(q(7, 16), q(1, 16)), Ball::interval(q(9, 16), q(1, 16))};
    EXPECT_TRUE(union_covers(one, halves));
    EXPECT_GE(premeasure_upper(halves, f, 1).lo, premeasure_upper(one, f, 1).hi);
  }
}

TEST(Dimension, TailCoverMatchesCriteriaSum) {
  BallFamily family(ApproximatingFunction::power(2), 1, Coprimality::Pairwise);
  auto psi = ApproximatingFunction::power(2);
  auto f = DimensionFunction::power(q(2, 3));
  const std::int64_t from = 5, to = 300;
  auto tail = premeasure_upper(family, f, q(1, 125), family.first_index(from), to);
  ASSERT_TRUE(tail.is_exact());
  auto all = sum_conjecture2(psi, f, 1, to);
  auto head = sum_conjecture2(psi, f, 1, from - 1);
  ASSERT_TRUE(all.is_exact() && head.is_exact());
  EXPECT_EQ(tail.lo, all.lo - head.lo);
  EXPECT_THROW(premeasure_upper(family, f, q(1, 1000), family.first_index(from), to), InvalidArgument);
}

TEST(Dimension, TailSumShrinksAsTheTailStartsLater) {
  BallFamily family(ApproximatingFunction::power(2), 1, Coprimality::Pairwise);
  auto f = DimensionFunction::power(q(2, 3));
  Rational previous(-1);
  for (std::uint64_t g : {10u, 11u, 40u, 41u, 200u, 1000u}) {
    auto s = premeasure_upper(family, f, q(1, 8), g, 400);
    if (previous >= 0) EXPECT_LE(s.hi, previous);
    previous = s.hi;
  }
}

TEST(Dimension, MassDistributionBound) {
  auto demo = passing_certificate(q(1, 1000), q(40), Mode::Demo);
  auto b = mdp_lower_bound(demo);
  EXPECT_EQ(b.bound, q(1, 40000));
  EXPECT_EQ(b.constants, "demo constants");
  EXPECT_EQ(b.caveat, "sampled, not exhaustive");
  auto doubled = passing_certificate(q(2, 1000), q(40), Mode::Faithful);
  EXPECT_EQ(mdp_lower_bound(doubled).bound, 2 * b.bound);
  EXPECT_EQ(mdp_lower_bound(doubled).constants, "faithful constants");
  // mu of total mass 1 with C_emp = C gives eta / C.
  EXPECT_EQ(mdp_lower_bound(passing_certificate(q(3), q(7), Mode::Faithful)).bound, q(3, 7));
}

TEST(Dimension, MassDistributionNeedsAPassingCertificate) {
  auto failed = passing_certificate(q(1, 1000), q(40), Mode::Demo);
  failed.verification.conservation = false;
  EXPECT_THROW(mdp_lower_bound(failed), PreconditionViolated);
  auto unsampled = passing_certificate(q(1, 1000), q(40), Mode::Demo);
  unsampled.ball_bound.reset();
  EXPECT_THROW(mdp_lower_bound(unsampled), PreconditionViolated);
}

TEST(Dimension, JarnikBesicovitchExponent) {
  EXPECT_EQ(jarnik_besicovitch_dimension(q(2)), q(2, 3));
  EXPECT_EQ(jarnik_besicovitch_dimension(q(3)), q(1, 2));
  EXPECT_EQ(jarnik_besicovitch_dimension(q(1, 2)), 1);
}

TEST(Dimension, BoxSlopeTauTwo) {
  auto est = box_dim_estimate(ApproximatingFunction::power(2), 1, scales_to(11));
  EXPECT_NEAR(est.slope, 2.0 / 3.0, 0.1);
  EXPECT_EQ(est.residuals.size(), est.counts.size());
}

TEST(Dimension, BoxSlopeTauThree) {
  auto est = box_dim_estimate(ApproximatingFunction::power(3), 1, scales_to(11));
  EXPECT_NEAR(est.slope, 0.5, 0.1);
}

TEST(Dimension, BoxSlopeFullSet) {
  auto est = box_dim_estimate(ApproximatingFunction::power(1), 1, scales_to(10));
  EXPECT_NEAR(est.slope, 1.0, 0.1);
}

TEST(Dimension, BoxCountsGrowAsBoxesShrink) {
  auto est = box_dim_estimate(ApproximatingFunction::power(2), 1, scales_to(9));
  for (std::size_t i = 1; i < est.counts.size(); ++i) {
    EXPECT_LT(est.counts[i].delta, est.counts[i - 1].delta);
    EXPECT_GE(est.counts[i].boxes, est.counts[i - 1].boxes);
  }
  auto again = box_dim_estimate(ApproximatingFunction::power(2), 1, scales_to(9));
  EXPECT_EQ(est.slope, again.slope);
}

TEST(Dimension, BoxCountSmallCase) {
  // Q = 2: q = 2 only, the ball [1/2 - 1/8, 1/2 + 1/8] at side 1/8 hits
  // boxes 3, 4 and 5 of [0,1] (it touches box 5 at 5/8).
  auto est = box_dim_estimate(ApproximatingFunction::power(2), 1, std::vector<std::int64_t>{2, 4, 8});
  EXPECT_EQ(est.counts[0].delta, q(1, 8));
  EXPECT_EQ(est.counts[0].boxes, 3u);
}

TEST(Dimension, BoxEstimateRejectsBadInput) {
  auto psi = ApproximatingFunction::power(2);
  EXPECT_THROW(box_dim_estimate(psi, 1, std::vector<std::int64_t>{16, 32}), InvalidArgument);
  EXPECT_THROW(box_dim_estimate(psi, 2, scales_to(8)), InvalidArgument);
  EXPECT_THROW(box_dim_estimate(psi, 1, std::vector<std::int64_t>{16, 8, 32}), InvalidArgument);
}
