#include <gtest/gtest.h>

#include <random>

#include "mtp/error.hpp"
#include "mtp/exact.hpp"

using namespace mtp;

TEST(Exact, CanonicalStrings) {
  EXPECT_EQ(to_string(make_rational(6, 4)), "3/2");
  EXPECT_EQ(to_string(make_rational(3)), "3/1");
  EXPECT_EQ(to_string(make_rational(0, 5)), "0/1");
  EXPECT_EQ(to_string(make_rational(2, -4)), "-1/2");
}

TEST(Exact, ParseRational) {
  EXPECT_EQ(parse_rational("3/6"), make_rational(1, 2));
  EXPECT_EQ(parse_rational("7"), make_rational(7));
  EXPECT_EQ(parse_rational("0.25"), make_rational(1, 4));
  EXPECT_EQ(parse_rational("-1.5e-3"), make_rational(-3, 2000));
  EXPECT_EQ(parse_rational("2/3"), make_rational(2, 3));
  EXPECT_THROW(parse_rational("1/0"), InvalidArgument);
  EXPECT_THROW(parse_rational("abc"), InvalidArgument);
}

TEST(Exact, RootsAndPowers) {
  EXPECT_EQ(*exact_root(make_rational(1, 8), 3), make_rational(1, 2));
  EXPECT_FALSE(exact_root(make_rational(2), 2).has_value());
  EXPECT_EQ(pow(make_rational(2, 3), -2), make_rational(9, 4));
  EXPECT_EQ(pow2(-3), make_rational(1, 8));
  EXPECT_EQ(floor(make_rational(-1, 2)), -1);
  EXPECT_EQ(ceil(make_rational(-1, 2)), 0);
}

TEST(Exact, BalancedSumMatchesRunningSum) {
  std::mt19937_64 rng(7);
  std::vector<Rational> terms;
  Rational running(0);
  for (int i = 0; i < 500; ++i) {
    Rational t = make_rational(static_cast<long>(rng() % 1000) - 300, static_cast<long>(rng() % 997) + 1);
    terms.push_back(t);
    running += t;
  }
  EXPECT_EQ(sum(terms), running);
  EXPECT_EQ(sum(std::span<const Rational>()), 0);
}

TEST(Exact, DyadicRounding) {
  Rational third = make_rational(1, 3);
  Rational lo = round_down_dyadic(third, 20), hi = round_up_dyadic(third, 20);
  EXPECT_LT(lo, third);
  EXPECT_GT(hi, third);
  EXPECT_EQ(hi - lo, pow2(-20));
}
