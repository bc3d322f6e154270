#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "mtp/error.hpp"
#include "mtp/geometry.hpp"

using namespace mtp;

namespace {

Rational q(long p, long d = 1) { return make_rational(p, d); }

Ball random_ball(std::mt19937_64& rng, unsigned k, long grid = 64) {
  std::vector<Rational> c;
  for (unsigned i = 0; i < k; ++i) c.push_back(q(static_cast<long>(rng() % grid), grid));
  return Ball(c, q(static_cast<long>(rng() % (grid / 4)) + 1, grid));
}

}  // namespace

TEST(Geometry, ScaleBall) {
  EXPECT_EQ(scale_ball(Ball::interval(q(1, 2), q(1, 4)), 1), Ball::interval(q(1, 2), q(1, 4)));
  EXPECT_EQ(scale_ball(Ball::interval(0, q(1, 3)), 3), Ball::interval(0, 1));
  EXPECT_EQ(scale_ball(Ball({q(1, 2), q(1, 2)}, q(1, 10)), 5), Ball({q(1, 2), q(1, 2)}, q(1, 2)));
  EXPECT_THROW(scale_ball(Ball::interval(0, 1), 0), InvalidArgument);
  EXPECT_THROW(Ball::interval(0, 0), InvalidArgument);
}

TEST(Geometry, Volumes) {
  EXPECT_EQ(*f_volume(Ball::interval(0, q(1, 2)), DimensionFunction::power(1)).rational(), q(1, 2));
  EXPECT_EQ(*f_volume(Ball::interval(0, q(1, 8)), DimensionFunction::power(q(2, 3))).rational(), q(1, 4));
  EXPECT_EQ(lebesgue_measure(Ball({0, 0}, q(1, 2))), 1);
  EXPECT_EQ(k_volume(Ball({0, 0}, q(1, 2))), q(1, 4));
}

TEST(Geometry, TransformExamples) {
  auto b = transform_ball(Ball::interval(0, q(1, 4)), DimensionFunction::power(q(1, 2)), DimensionFunction::power(1));
  EXPECT_TRUE(b == Ball::interval(0, q(1, 2)));
  auto c = transform_ball(Ball({q(1, 3), q(2, 3)}, 3), DimensionFunction::power(4), DimensionFunction::power(2));
  EXPECT_TRUE(c == Ball({q(1, 3), q(2, 3)}, 9));
  EXPECT_THROW(transform_ball(Ball::interval(0, q(1, 4)), DimensionFunction::power(1),
                              DimensionFunction::power_log(1, 1)),
               ConfigurationError);
}

TEST(Geometry, TransformIdentityAndVolumeIdentity) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    unsigned k = 1 + rng() % 3;
    Ball b = random_ball(rng, k, 1 << 12);
    auto g = DimensionFunction::power(k);
    EXPECT_TRUE(transform_ball(b, g, g) == b);
    auto f = DimensionFunction::power(q(static_cast<long>(rng() % 9) + 1, static_cast<long>(rng() % 5) + 1));
    auto t = transform_ball(b, f, g);
    EXPECT_EQ(compare(g(t.radius()), f(b.radius())), 0);
  }
}

TEST(Geometry, TransformedBallSandwich) {
  auto t = transform_ball(Ball::interval(q(1, 3), q(1, 7)), DimensionFunction::power(q(1, 2)),
                          DimensionFunction::power(1));
  EXPECT_FALSE(t.exact().has_value());
  Ball in = t.inner(), out = t.outer();
  EXPECT_TRUE(contains(out, in));
  EXPECT_LT(Magnitude(in.radius()), t.radius());
  EXPECT_GT(Magnitude(out.radius()), t.radius());
}

TEST(Geometry, UnionMeasureExamples) {
  std::vector<Ball> one{Ball::interval(q(1, 2), q(1, 2))};
  EXPECT_EQ(union_measure(one), 1);
  std::vector<Ball> two{Ball::interval(q(1, 4), q(1, 4)), Ball::interval(q(1, 2), q(1, 4))};
  EXPECT_EQ(union_measure(two), q(3, 4));
  std::vector<Ball> nested{Ball({0, 0}, 1), Ball({0, 0}, q(1, 2))};
  EXPECT_EQ(union_measure(nested), 4);
  std::vector<Ball> cube3{Ball({0, 0, 0}, 1)};
  EXPECT_THROW(union_measure(cube3), ConfigurationError);
  EXPECT_EQ(diff_measure(Ball::interval(0, 1), two), q(5, 4));
}

TEST(Geometry, UnionMeasurePermutationAndSplitInvariance) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    unsigned k = 1 + trial % 2;
    std::vector<Ball> balls;
    for (int i = 0; i < 30; ++i) balls.push_back(random_ball(rng, k));
    Rational m = union_measure(balls);
    std::shuffle(balls.begin(), balls.end(), rng);
    EXPECT_EQ(union_measure(balls), m);
    // Split the first cube into 2^k half-size sub-cubes.
    Ball first = balls.front();
    std::vector<Ball> split(balls.begin() + 1, balls.end());
    Rational h = first.radius() / 2;
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
      std::vector<Rational> c = first.center();
      for (unsigned i = 0; i < k; ++i) c[i] += (mask >> i & 1) ? h : -h;
      split.emplace_back(c, h);
    }
    EXPECT_EQ(union_measure(split), m);
  }
}

TEST(Geometry, UnionMeasureMatchesGridOracle) {
  // Balls on a 1/64 grid: count covered grid cells of side 1/128.
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Ball> balls;
    for (int i = 0; i < 12; ++i) balls.push_back(random_ball(rng, 2));
    long cells = 0;
    for (long x = -40; x < 200; ++x) {
      for (long y = -40; y < 200; ++y) {
        Rational cx = q(2 * x + 1, 256), cy = q(2 * y + 1, 256);
        std::vector<Rational> pt{cx, cy};
        bool hit = std::any_of(balls.begin(), balls.end(), [&](const Ball& b) { return contains_point(b, pt); });
        cells += hit;
      }
    }
    EXPECT_EQ(union_measure(balls), q(cells, 128 * 128));
  }
}

TEST(Geometry, FiveRExamples) {
  std::vector<Ball> single{Ball::interval(q(1, 2), q(1, 2))};
  EXPECT_EQ(five_r_cover(single), single);
  std::vector<Ball> pair{Ball::interval(q(1, 2), q(1, 2)), Ball::interval(q(3, 5), q(2, 5))};
  auto chosen = five_r_cover(pair);
  ASSERT_EQ(chosen.size(), 1u);
  EXPECT_EQ(chosen[0], pair[0]);
  EXPECT_TRUE(contains(scale_ball(pair[0], 5), pair[1]));
  std::vector<Ball> disjoint{Ball::interval(0, q(1, 10)), Ball::interval(q(1, 2), q(1, 10)),
                             Ball::interval(1, q(1, 5))};
  EXPECT_EQ(five_r_cover(disjoint).size(), 3u);
  EXPECT_TRUE(five_r_cover(std::vector<Ball>{}).empty());
}

TEST(Geometry, FiveRProperties) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    unsigned k = 1 + trial % 2;
    std::vector<Ball> family;
    for (int i = 0; i < 120; ++i) family.push_back(random_ball(rng, k));
    auto chosen = five_r_cover(family);
    EXPECT_TRUE(pairwise_disjoint(chosen));
    std::vector<Ball> scaled;
    for (const auto& b : chosen) scaled.push_back(scale_ball(b, 5));
    EXPECT_TRUE(union_covers(family, scaled));
    for (const auto& b : family) {
      bool met = std::any_of(chosen.begin(), chosen.end(),
                             [&](const Ball& c) { return intersects(b, c) && c.radius() >= b.radius(); });
      EXPECT_TRUE(met);
    }
  }
}

TEST(Geometry, PairwiseDisjointMatchesBruteForce) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Ball> balls;
    for (int i = 0; i < 6; ++i) balls.push_back(random_ball(rng, 1 + trial % 2, 256));
    bool brute = true;
    for (std::size_t i = 0; i < balls.size(); ++i)
      for (std::size_t j = i + 1; j < balls.size(); ++j) brute = brute && !intersects(balls[i], balls[j]);
    EXPECT_EQ(pairwise_disjoint(balls), brute);
  }
}

TEST(Geometry, ContainmentCheck) {
  auto r = geometric_containment_check(Ball::interval(0, 1), Ball::interval(q(1, 2), q(1, 10)), 3);
  EXPECT_TRUE(r.radius_bound);
  EXPECT_TRUE(r.scaled_inside);
  EXPECT_THROW(geometric_containment_check(Ball::interval(0, 1), Ball::interval(0, 1), 3), PreconditionViolated);
  EXPECT_THROW(geometric_containment_check(Ball::interval(0, 1), Ball::interval(5, 1), 3), PreconditionViolated);
}

TEST(Geometry, ContainmentProperty) {
  std::mt19937_64 rng(31);
  int checked = 0;
  while (checked < 2000) {
    unsigned k = 1 + rng() % 2;
    Ball a = random_ball(rng, k), m = random_ball(rng, k);
    Rational c = 3 + q(static_cast<long>(rng() % 8), 4);
    if (!intersects(a, m) || contains(scale_ball(m, c), a)) continue;
    auto r = geometric_containment_check(a, m, c);
    EXPECT_TRUE(r.radius_bound);
    EXPECT_TRUE(r.scaled_inside);
    ++checked;
  }
}
