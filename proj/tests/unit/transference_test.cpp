#include <gtest/gtest.h>

#include "mtp/error.hpp"
#include "mtp/serialize.hpp"
#include "mtp/transference.hpp"

using namespace mtp;

namespace {

Rational q(long p, long d = 1) { return make_rational(p, d); }

// psi(q)/q = 8^-(ceil(log2 q) + 1), so r^(2/3) transforms stay rational.
BallFamily dyadic_family(long n) {
  std::vector<Rational> table;
  for (long i = 1; i <= n; ++i) {
    long e = 0;
    while ((1L << e) < i) ++e;
    table.push_back(Rational(i) * pow2(-3 * (e + 1)));
  }
  return BallFamily(ApproximatingFunction::table(table), 1, Coprimality::Pairwise);
}

struct Demo {
  BallFamily family{ApproximatingFunction::power(2), 1, Coprimality::Pairwise};
  DimensionFunction f = DimensionFunction::power(q(2, 3));
  DimensionFunction g = DimensionFunction::power(1);
  ConstructionParams params = ConstructionParams::defaults(1, Mode::Demo);
};

}  // namespace

TEST(Transference, ConstantFormulas) {
  EXPECT_EQ(kappa_formula(1, q(1, 2), q(2)), q(1, 320));
  EXPECT_EQ(c3_formula(1, q(1, 2), q(2)), q(1, 102400));
  Rational c3 = q(1, 1000);
  EXPECT_EQ(epsilon_constant_formula(1, q(1, 2), q(2), c3), c3 / 256);
  EXPECT_EQ(kappa_formula(2, q(1, 2), q(4)), q(1, 12800));

  auto faithful = ConstructionParams::defaults(1, Mode::Faithful);
  EXPECT_EQ(faithful.kappa(), q(1, 320));
  EXPECT_EQ(faithful.c3(), q(1, 102400));
  auto demo = ConstructionParams::defaults(1, Mode::Demo);
  EXPECT_EQ(demo.c3(), demo.demo_c3);
  EXPECT_EQ(demo.epsilon_constant(), demo.demo_epsilon);
}

TEST(Transference, ParamsValidate) {
  auto p = ConstructionParams::defaults(1, Mode::Demo);
  EXPECT_NO_THROW(p.validate());
  p.c1 = q(3);
  EXPECT_THROW(p.validate(), InvalidArgument);
  EXPECT_EQ(parse_mode("faithful"), Mode::Faithful);
  EXPECT_THROW(parse_mode("loose"), InvalidArgument);
}

TEST(Transference, SubLevelCounts) {
  auto faithful = ConstructionParams::defaults(1, Mode::Faithful);
  auto same = DimensionFunction::power(1);
  auto internal = compute_lB(Ball::interval(q(1, 2), q(1, 100)), Role::Internal, same, faithful);
  EXPECT_EQ(internal.formula, floor(1 / faithful.c3()) + 1);
  EXPECT_FALSE(internal.capped);

  // m(B0) = 1 and eta = c3/c2 give floor(1) + 1.
  faithful.eta = faithful.c3() / faithful.c2;
  auto root = compute_lB(Ball::interval(q(1, 2), q(1, 2)), Role::Root, same, faithful);
  EXPECT_EQ(root.formula, 2);
  EXPECT_EQ(root.used, 2u);

  // (card) holds for a small ball under r^(2/3), so l_B >= 2; demo caps it.
  auto demo = ConstructionParams::defaults(1, Mode::Demo);
  auto f = DimensionFunction::power(q(2, 3));
  auto lb = compute_lB(Ball::interval(q(1, 2), q(1, 1000)), Role::Internal, f, demo);
  EXPECT_GE(lb.formula, 2);
  EXPECT_EQ(lb.used, demo.sub_level_cap);
  EXPECT_TRUE(lb.capped);
}

TEST(Transference, EpsilonChoice) {
  auto p = ConstructionParams::defaults(1, Mode::Faithful);
  auto f = DimensionFunction::power(q(2, 3));
  Ball root = Ball::interval(q(1, 2), q(1, 8));
  Ball other = Ball::interval(q(1, 2), q(1, 64));
  Rational eta = *f_volume(root, f).rational();
  EXPECT_EQ(epsilon_choice(root, root, eta, f, p), Magnitude(p.epsilon_constant()));
  EXPECT_EQ(epsilon_choice(other, root, eta, f, p), Magnitude(p.epsilon_constant()));
  EXPECT_EQ(epsilon_choice(root, root, eta / 2, f, p), Magnitude(2 * p.epsilon_constant()));
}

TEST(Transference, KgbSelectDyadic) {
  auto family = dyadic_family(4096);
  auto f = DimensionFunction::power(q(2, 3));
  auto g = DimensionFunction::power(1);
  Ball b = Ball::interval(q(1, 2), q(1, 8));
  Rational kappa = q(1, 320);
  auto r = kgb_select(family, family.first_index(8), b, f, g, kappa, std::uint64_t{1} << 40);
  ASSERT_FALSE(r.chosen.empty());
  EXPECT_GE(r.measure, kappa * lebesgue_measure(b));
  EXPECT_LT(r.tail_measure, kappa * lebesgue_measure(b));
  std::vector<Ball> transforms;
  for (std::size_t i = 0; i < r.chosen.size(); ++i) {
    const auto& s = r.chosen[i];
    EXPECT_GE(s.member.index, r.g_index);
    if (i > 0) EXPECT_LT(r.chosen[i - 1].member.index, s.member.index);
    auto t = s.transform.exact();
    ASSERT_TRUE(t.has_value());
    EXPECT_TRUE(contains(b, *t));
    EXPECT_TRUE(intersects(*t, scale_ball(b, q(1, 2))));
    transforms.push_back(*t);
  }
  EXPECT_TRUE(pairwise_disjoint(transforms));
  EXPECT_GE(union_measure(transforms), r.measure);
}

TEST(Transference, KgbSelectPowerKIsIdentityTransform) {
  // psi(q)/q = 2^-ceil(log2 q): each generation of balls covers [0,1].
  std::vector<Rational> table;
  for (long i = 1; i <= 512; ++i) {
    long e = 0;
    while ((1L << e) < i) ++e;
    table.push_back(Rational(i) * pow2(-e));
  }
  BallFamily family(ApproximatingFunction::table(table), 1, Coprimality::Pairwise);
  auto g = DimensionFunction::power(1);
  Ball b = Ball::interval(q(1, 3), q(1, 16));
  auto r = kgb_select(family, family.first_index(16), b, g, g, q(1, 320), std::uint64_t{1} << 40);
  for (const auto& s : r.chosen) EXPECT_TRUE(s.transform == s.member.ball);
  EXPECT_GE(r.measure, q(1, 320) * lebesgue_measure(b));
}

TEST(Transference, KgbSelectEmptyFamilyExhausts) {
  // Only q = 1 carries balls, both far from B.
  BallFamily family(ApproximatingFunction::table({q(1, 100), q(0), q(0), q(0)}), 1, Coprimality::Pairwise);
  auto g = DimensionFunction::power(1);
  EXPECT_THROW(kgb_select(family, 0, Ball::interval(q(1, 2), q(1, 8)), g, g, q(1, 320), 1000), BudgetExhausted);
}

TEST(Transference, ChooseGFailsForPowerK) {
  Demo d;
  auto f = DimensionFunction::power(1);
  Ball b = Ball::interval(q(1, 2), q(1, 64));
  EXPECT_THROW(choose_G(d.family, b, Magnitude(Rational(1)), f, d.params), BudgetExhausted);
}

TEST(Transference, ChooseGSatisfiesConditions) {
  Demo d;
  Ball b = Ball::interval(q(1, 2), q(1, 64));
  auto choice = choose_G(d.family, b, Magnitude(Rational(1)), d.f, d.params);
  EXPECT_EQ(choice.g_index, d.family.first_index(choice.q));
  // separation at the envelope: 3 r < r^(2/3)
  Rational r = d.family.envelope(choice.q);
  EXPECT_LT(Magnitude(3 * r), d.f(r));
}

TEST(Transference, ComparableMeasuresShortCircuit) {
  Demo d;
  auto same = DimensionFunction::power(1);
  auto tree = build_cantor(d.family, default_root(1), same, d.g, d.params);
  EXPECT_FALSE(tree.constructed());
  EXPECT_EQ(tree.status, "comparable-measures case, construction skipped");
  EXPECT_EQ(tree.nodes.size(), 1u);
}

TEST(Transference, DemoTreeDepthTwo) {
  Demo d;
  d.params.depth = 2;
  auto tree = build_cantor(d.family, default_root(1), d.f, d.g, d.params);
  ASSERT_TRUE(tree.constructed());
  ASSERT_EQ(tree.levels.size(), 2u);
  EXPECT_EQ(tree.node(0).mu, Enclosure::exact(1));
  Rational total(0);
  for (auto id : tree.levels[1]) {
    const auto& n = tree.node(id);
    EXPECT_TRUE(contains(tree.root, n.ball));
    ASSERT_TRUE(n.family_index.has_value());
    EXPECT_EQ(d.family.index_of(*n.point), *n.family_index);
    ASSERT_TRUE(n.mu.is_exact());
    total += n.mu.lo;
  }
  EXPECT_EQ(total, 1);
  auto v = verify_tree(tree, d.family, d.f, d.g, d.params);
  EXPECT_TRUE(v.all_exact_pass()) << (v.failures.empty() ? "" : v.failures.front());
}

TEST(Transference, DemoTreeDepthThreeCertificate) {
  Demo d;
  d.params.trials = 500;
  auto tree = build_cantor(d.family, default_root(1), d.f, d.g, d.params);
  ASSERT_TRUE(tree.constructed());
  ASSERT_EQ(tree.levels.size(), 3u);
  for (auto id : tree.levels[2]) {
    const auto& n = tree.node(id);
    EXPECT_TRUE(contains(tree.node(*n.parent).ball, n.ball));
  }
  auto cert = certify(tree, d.family, d.f, d.g, d.params);
  EXPECT_TRUE(cert.exact_checks_pass());
  EXPECT_EQ(cert.verification.leaf_total, Enclosure::exact(1));
  ASSERT_TRUE(cert.ball_bound.has_value());
  const auto& bb = *cert.ball_bound;
  EXPECT_EQ(bb.label, "sampled, not exhaustive");
  EXPECT_GT(bb.c_emp, 0);
  EXPECT_EQ(bb.c_target, 2 + 2 * 5 * d.params.c2 / (d.params.c1 * d.params.c3()));
  EXPECT_TRUE(bb.structure_ok());
  EXPECT_EQ(leaf_measure(tree, tree.root), Enclosure::exact(1));
}

TEST(Transference, FaithfulDepthTwoKeepsNodeBound) {
  Demo d;
  auto p = ConstructionParams::defaults(1, Mode::Faithful);
  p.depth = 2;
  auto tree = build_cantor(d.family, default_root(1), d.f, d.g, p);
  ASSERT_TRUE(tree.constructed());
  auto v = verify_tree(tree, d.family, d.f, d.g, p);
  EXPECT_TRUE(v.all_exact_pass());
  EXPECT_TRUE(v.node_bound_expected);
  EXPECT_TRUE(v.node_bound);
  EXPECT_TRUE(v.level2_chain);
}

TEST(Transference, MeasureSplitsByFVolume) {
  auto f = DimensionFunction::power(1);
  CantorTree tree{.status = "constructed", .root = Ball::interval(q(1, 2), q(1, 2))};
  tree.eta = q(1, 100);
  tree.nodes.push_back(CantorNode{.id = 0, .ball = tree.root});
  tree.nodes[0].mu = Enclosure::exact(1);
  tree.nodes.push_back(CantorNode{.id = 1, .level = 2, .parent = 0, .sub_level = 1, .ball = Ball::interval(q(1, 4), q(1, 16))});
  tree.nodes.push_back(CantorNode{.id = 2, .level = 2, .parent = 0, .sub_level = 1, .ball = Ball::interval(q(3, 4), q(3, 16))});
  tree.nodes[0].children = {1, 2};
  tree.levels = {{0}, {1, 2}};
  assign_measure(tree, f);
  EXPECT_EQ(tree.node(1).mu, Enclosure::exact(q(1, 4)));
  EXPECT_EQ(tree.node(2).mu, Enclosure::exact(q(3, 4)));

  tree.nodes[2].ball = Ball::interval(q(3, 4), q(1, 16));
  assign_measure(tree, f);
  EXPECT_EQ(tree.node(1).mu, Enclosure::exact(q(1, 2)));
  EXPECT_EQ(tree.node(2).mu, Enclosure::exact(q(1, 2)));
}

TEST(Transference, TamperedMeasureFailsConservation) {
  Demo d;
  d.params.depth = 2;
  auto tree = build_cantor(d.family, default_root(1), d.f, d.g, d.params);
  tree.nodes[tree.levels[1].front()].mu = Enclosure::exact(q(1, 3));
  auto v = verify_tree(tree, d.family, d.f, d.g, d.params);
  EXPECT_FALSE(v.conservation);
  EXPECT_FALSE(v.all_exact_pass());
}

TEST(Transference, BuildIsDeterministic) {
  Demo d;
  auto a = build_cantor(d.family, default_root(1), d.f, d.g, d.params);
  auto b = build_cantor(d.family, default_root(1), d.f, d.g, d.params);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  auto ca = certify(a, d.family, d.f, d.g, d.params);
  auto cb = certify(b, d.family, d.f, d.g, d.params);
  EXPECT_EQ(to_json(ca).dump(), to_json(cb).dump());
}
