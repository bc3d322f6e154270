#pragma once

// The K_{G,B} selection and the finite-depth Cantor construction behind the
// mass transference principle, with exact verification of its properties.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtp/diophantine.hpp"
#include "mtp/dimension_function.hpp"
#include "mtp/exact.hpp"
#include "mtp/geometry.hpp"
#include "mtp/magnitude.hpp"

namespace mtp {

enum class Mode { Faithful, Demo };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

// kappa = 1/2 (c1/c2)^2 10^-k
Rational kappa_formula(unsigned k, const Rational& c1, const Rational& c2);
// c3 = kappa c1^2 / (2 c2^2 10^k)
Rational c3_formula(unsigned k, const Rational& c1, const Rational& c2);
// The non-root epsilon: 1/2 (c1/c2)^2 c3 / (2^k 4^k)
Rational epsilon_constant_formula(unsigned k, const Rational& c1, const Rational& c2, const Rational& c3);

struct ConstructionParams {
  unsigned k = 1;
  Rational eta;  // 0 means "choose so that the root has two sub-levels"
  Rational c1 = Rational(1, 2);
  Rational c2 = Rational(2);
  Mode mode = Mode::Demo;
  // Demo substitutions; ignored in faithful mode.
  Rational demo_kappa;
  Rational demo_c3;
  Rational demo_epsilon;
  unsigned sub_level_cap = 2;
  unsigned depth = 3;
  std::uint64_t index_budget = std::uint64_t{1} << 50;
  // Largest expected number of family centres scanned by one selection round.
  std::uint64_t scan_budget = std::uint64_t{1} << 21;
  // Largest number of packed balls tried for one higher sub-level.
  std::uint64_t packing_budget = 4096;
  std::uint64_t seed = 1;
  std::uint64_t trials = 10000;

  // Defaults for dimension k: c2 = 2^k and the demo constants below.
  static ConstructionParams defaults(unsigned k, Mode mode);

  Rational kappa() const;
  Rational c3() const;
  Rational epsilon_constant() const;
  // Throws InvalidArgument on inconsistent values.
  void validate() const;
};

// B((sqrt 2 - 1, ...), 2^-6), away from the short-denominator rationals.
Ball default_root(unsigned k);

// One member of the family chosen by kgb_select, with its transform.
struct Selected {
  FamilyMember member;
  TransformedBall transform;
};

struct KgbResult {
  std::vector<Selected> chosen;  // K_{G,B}, ordered by index
  std::uint64_t g_index = 0;
  std::uint64_t j0 = 0;
  std::int64_t q_lo = 0;
  std::int64_t q_hi = 0;
  std::size_t candidates = 0;        // |F| in the final round
  std::size_t selected_total = 0;    // |5r selection| before truncation
  Rational selected_measure;         // lower bound of m(union of selection)
  Rational tail_measure;             // upper bound of the truncated tail
  Rational measure;                  // lower bound of m(union of K^f)
  Rational target;                   // kappa m(B)
};

// Gathers F = {B_i^f : i >= G, B_i^f inside B, B_i^f meets B/2}, runs the 5r
// selection, and truncates at the smallest j0 > G whose tail has measure
// below kappa m(B). The q-range is doubled until the selection reaches
// 2 kappa m(B); throws BudgetExhausted past the index budget.
KgbResult kgb_select(const BallFamily& family, std::uint64_t g_index, const Ball& b, const DimensionFunction& f,
                     const DimensionFunction& g, const Rational& kappa, std::uint64_t index_budget,
                     std::uint64_t scan_budget = std::uint64_t{1} << 21);

struct SubLevelCount {
  Integer formula;  // floor(...) + 1
  unsigned used;
  bool capped;
};

enum class Role { Root, Internal };

SubLevelCount compute_lB(const Ball& b, Role role, const DimensionFunction& f, const ConstructionParams& params);

// epsilon(B0) = eps_c V^f(B0) / eta for the root, eps_c otherwise.
Magnitude epsilon_choice(const Ball& b, const Ball& root, const Rational& eta, const DimensionFunction& f,
                         const ConstructionParams& params);

struct GChoice {
  std::uint64_t g_index;
  std::int64_t q;
};

// Smallest q (as a family index) from which the separation, ratio and
// cardinality conditions hold on the radius envelope.
GChoice choose_G(const BallFamily& family, const Ball& b, const Magnitude& epsilon, const DimensionFunction& f,
                 const ConstructionParams& params);

struct SubLevel {
  unsigned index = 0;
  std::uint64_t g_index = 0;
  std::vector<std::size_t> members;  // node ids
  // Only for index >= 2.
  Rational free_measure;     // m(A^(l))
  Rational free_required;    // m(B/2) / 2
  Rational packing_measure;  // m(union of the whole packing)
  Rational packing_required;
  Rational d_min;
  std::size_t packed_available = 0;
  std::size_t packed_used = 0;
  std::size_t packed_skipped = 0;
};

struct LocalLevel {
  bool built = false;
  SubLevelCount l_b{Integer(0), 0, false};
  std::optional<Magnitude> epsilon;
  std::uint64_t g_index = 0;
  std::int64_t g_q = 0;
  std::vector<SubLevel> sub_levels;
};

struct CantorNode {
  std::size_t id = 0;
  unsigned level = 1;
  std::optional<std::size_t> parent{};
  unsigned sub_level = 0;
  Ball ball;
  std::optional<std::uint64_t> family_index{};
  std::optional<RationalPoint> point{};
  Enclosure mu{};
  std::vector<std::size_t> children{};
  LocalLevel local{};
};

struct CantorTree {
  std::string status;  // "constructed" or the reason nothing was built
  Ball root;
  std::vector<CantorNode> nodes{};
  std::vector<std::vector<std::size_t>> levels{};  // levels[n-1] = ids at level n
  Rational eta{};

  bool constructed() const { return status == "constructed"; }
  const CantorNode& node(std::size_t id) const { return nodes.at(id); }
  std::vector<std::size_t> leaves() const;
};

// Builds levels 1..depth. Restricted to ambient g = Power(k). When r^-k f(r)
// does not tend to infinity the tree holds only the root and the status
// records the comparable-measures short-circuit.
CantorTree build_cantor(const BallFamily& family, const Ball& root, const DimensionFunction& f,
                        const DimensionFunction& g, const ConstructionParams& params);

// mu(root) = 1, mu(L) = V^f(L) / sum_{M in K(n,B)} V^f(M) * mu(B).
void assign_measure(CantorTree& tree, const DimensionFunction& f);

struct NodeFlags {
  std::size_t id = 0;
  // Local-level properties, meaningful when the node has children.
  bool p1 = true;
  bool p2 = true;
  bool p3 = true;
  bool p4 = true;
  bool nested = true;
  bool conservation = true;
  bool volume_sum = true;  // sum_{M in K(n,B)} V^f(M) >= V^f(B)
  // Node properties (level >= 2).
  bool p5 = true;
  bool membership = true;
  bool conditions = true;  // separation, ratio and cardinality at selection
  bool node_bound = true;  // mu(L) <= V^f(L) / eta
};

struct Verification {
  bool p0 = false;
  bool p1 = false;
  bool p2 = false;
  bool p3 = false;
  bool p4 = false;
  bool p5 = false;
  bool nested = false;
  bool membership = false;
  bool conditions = false;
  bool conservation = false;  // every local sum and the leaf total equal 1
  bool leaf_total_exact = false;
  Enclosure leaf_total;
  bool node_bound = false;
  bool node_bound_expected = false;  // faithful, or no sub-level count was capped
  bool node_bound_consistent = false;
  std::size_t node_bound_failures = 0;
  bool level2_chain = false;  // sum over K(2) of V^f >= eta via (P3) and (P5)
  std::vector<NodeFlags> nodes;
  std::vector<std::string> failures;

  // Every exactly checked property that the mode promises.
  bool all_exact_pass() const;
};

Verification verify_tree(const CantorTree& tree, const BallFamily& family, const DimensionFunction& f,
                         const DimensionFunction& g, const ConstructionParams& params);

struct BallBoundReport {
  std::string label = "sampled, not exhaustive";
  Rational r_o;
  Rational c_target;  // 2 + 2 5^k c2 / (c1 c3)
  std::uint64_t random_trials = 0;
  std::uint64_t leaf_trials = 0;
  Rational c_emp;  // max observed mu(A) eta / V^f(A), rounded up
  bool within_target = false;
  std::uint64_t seed = 0;
  // Structural replay over the random samples.
  std::uint64_t single_chain = 0;  // A meets at most one ball per level
  std::uint64_t reduced = 0;       // r(A) >= r(B): mu(A) <= mu(B)
  std::uint64_t split = 0;         // the case (i)/(ii) argument applies
  std::uint64_t level_above_two = 0;
  std::uint64_t case_i_sublevels = 0;
  std::uint64_t case_ii_sublevels = 0;
  bool case_i_bound = true;   // sum of case (i) V^f(L) <= 2 V^f(A)
  bool case_ii_bound = true;  // sum of case (ii) V^f(L) <= 2 5^k c2/(c1 c3) V^f(A)
  bool lemma_conclusions = true;
  bool structure_ok() const { return case_i_bound && case_ii_bound && lemma_conclusions; }
};

BallBoundReport verify_ball_bound(const CantorTree& tree, const DimensionFunction& f, const ConstructionParams& params,
                                  std::uint64_t trials, std::uint64_t seed);

// mu(A) from the leaves: lower = leaves inside A, upper = leaves meeting A.
Enclosure leaf_measure(const CantorTree& tree, const Ball& a);

struct Certificate {
  std::string status;
  Mode mode = Mode::Demo;
  ConstructionParams params;
  Verification verification;
  std::optional<BallBoundReport> ball_bound;
  std::size_t node_count = 0;
  std::vector<std::size_t> level_sizes;

  bool exact_checks_pass() const;
};

Certificate certify(const CantorTree& tree, const BallFamily& family, const DimensionFunction& f,
                    const DimensionFunction& g, const ConstructionParams& params);

}  // namespace mtp
