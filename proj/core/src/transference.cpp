#include "mtp/transference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "mtp/error.hpp"

namespace mtp {

std::string to_string(Mode mode) { return mode == Mode::Faithful ? "faithful" : "demo"; }

Mode parse_mode(const std::string& text) {
  if (text == "faithful") return Mode::Faithful;
  if (text == "demo") return Mode::Demo;
  throw InvalidArgument("mode must be 'faithful' or 'demo', got '" + text + "'");
}

Rational kappa_formula(unsigned k, const Rational& c1, const Rational& c2) {
  Rational ratio = c1 / c2;
  return ratio * ratio / (2 * pow(Rational(10), static_cast<long>(k)));
}

Rational c3_formula(unsigned k, const Rational& c1, const Rational& c2) {
  return kappa_formula(k, c1, c2) * c1 * c1 / (2 * c2 * c2 * pow(Rational(10), static_cast<long>(k)));
}

Rational epsilon_constant_formula(unsigned k, const Rational& c1, const Rational& c2, const Rational& c3) {
  Rational ratio = c1 / c2;
  return ratio * ratio * c3 / (2 * pow(Rational(8), static_cast<long>(k)));
}

ConstructionParams ConstructionParams::defaults(unsigned k, Mode mode) {
  ConstructionParams p;
  p.k = k;
  p.mode = mode;
  p.c1 = make_rational(1, 2);
  p.c2 = pow(Rational(2), static_cast<long>(k));
  // The formula kappa is already cheap; c3 is what makes l_B and the
  // sub-level mass targets unreachable, so the demo shrinks it.
  p.demo_kappa = kappa_formula(k, p.c1, p.c2);
  p.demo_c3 = make_rational(1, 1000000000);
  p.demo_epsilon = Rational(1);
  return p;
}

Ball default_root(unsigned k) {
  if (k == 0) throw InvalidArgument("dimension k must be >= 1");
  return Ball(std::vector<Rational>(k, make_rational(41421356, 100000000)), pow2(-6));
}

Rational ConstructionParams::kappa() const {
  return mode == Mode::Demo ? demo_kappa : kappa_formula(k, c1, c2);
}

Rational ConstructionParams::c3() const { return mode == Mode::Demo ? demo_c3 : c3_formula(k, c1, c2); }

Rational ConstructionParams::epsilon_constant() const {
  return mode == Mode::Demo ? demo_epsilon : epsilon_constant_formula(k, c1, c2, c3());
}

void ConstructionParams::validate() const {
  if (k == 0) throw InvalidArgument("dimension k must be >= 1");
  if (c1 <= 0 || c2 < c1) throw InvalidArgument("need 0 < c1 <= c2");
  if (eta < 0) throw InvalidArgument("eta must be positive (or 0 for the automatic choice)");
  if (depth < 1) throw InvalidArgument("depth must be >= 1");
  if (mode == Mode::Demo) {
    if (demo_kappa <= 0 || demo_kappa >= 1) throw InvalidArgument("demo kappa must lie in (0, 1)");
    if (demo_c3 <= 0 || demo_c3 > demo_kappa) throw InvalidArgument("demo c3 must lie in (0, kappa]");
    if (demo_epsilon <= 0) throw InvalidArgument("demo epsilon must be positive");
    if (sub_level_cap < 1) throw InvalidArgument("sub-level cap must be >= 1");
  }
}

namespace {

constexpr unsigned kBits = 128;

Magnitude k_power(const Rational& r, unsigned k) { return Magnitude(pow(r, static_cast<long>(k))); }

// r^k / f(r) as a single-base magnitude.
Magnitude k_over_f(const Rational& r, const DimensionFunction& f, unsigned k) {
  return Magnitude(Rational(1), r, Rational(k) - f.exponent(), -f.log_exponent());
}

Integer floor_magnitude(const Magnitude& m) {
  if (auto r = m.rational()) return floor(*r);
  for (unsigned bits = 64; bits <= 16384; bits *= 2) {
    Enclosure e = m.enclose(bits);
    Integer a = floor(e.lo), b = floor(e.hi);
    if (a == b) return a;
  }
  throw UndecidedComparison("floor of " + m.to_string() + " not decided at the precision cap");
}

Rational dist_inf(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  Rational d(0);
  for (std::size_t i = 0; i < a.size(); ++i) d = max(d, abs(a[i] - b[i]));
  return d;
}

// T ⊆ B, exactly.
bool transform_inside(const TransformedBall& t, const Ball& b) {
  Rational room = b.radius() - dist_inf(t.center(), b.center());
  if (room < 0) return false;
  return compare(t.radius(), Magnitude(room)) <= 0;
}

// T ∩ B ≠ ∅, exactly.
bool transform_meets(const TransformedBall& t, const Ball& b) {
  Rational gap = dist_inf(t.center(), b.center()) - b.radius();
  if (gap <= 0) return true;
  return compare(t.radius(), Magnitude(gap)) >= 0;
}

bool transforms_disjoint(const TransformedBall& a, const TransformedBall& b) {
  Rational d = dist_inf(a.center(), b.center());
  std::vector<Magnitude> radii{a.radius(), b.radius()};
  return !sum_at_least(radii, Magnitude(d));
}

// Pairwise disjointness of transformed balls: outer balls prune, exact
// comparisons decide the remaining pairs.
bool transforms_pairwise_disjoint(const std::vector<TransformedBall>& ts) {
  std::vector<Ball> outer;
  outer.reserve(ts.size());
  for (const auto& t : ts) outer.push_back(t.outer(kBits));
  std::vector<std::size_t> order(ts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return outer[a].lo(0) < outer[b].lo(0); });
  for (std::size_t x = 0; x < order.size(); ++x) {
    const Ball& a = outer[order[x]];
    for (std::size_t y = x + 1; y < order.size(); ++y) {
      const Ball& b = outer[order[y]];
      if (b.lo(0) > a.hi(0)) break;
      if (intersects(a, b) && !transforms_disjoint(ts[order[x]], ts[order[y]])) return false;
    }
  }
  return true;
}

std::int64_t budget_q(const BallFamily& family, std::uint64_t index_budget) {
  return family.max_q_within(index_budget);
}

Magnitude transform_radius(const Rational& r, const DimensionFunction& f, const DimensionFunction& g) {
  return f(r).pow(1 / g.exponent());
}

// Smallest q in [from, limit] satisfying a predicate monotone in q, or
// nullopt when even `limit` fails.
template <typename Pred>
std::optional<std::int64_t> first_q_where(std::int64_t from, std::int64_t limit, Pred&& pred) {
  if (from > limit) return std::nullopt;
  if (pred(from)) return from;
  std::int64_t lo = from, hi = from;
  while (true) {
    if (hi == limit) return std::nullopt;
    hi = (hi > limit / 2) ? limit : std::max<std::int64_t>(hi * 2, hi + 1);
    if (pred(hi)) break;
    lo = hi;
  }
  while (lo + 1 < hi) {
    std::int64_t mid = lo + (hi - lo) / 2;
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// epsilon * V^k(B) / V^f(B) as a magnitude. epsilon is either rational or
// the root choice eps_c V^f(B) / eta, for which the f-volumes cancel.
Magnitude ratio_threshold(const Magnitude& epsilon, const Ball& b, const DimensionFunction& f,
                          const ConstructionParams& params) {
  if (auto e = epsilon.rational()) return k_over_f(b.radius(), f, params.k).times(*e);
  Rational c = params.epsilon_constant() / params.eta;
  if (params.eta > 0 && compare(epsilon, f_volume(b, f).times(c)) == 0) return Magnitude(c * k_volume(b));
  throw ConfigurationError("epsilon " + epsilon.to_string() + " is not comparable with V^f(B)");
}

struct ConditionCheck {
  bool separation;
  bool ratio;
  bool cardinality;
  bool monotone;
  bool all() const { return separation && ratio && cardinality && monotone; }
};

ConditionCheck check_conditions(const Rational& r, const Magnitude& threshold, const DimensionFunction& f,
                                const ConstructionParams& params) {
  ConditionCheck c{};
  auto mb = f.monotone_below();
  c.monotone = !mb || r < *mb;
  if (!c.monotone) return c;
  Magnitude fr = f(r);
  c.separation = compare(k_power(3 * r, params.k), fr) < 0;
  c.ratio = compare(k_over_f(r, f, params.k), threshold) < 0;
  c.cardinality = compare(fr, k_power(r, params.k).times(params.c3())) >= 0;
  return c;
}

}  // namespace

KgbResult kgb_select(const BallFamily& family, std::uint64_t g_index, const Ball& b, const DimensionFunction& f,
                     const DimensionFunction& g, const Rational& kappa, std::uint64_t index_budget,
                     std::uint64_t scan_budget) {
  if (b.dim() != family.dim()) throw InvalidArgument("ball and family differ in dimension");
  KgbResult res;
  res.g_index = g_index;
  res.target = kappa * lebesgue_measure(b);
  Rational need = 2 * res.target;
  Ball half = scale_ball(b, make_rational(1, 2));
  std::int64_t q_lo = family.first_q_at_or_after(g_index);
  std::int64_t q_max = budget_q(family, index_budget);
  res.q_lo = q_lo;
  if (q_lo > q_max) throw BudgetExhausted("kgb-measure", "G lies beyond the index budget");

  // Start where the transformed balls can fit inside B at all.
  auto fits = [&](std::int64_t q) {
    Rational r = family.envelope(q);
    return r == 0 || compare(transform_radius(r, f, g), Magnitude(b.radius())) <= 0;
  };
  std::int64_t q_start = first_q_where(q_lo, q_max, fits).value_or(q_max);
  std::int64_t q_hi = std::min(q_max, std::max<std::int64_t>(q_start * 2, q_start + 1));

  std::vector<Rational> lo(b.dim()), hi(b.dim());
  for (std::size_t i = 0; i < b.dim(); ++i) {
    lo[i] = b.lo(i);
    hi[i] = b.hi(i);
  }

  // Centres are spread roughly uniformly over [0,1]^k.
  Rational share = pow(2 * b.radius(), static_cast<long>(b.dim()));
  auto expected_scan = [&](std::int64_t hi) -> Rational {
    return Rational(family.count_up_to(hi) - family.first_index(q_lo)) * share;
  };

  while (true) {
    if (expected_scan(q_hi) > Rational(static_cast<unsigned long>(scan_budget))) {
      throw BudgetExhausted("kgb-scan", "about " + std::to_string(to_double(expected_scan(q_hi))) +
                                            " centres to scan at q = " + std::to_string(q_hi));
    }
    // Candidates in index order; indices are computed only for kept balls.
    struct Candidate {
      RationalPoint point;
      Ball ball;
      TransformedBall transform;
    };
    std::vector<Candidate> cand;
    std::int64_t g_q = family.first_q_at_or_after(g_index + 1) - 1;  // q holding index G
    for (auto& pt : family.points_with_centers_in(lo, hi, q_lo, q_hi)) {
      if (pt.q <= g_q && family.index_of(pt) < g_index) continue;
      Ball ball = *family.ball(pt);
      TransformedBall t = transform_ball(ball, f, g);
      if (!transform_inside(t, b) || !transform_meets(t, half)) continue;
      cand.push_back({std::move(pt), std::move(ball), std::move(t)});
    }
    std::vector<Ball> outer;
    outer.reserve(cand.size());
    for (const auto& c : cand) outer.push_back(c.transform.outer(kBits));
    std::vector<std::size_t> picked = five_r_select(outer);
    std::sort(picked.begin(), picked.end());

    std::vector<Rational> inner_m, outer_m;
    for (std::size_t idx : picked) {
      inner_m.push_back(lebesgue_measure(cand[idx].transform.inner(kBits)));
      outer_m.push_back(lebesgue_measure(outer[idx]));
    }
    Rational total = sum(inner_m);

    if (total >= need) {
      // tail(j0) = outer measure of the picked balls with index >= j0.
      std::vector<Rational> suffix(picked.size() + 1, Rational(0));
      for (std::size_t s = picked.size(); s-- > 0;) suffix[s] = suffix[s + 1] + outer_m[s];
      std::vector<std::uint64_t> index;
      auto index_at = [&](std::size_t s) {
        while (index.size() <= s) index.push_back(family.index_of(cand[picked[index.size()]].point));
        return index[s];
      };
      std::size_t first_tail = 0;  // picked[first_tail..] is the tail for the current j0
      std::uint64_t j0 = g_index + 1;
      if (!picked.empty() && index_at(0) < j0) first_tail = 1;
      while (!(suffix[first_tail] < res.target)) {
        j0 = index_at(first_tail) + 1;
        ++first_tail;
      }
      Rational kept = total - sum(std::span<const Rational>(inner_m).subspan(first_tail));
      if (kept >= res.target) {
        res.candidates = cand.size();
        res.selected_total = picked.size();
        res.selected_measure = total;
        res.tail_measure = suffix[first_tail];
        res.measure = kept;
        res.j0 = j0;
        res.q_hi = q_hi;
        for (std::size_t s = 0; s < first_tail; ++s) {
          Candidate& c = cand[picked[s]];
          res.chosen.push_back({{index_at(s), std::move(c.point), std::move(c.ball)}, std::move(c.transform)});
        }
        return res;
      }
    }
    if (q_hi >= q_max) {
      throw BudgetExhausted("kgb-measure", "selection reached " + std::to_string(to_double(total / lebesgue_measure(b))) +
                                               " of m(B) below 2 kappa by q = " + std::to_string(q_hi));
    }
    q_hi = (q_hi > q_max / 2) ? q_max : q_hi * 2;
  }
}

SubLevelCount compute_lB(const Ball& b, Role role, const DimensionFunction& f, const ConstructionParams& params) {
  Integer formula;
  if (role == Role::Root) {
    if (params.eta <= 0) throw InvalidArgument("eta must be resolved before counting sub-levels");
    formula = floor(params.c2 * params.eta / (params.c3() * lebesgue_measure(b))) + 1;
  } else {
    formula = floor_magnitude(f_volume(b, f).times(1 / (params.c3() * k_volume(b)))) + 1;
  }
  SubLevelCount out{formula, 0, false};
  constexpr unsigned kHuge = 1u << 30;
  if (params.mode == Mode::Demo && formula > params.sub_level_cap) {
    out.used = params.sub_level_cap;
    out.capped = true;
  } else {
    out.used = formula > kHuge ? kHuge : static_cast<unsigned>(formula.get_ui());
  }
  return out;
}

Magnitude epsilon_choice(const Ball& b, const Ball& root, const Rational& eta, const DimensionFunction& f,
                         const ConstructionParams& params) {
  Rational c = params.epsilon_constant();
  if (b == root) {
    if (eta <= 0) throw InvalidArgument("eta must be positive");
    return f_volume(root, f).times(c / eta);
  }
  return Magnitude(c);
}

GChoice choose_G(const BallFamily& family, const Ball& b, const Magnitude& epsilon, const DimensionFunction& f,
                 const ConstructionParams& params) {
  Magnitude threshold = ratio_threshold(epsilon, b, f, params);
  std::int64_t q_max = budget_q(family, params.index_budget);
  auto ok = [&](std::int64_t q) {
    Rational r = family.envelope(q);
    if (r == 0) return false;
    return check_conditions(r, threshold, f, params).all();
  };
  auto q = first_q_where(1, q_max, ok);
  if (!q) {
    Rational r = family.envelope(q_max);
    if (r == 0) throw BudgetExhausted("family", "no balls remain below the index budget");
    ConditionCheck c = check_conditions(r, threshold, f, params);
    std::string unmet = !c.monotone      ? "monotonicity"
                        : !c.separation  ? "separation"
                        : !c.ratio       ? "ratio"
                                         : "cardinality";
    throw BudgetExhausted(unmet, "condition fails up to q = " + std::to_string(q_max));
  }
  return {family.first_index(*q), *q};
}

std::vector<std::size_t> CantorTree::leaves() const {
  std::vector<std::size_t> out;
  for (const auto& n : nodes) {
    if (n.children.empty()) out.push_back(n.id);
  }
  return out;
}

namespace {

// Grid packing of A = B/2 minus the 4L: grid spacing d/2, balls of radius
// d, greedy in lexicographic order. For k = 1 the greedy keeps every fifth
// admissible grid point, so the packing is described by runs.
class Packing {
 public:
  Packing(const Ball& b, std::span<const Ball> removed, const Rational& d) : d_(d), h_(d / 2) {
    Ball half = scale_ball(b, make_rational(1, 2));
    k_ = b.dim();
    origin_.resize(k_);
    for (std::size_t i = 0; i < k_; ++i) origin_[i] = half.lo(i);
    Integer last = floor(2 * half.radius() / h_);
    if (k_ == 1) {
      std::vector<std::pair<Integer, Integer>> cut;
      for (const auto& l : removed) {
        Integer a = ceil((l.lo(0) - origin_[0]) / h_), z = floor((l.hi(0) - origin_[0]) / h_);
        if (a < 0) a = 0;
        if (z > last) z = last;
        if (a <= z) cut.emplace_back(a, z);
      }
      std::sort(cut.begin(), cut.end());
      Integer next(0);
      Integer pos(0);
      auto take = [&](const Integer& s, const Integer& e) {
        Integer first = s > next ? s : next;
        if (first > e) return;
        Integer count = (e - first) / 5 + 1;
        runs_.push_back({first, count});
        total_ += count;
        next = first + 5 * count;
      };
      for (auto& [a, z] : cut) {
        if (a > pos) take(pos, a - 1);
        if (z + 1 > pos) pos = z + 1;
      }
      if (pos <= last) take(pos, last);
    } else {
      if (k_ > 2) throw ConfigurationError("packing implemented for k <= 2");
      if (last * last > 4000000) throw ConfigurationError("packing grid too large for k = 2");
      long n = last.get_si();
      std::vector<Ball> candidates;
      for (long i = 0; i <= n; ++i) {
        for (long j = 0; j <= n; ++j) {
          std::vector<Rational> c{origin_[0] + i * h_, origin_[1] + j * h_};
          bool free = true;
          for (const auto& l : removed) {
            if (contains_point(l, c)) {
              free = false;
              break;
            }
          }
          if (free) candidates.emplace_back(std::move(c), d_);
        }
      }
      for (std::size_t idx : five_r_select(candidates)) explicit_.push_back(candidates[idx]);
      total_ = explicit_.size();
    }
  }

  const Integer& count() const { return total_; }
  Rational measure() const { return Rational(total_) * pow(2 * d_, static_cast<long>(k_)); }

  // Visits packed balls in greedy order until `visit` returns false.
  template <typename Visit>
  void for_each(Visit&& visit) const {
    if (k_ == 1) {
      for (const auto& [first, count] : runs_) {
        for (Integer t = 0; t < count; ++t) {
          Rational x = origin_[0] + Rational(first + 5 * t) * h_;
          if (!visit(Ball::interval(x, d_))) return;
        }
      }
    } else {
      for (const auto& b : explicit_) {
        if (!visit(b)) return;
      }
    }
  }

 private:
  struct Run {
    Integer first;
    Integer count;
  };
  Rational d_, h_;
  std::size_t k_ = 1;
  std::vector<Rational> origin_;
  std::vector<Run> runs_;
  std::vector<Ball> explicit_;
  Integer total_ = 0;
};

class Builder {
 public:
  Builder(const BallFamily& family, const DimensionFunction& f, const DimensionFunction& g,
          const ConstructionParams& params, CantorTree& tree)
      : family_(family), f_(f), g_(g), params_(params), tree_(tree) {}

  void build_local(std::size_t parent_id) {
    const Ball b = tree_.nodes[parent_id].ball;
    Role role = parent_id == 0 ? Role::Root : Role::Internal;
    LocalLevel local;
    local.l_b = compute_lB(b, role, f_, params_);
    local.epsilon = epsilon_choice(b, tree_.root, tree_.eta, f_, params_);
    GChoice gc = choose_G(family_, b, *local.epsilon, f_, params_);
    local.g_index = gc.g_index;
    local.g_q = gc.q;

    Rational kappa = params_.kappa();
    KgbResult first = kgb_select(family_, gc.g_index, b, f_, g_, kappa, params_.index_budget, params_.scan_budget);
    SubLevel s1;
    s1.index = 1;
    s1.g_index = gc.g_index;
    std::vector<Ball> placed;
    for (auto& sel : first.chosen) {
      placed.push_back(sel.member.ball);
      s1.members.push_back(add_child(parent_id, 1, sel.member));
    }
    local.sub_levels.push_back(std::move(s1));

    Rational half_measure = lebesgue_measure(scale_ball(b, make_rational(1, 2)));
    Magnitude p3_target(params_.c3() * k_volume(b));
    for (unsigned l = 1; l < local.l_b.used; ++l) {
      SubLevel next;
      next.index = l + 1;
      std::vector<Ball> fours;
      for (const auto& p : placed) fours.push_back(scale_ball(p, 4));
      next.free_measure = diff_measure(scale_ball(b, make_rational(1, 2)), fours);
      next.free_required = half_measure / 2;
      if (next.free_measure < next.free_required) {
        throw FreeRegionDeficit("sub-level " + std::to_string(l + 1) + ": free measure " +
                                std::to_string(to_double(next.free_measure / half_measure)) + " of m(B/2)");
      }
      next.d_min = placed.front().radius();
      Magnitude min_vf = f_(placed.front().radius());
      for (const auto& p : placed) {
        next.d_min = min(next.d_min, p.radius());
        Magnitude v = f_(p.radius());
        if (compare(v, min_vf) < 0) min_vf = v;
      }
      Packing packing(b, fours, next.d_min);
      next.packing_measure = packing.measure();
      next.packing_required = params_.c1 / (2 * params_.c2 * pow(Rational(5), static_cast<long>(params_.k))) * half_measure;
      if (next.packing_measure < next.packing_required) {
        throw FreeRegionDeficit("packing of sub-level " + std::to_string(l + 1) + " too sparse");
      }
      next.packed_available = packing.count().fits_ulong_p() ? packing.count().get_ui() : SIZE_MAX;

      // V^f of the new balls at most half of every earlier one.
      Magnitude half_vf = min_vf.times(make_rational(1, 2));
      std::int64_t q_max = budget_q(family_, params_.index_budget);
      auto small_enough = [&](std::int64_t q) {
        Rational r = family_.envelope(q);
        return r == 0 || compare(f_(r), half_vf) <= 0;
      };
      auto qg = first_q_where(gc.q, q_max, small_enough);
      if (!qg) throw BudgetExhausted("halving", "no q below the budget halves V^f");
      next.g_index = std::max(gc.g_index, family_.first_index(*qg));

      std::vector<Selected> gathered;
      Rational mass_lo(0);
      Rational target = *p3_target.rational();
      packing.for_each([&](const Ball& p) {
        ++next.packed_used;
        try {
          KgbResult r = kgb_select(family_, next.g_index, p, f_, g_, kappa, params_.index_budget, params_.scan_budget);
          for (auto& sel : r.chosen) {
            mass_lo += f_(sel.member.ball.radius()).enclose(kBits).lo;
            gathered.push_back(std::move(sel));
          }
        } catch (const BudgetExhausted&) {
          ++next.packed_skipped;
        }
        return mass_lo < target && next.packed_used < params_.packing_budget;
      });
      if (mass_lo < target) {
        throw BudgetExhausted("sub-level-mass", "packing of sub-level " + std::to_string(l + 1) +
                                                    " ran out before reaching c3 V^k(B)");
      }
      std::sort(gathered.begin(), gathered.end(),
                [](const Selected& x, const Selected& y) { return x.member.index < y.member.index; });
      for (auto& sel : gathered) {
        placed.push_back(sel.member.ball);
        next.members.push_back(add_child(parent_id, l + 1, sel.member));
      }
      local.sub_levels.push_back(std::move(next));
    }
    local.built = true;
    tree_.nodes[parent_id].local = std::move(local);
  }

 private:
  std::size_t add_child(std::size_t parent_id, unsigned sub_level, const FamilyMember& m) {
    CantorNode node{.id = tree_.nodes.size(),
                    .level = tree_.nodes[parent_id].level + 1,
                    .parent = parent_id,
                    .sub_level = sub_level,
                    .ball = m.ball,
                    .family_index = m.index,
                    .point = m.point};
    tree_.nodes[parent_id].children.push_back(node.id);
    if (tree_.levels.size() < node.level) tree_.levels.resize(node.level);
    tree_.levels[node.level - 1].push_back(node.id);
    tree_.nodes.push_back(std::move(node));
    return tree_.nodes.back().id;
  }

  const BallFamily& family_;
  const DimensionFunction& f_;
  const DimensionFunction& g_;
  const ConstructionParams& params_;
  CantorTree& tree_;
};

}  // namespace

CantorTree build_cantor(const BallFamily& family, const Ball& root, const DimensionFunction& f,
                        const DimensionFunction& g, const ConstructionParams& params) {
  params.validate();
  if (root.dim() != params.k || family.dim() != params.k) throw InvalidArgument("dimension mismatch");
  if (!(g == DimensionFunction::power(Rational(params.k)))) {
    throw ConfigurationError("the construction supports the ambient function g(r) = r^k only");
  }
  CantorTree tree{"constructed", root, {}, {}, params.eta};
  if (tree.eta == 0) tree.eta = params.c3() * lebesgue_measure(root) / params.c2;
  CantorNode top{.ball = root, .mu = Enclosure::exact(Rational(1))};
  tree.nodes.push_back(std::move(top));
  tree.levels.push_back({0});
  if (f.ratio_limit(params.k) != Limit::Infinite) {
    tree.status = "comparable-measures case, construction skipped";
    return tree;
  }
  ConstructionParams resolved = params;
  resolved.eta = tree.eta;
  Builder builder(family, f, g, resolved, tree);
  for (unsigned n = 2; n <= params.depth; ++n) {
    std::vector<std::size_t> parents = tree.levels[n - 2];
    for (std::size_t id : parents) builder.build_local(id);
  }
  assign_measure(tree, f);
  return tree;
}

void assign_measure(CantorTree& tree, const DimensionFunction& f) {
  for (auto& node : tree.nodes) {
    if (node.children.empty()) continue;
    std::vector<Magnitude> w;
    for (std::size_t c : node.children) w.push_back(f_volume(tree.nodes[c].ball, f));
    Enclosure total = sum_enclosure(w, kBits);
    for (std::size_t i = 0; i < w.size(); ++i) {
      Enclosure wi = w[i].is_rational() ? Enclosure::exact(*w[i].rational()) : w[i].enclose(kBits);
      Enclosure share = div_nonneg(wi, total);
      tree.nodes[node.children[i]].mu = mul_nonneg(share, node.mu);
    }
  }
}

namespace {

Enclosure enclosure_sum(const std::vector<Enclosure>& parts) {
  std::vector<Rational> lo, hi;
  for (const auto& p : parts) {
    lo.push_back(p.lo);
    hi.push_back(p.hi);
  }
  return {sum(lo), sum(hi)};
}

bool matches(const Enclosure& e, const Enclosure& target) {
  if (e.is_exact() && target.is_exact()) return e.lo == target.lo;
  return e.lo <= target.hi && target.lo <= e.hi;
}

}  // namespace

bool Verification::all_exact_pass() const {
  return p0 && p1 && p2 && p3 && p4 && p5 && nested && membership && conditions && conservation &&
         node_bound_consistent;
}

Verification verify_tree(const CantorTree& tree, const BallFamily& family, const DimensionFunction& f,
                         const DimensionFunction& g, const ConstructionParams& params) {
  Verification v;
  v.p0 = v.p1 = v.p2 = v.p3 = v.p4 = v.p5 = v.nested = v.membership = v.conditions = v.conservation = true;
  v.node_bound = true;
  auto fail = [&](bool& flag, const std::string& what) {
    flag = false;
    if (v.failures.size() < 50) v.failures.push_back(what);
  };
  if (tree.nodes.empty() || tree.nodes[0].parent || tree.nodes[0].level != 1 || !(tree.nodes[0].ball == tree.root)) {
    fail(v.p0, "root node malformed");
  }
  ConstructionParams resolved = params;
  resolved.eta = tree.eta;
  bool any_capped = false;
  bool root_capped = false;

  for (const auto& node : tree.nodes) {
    NodeFlags nf;
    nf.id = node.id;
    std::string tag = "node " + std::to_string(node.id);
    if (node.id != 0) {
      if (!node.parent || *node.parent >= node.id || tree.nodes[*node.parent].level + 1 != node.level) {
        fail(v.p0, tag + ": parent link");
      }
      // Membership of the family.
      bool member = node.family_index && node.point;
      if (member) {
        try {
          member = family.index_of(*node.point) == *node.family_index;
          auto fb = family.ball(*node.point);
          member = member && fb && *fb == node.ball;
        } catch (const Error&) {
          member = false;
        }
      }
      if (!member) {
        nf.membership = false;
        fail(v.membership, tag + ": not the family ball at its index");
      }
      // Conditions at selection time, against the parent's choices.
      const CantorNode& parent = tree.nodes[*node.parent];
      if (parent.local.built && parent.local.epsilon) {
        Magnitude threshold = ratio_threshold(*parent.local.epsilon, parent.ball, f, resolved);
        ConditionCheck c = check_conditions(node.ball.radius(), threshold, f, resolved);
        std::uint64_t g_sub = node.sub_level >= 1 && node.sub_level <= parent.local.sub_levels.size()
                                  ? parent.local.sub_levels[node.sub_level - 1].g_index
                                  : parent.local.g_index;
        bool index_ok = node.family_index && *node.family_index >= parent.local.g_index && *node.family_index >= g_sub;
        if (!c.all() || !index_ok) {
          nf.conditions = false;
          fail(v.conditions, tag + ": selection conditions");
        }
      } else {
        nf.conditions = false;
        fail(v.conditions, tag + ": parent has no recorded local level");
      }
      SubLevelCount lc = compute_lB(node.ball, Role::Internal, f, resolved);
      if (lc.formula < 2) {
        nf.p5 = false;
        fail(v.p5, tag + ": fewer than two sub-levels");
      }
      Magnitude vf = f_volume(node.ball, f);
      if (compare(Magnitude(node.mu.hi * tree.eta), vf) > 0) {
        nf.node_bound = false;
        v.node_bound = false;
        ++v.node_bound_failures;
      }
    }

    if (!node.children.empty()) {
      if (!node.local.built) fail(v.p0, tag + ": children without a local level");
      if (node.local.l_b.capped) {
        any_capped = true;
        if (node.id == 0) root_capped = true;
      }
      if (node.id == 0) {
        SubLevelCount lc = compute_lB(node.ball, Role::Root, f, resolved);
        if (lc.formula < 2) {
          nf.p5 = false;
          fail(v.p5, "root: fewer than two sub-levels");
        }
      }
      const Ball& b = node.ball;
      std::vector<Ball> threes;
      std::vector<Magnitude> vfs;
      std::vector<Enclosure> mus;
      std::map<unsigned, std::vector<std::size_t>> by_sub;
      for (std::size_t c : node.children) {
        const CantorNode& ch = tree.nodes[c];
        by_sub[ch.sub_level].push_back(c);
        threes.push_back(scale_ball(ch.ball, 3));
        vfs.push_back(f_volume(ch.ball, f));
        mus.push_back(ch.mu);
        if (!contains(b, ch.ball)) {
          nf.nested = false;
          fail(v.nested, tag + ": child " + std::to_string(c) + " not inside");
        }
        TransformedBall t = transform_ball(ch.ball, f, g);
        if (!contains(b, threes.back()) || compare(Magnitude(3 * ch.ball.radius()), t.radius()) > 0) {
          nf.p1 = false;
          fail(v.p1, tag + ": 3L of child " + std::to_string(c));
        }
      }
      if (!pairwise_disjoint(threes)) {
        nf.p1 = false;
        fail(v.p1, tag + ": enlarged children overlap");
      }
      Magnitude p3_target(params.c3() * k_volume(b));
      std::optional<Magnitude> prev_min;
      unsigned expected_sub = 1;
      for (auto& [sub, ids] : by_sub) {
        if (sub != expected_sub++) fail(v.p0, tag + ": sub-levels not consecutive");
        std::vector<TransformedBall> ts;
        std::vector<Magnitude> sub_vf;
        for (std::size_t c : ids) {
          ts.push_back(transform_ball(tree.nodes[c].ball, f, g));
          sub_vf.push_back(f_volume(tree.nodes[c].ball, f));
          if (!transform_inside(ts.back(), b)) {
            nf.p2 = false;
            fail(v.p2, tag + ": transform of child " + std::to_string(c) + " leaves B");
          }
        }
        if (!transforms_pairwise_disjoint(ts)) {
          nf.p2 = false;
          fail(v.p2, tag + ": transforms overlap in sub-level " + std::to_string(sub));
        }
        // V^k(L^f) = f(r_L) for g = r^k.
        if (!sum_at_least(sub_vf, p3_target)) {
          nf.p3 = false;
          fail(v.p3, tag + ": sub-level " + std::to_string(sub) + " below c3 V^k(B)");
        }
        Magnitude mx = sub_vf.front(), mn = sub_vf.front();
        for (const auto& x : sub_vf) {
          if (compare(x, mx) > 0) mx = x;
          if (compare(x, mn) < 0) mn = x;
        }
        if (prev_min && compare(mx, prev_min->times(make_rational(1, 2))) > 0) {
          nf.p4 = false;
          fail(v.p4, tag + ": sub-level " + std::to_string(sub) + " not halved");
        }
        prev_min = mn;
      }
      if (!matches(enclosure_sum(mus), node.mu)) {
        nf.conservation = false;
        fail(v.conservation, tag + ": children measures do not add up");
      }
      nf.volume_sum = sum_at_least(vfs, f_volume(b, f));
      if (node.id == 0) v.level2_chain = sum_at_least(vfs, Magnitude(tree.eta));
    }
    v.nodes.push_back(nf);
  }
  std::vector<Enclosure> leaf_mu;
  for (std::size_t id : tree.leaves()) leaf_mu.push_back(tree.nodes[id].mu);
  v.leaf_total = enclosure_sum(leaf_mu);
  v.leaf_total_exact = v.leaf_total.is_exact() && v.leaf_total.lo == 1;
  if (!v.leaf_total.contains(Rational(1))) fail(v.conservation, "leaf measures do not total 1");
  if (tree.nodes.size() == 1) v.level2_chain = true;

  v.node_bound_expected = params.mode == Mode::Faithful || !any_capped;
  bool chain_expected = params.mode == Mode::Faithful || !root_capped;
  v.node_bound_consistent = (!v.node_bound_expected || v.node_bound) && (!chain_expected || v.level2_chain);
  if (!v.node_bound_consistent) v.failures.push_back("node bound fails where the mode promises it");
  return v;
}

Enclosure leaf_measure(const CantorTree& tree, const Ball& a) {
  Rational lo(0), hi(0);
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    std::size_t id = stack.back();
    stack.pop_back();
    const CantorNode& n = tree.nodes[id];
    if (!intersects(a, n.ball)) continue;
    if (contains(a, n.ball)) {
      lo += n.mu.lo;
      hi += n.mu.hi;
      continue;
    }
    if (n.children.empty()) {
      hi += n.mu.hi;
      continue;
    }
    for (std::size_t c : n.children) stack.push_back(c);
  }
  return {lo, hi};
}

namespace {

// Uniform in [-1, 1) on a 2^-52 grid.
Rational symmetric_unit(std::mt19937_64& rng) {
  std::uint64_t u = rng() >> 11;
  return make_rational(Integer(static_cast<unsigned long>(u)), Integer(1) << 52) - 1;
}

}  // namespace

BallBoundReport verify_ball_bound(const CantorTree& tree, const DimensionFunction& f, const ConstructionParams& params,
                                  std::uint64_t trials, std::uint64_t seed) {
  if (tree.levels.size() < 3) throw PreconditionViolated("the ball bound needs a tree of depth >= 3");
  BallBoundReport rep;
  rep.seed = seed;
  rep.c_target = 2 + 2 * pow(Rational(5), static_cast<long>(params.k)) * params.c2 / (params.c1 * params.c3());
  rep.r_o = tree.nodes[tree.levels[1].front()].ball.radius();
  for (std::size_t id : tree.levels[1]) rep.r_o = min(rep.r_o, tree.nodes[id].ball.radius());
  std::vector<std::size_t> leaves = tree.leaves();
  Rational min_leaf = tree.nodes[leaves.front()].ball.radius();
  for (std::size_t id : leaves) min_leaf = min(min_leaf, tree.nodes[id].ball.radius());
  long span = static_cast<long>(std::ceil(log2_approx(rep.r_o / min_leaf))) + 2;
  if (span < 1) span = 1;

  Rational worst(0);
  auto record = [&](const Ball& a) {
    Enclosure mu = leaf_measure(tree, a);
    if (mu.hi == 0) return;
    Rational vf = f_volume(a, f).enclose(kBits).lo;
    worst = max(worst, mu.hi * tree.eta / vf);
  };
  Rational c_case_ii = 2 * pow(Rational(5), static_cast<long>(params.k)) * params.c2 / (params.c1 * params.c3());

  std::mt19937_64 rng(seed);
  for (std::uint64_t t = 0; t < trials; ++t) {
    const CantorNode& leaf = tree.nodes[leaves[rng() % leaves.size()]];
    long e = static_cast<long>(rng() % static_cast<std::uint64_t>(span));
    Rational mant = make_rational(Integer(static_cast<unsigned long>((rng() >> 33) | (std::uint64_t{1} << 31))),
                                  Integer(1) << 32);
    Rational r = rep.r_o * mant * pow2(-e);
    std::vector<Rational> c = leaf.ball.center();
    for (auto& x : c) x += symmetric_unit(rng) * r;
    Ball a(std::move(c), r);
    record(a);
    ++rep.random_trials;

    // Replay the case analysis: nodes meeting A, level by level.
    std::vector<std::vector<std::size_t>> hits(tree.levels.size());
    std::vector<std::size_t> frontier{0};
    for (std::size_t lvl = 0; lvl < tree.levels.size() && !frontier.empty(); ++lvl) {
      std::vector<std::size_t> next;
      for (std::size_t id : frontier) {
        if (!intersects(a, tree.nodes[id].ball)) continue;
        hits[lvl].push_back(id);
        for (std::size_t ch : tree.nodes[id].children) next.push_back(ch);
      }
      frontier = std::move(next);
    }
    std::size_t n = 0;
    while (n < hits.size() && hits[n].size() < 2) ++n;
    if (n == hits.size()) {
      ++rep.single_chain;
      continue;
    }
    const CantorNode& b = tree.nodes[hits[n - 1].front()];
    if (a.radius() >= b.ball.radius()) {
      ++rep.reduced;
      continue;
    }
    ++rep.split;
    if (n + 1 > 2) ++rep.level_above_two;
    std::map<unsigned, std::vector<std::size_t>> by_sub;
    for (std::size_t id : hits[n]) by_sub[tree.nodes[id].sub_level].push_back(id);
    std::vector<Magnitude> case_i, case_ii;
    Magnitude vfa = f_volume(a, f);
    for (auto& [sub, ids] : by_sub) {
      if (ids.size() == 1) {
        ++rep.case_i_sublevels;
        const Ball& l = tree.nodes[ids.front()].ball;
        if (contains(scale_ball(l, 3), a) || !(l.radius() <= a.radius())) rep.lemma_conclusions = false;
        case_i.push_back(f_volume(l, f));
      } else {
        ++rep.case_ii_sublevels;
        for (std::size_t id : ids) {
          const Ball& l = tree.nodes[id].ball;
          TransformedBall lf = transform_ball(l, f, DimensionFunction::power(Rational(params.k)));
          if (!transform_inside(lf, scale_ball(a, 5))) rep.lemma_conclusions = false;
          case_ii.push_back(f_volume(l, f));
        }
      }
    }
    if (!case_i.empty() && !sum_at_most(case_i, vfa.times(Rational(2)))) rep.case_i_bound = false;
    if (!case_ii.empty() && !sum_at_most(case_ii, vfa.times(c_case_ii))) rep.case_ii_bound = false;
  }
  for (std::size_t id : leaves) {
    record(tree.nodes[id].ball);
    ++rep.leaf_trials;
  }
  if (worst > 0) {
    // 64 significant bits, rounded up.
    long scale = std::max<long>(0, -static_cast<long>(std::floor(log2_approx(worst))));
    rep.c_emp = round_up_dyadic(worst, static_cast<unsigned>(64 + scale));
  }
  rep.within_target = rep.c_emp <= rep.c_target;
  return rep;
}

bool Certificate::exact_checks_pass() const {
  if (status != "constructed") return true;
  return verification.all_exact_pass() && (!ball_bound || ball_bound->structure_ok());
}

Certificate certify(const CantorTree& tree, const BallFamily& family, const DimensionFunction& f,
                    const DimensionFunction& g, const ConstructionParams& params) {
  Certificate cert;
  cert.status = tree.status;
  cert.mode = params.mode;
  cert.params = params;
  cert.params.eta = tree.eta;
  cert.node_count = tree.nodes.size();
  for (const auto& lvl : tree.levels) cert.level_sizes.push_back(lvl.size());
  if (!tree.constructed()) return cert;
  cert.verification = verify_tree(tree, family, f, g, params);
  if (tree.levels.size() >= 3 && params.trials > 0) {
    cert.ball_bound = verify_ball_bound(tree, f, params, params.trials, params.seed);
  }
  return cert;
}

}  // namespace mtp
