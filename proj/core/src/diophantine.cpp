#include "mtp/diophantine.hpp"

#include <algorithm>
#include <numeric>

#include "mtp/error.hpp"
#include "mtp/number_theory.hpp"

namespace mtp {

ApproximatingFunction ApproximatingFunction::power(const Rational& tau) {
  return ApproximatingFunction(Kind::Power, tau, {});
}

ApproximatingFunction ApproximatingFunction::table(std::vector<Rational> values) {
  std::vector<Magnitude> mags;
  mags.reserve(values.size());
  for (const auto& v : values) {
    if (v < 0) throw InvalidArgument("approximating function value must be >= 0, got " + mtp::to_string(v));
    mags.emplace_back(v);
  }
  return magnitude_table(std::move(mags));
}

ApproximatingFunction ApproximatingFunction::magnitude_table(std::vector<Magnitude> values) {
  if (values.empty()) throw InvalidArgument("empty approximating function table");
  return ApproximatingFunction(Kind::Table, Rational(0), std::move(values));
}

std::optional<std::uint64_t> ApproximatingFunction::domain_max() const {
  if (kind_ == Kind::Power) return std::nullopt;
  return values_.size();
}

Magnitude ApproximatingFunction::operator()(std::uint64_t q) const {
  if (q == 0) throw InvalidArgument("approximating function evaluated at q = 0");
  if (kind_ == Kind::Power) return Magnitude(1, Rational(q), -tau_);
  if (q > values_.size()) {
    throw InvalidArgument("q = " + std::to_string(q) + " beyond table of size " +
                          std::to_string(values_.size()));
  }
  return values_[q - 1];
}

bool ApproximatingFunction::ratio_is_rational(std::uint64_t q) const {
  return (*this)(q).times(Rational(1, q)).is_rational();
}

Rational ApproximatingFunction::ratio(std::uint64_t q) const {
  Magnitude r = (*this)(q).times(Rational(1, q));
  if (auto v = r.rational()) return *v;
  throw ConfigurationError("psi(q)/q = " + r.to_string() + " at q = " + std::to_string(q) +
                           " is irrational; ball radii must be exact rationals");
}

std::string ApproximatingFunction::to_string() const {
  if (kind_ == Kind::Power) return "q^-(" + mtp::to_string(tau_) + ")";
  return "table[" + std::to_string(values_.size()) + "]";
}

std::string to_string(Coprimality mode) { return mode == Coprimality::Pairwise ? "pairwise" : "joint"; }

Coprimality parse_coprimality(const std::string& text) {
  if (text == "pairwise") return Coprimality::Pairwise;
  if (text == "joint") return Coprimality::Joint;
  throw InvalidArgument("unknown coprimality mode '" + text + "'");
}

std::vector<Rational> RationalPoint::coordinates() const {
  std::vector<Rational> out;
  out.reserve(p.size());
  for (auto pi : p) out.push_back(make_rational(pi, q));
  return out;
}

bool is_admissible(const RationalPoint& point, Coprimality mode) {
  if (point.q < 1) return false;
  auto q = static_cast<std::uint64_t>(point.q);
  for (auto pi : point.p) {
    if (pi < 0 || pi > point.q) return false;
  }
  if (mode == Coprimality::Pairwise) {
    return std::all_of(point.p.begin(), point.p.end(),
                       [&](std::int64_t pi) { return gcd(static_cast<std::uint64_t>(pi), q) == 1; });
  }
  std::uint64_t g = q;
  for (auto pi : point.p) g = gcd(g, static_cast<std::uint64_t>(pi));
  return g == 1;
}

namespace {

// Calls visit(p) for each p in [0, q]^k in lexicographic order.
template <typename Visit>
void for_each_numerator(unsigned k, std::int64_t q, Visit&& visit) {
  std::vector<std::int64_t> p(k, 0);
  while (true) {
    visit(p);
    unsigned i = k;
    while (i > 0 && p[i - 1] == q) {
      p[i - 1] = 0;
      --i;
    }
    if (i == 0) return;
    ++p[i - 1];
  }
}

}  // namespace

std::vector<RationalPoint> enumerate_rationals(unsigned k, std::int64_t max_q, Coprimality mode) {
  if (k == 0) throw InvalidArgument("dimension k must be >= 1");
  if (max_q < 1) throw InvalidArgument("Q must be >= 1");
  std::vector<RationalPoint> out;
  for (std::int64_t q = 1; q <= max_q; ++q) {
    if (k == 1) {
      for (std::int64_t p = 0; p <= q; ++p) {
        if (gcd(static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(q)) == 1) out.push_back({{p}, q});
      }
      continue;
    }
    for_each_numerator(k, q, [&](const std::vector<std::int64_t>& p) {
      RationalPoint pt{p, q};
      if (is_admissible(pt, mode)) out.push_back(std::move(pt));
    });
  }
  return out;
}

std::uint64_t count_points_at(unsigned k, std::int64_t q, Coprimality mode) {
  if (q < 1) throw InvalidArgument("q must be >= 1");
  auto uq = static_cast<std::uint64_t>(q);
  if (q == 1) return std::uint64_t{1} << k;
  if (mode == Coprimality::Pairwise || k == 1) {
    std::uint64_t phi = euler_phi(uq);
    std::uint64_t out = 1;
    for (unsigned i = 0; i < k; ++i) out *= phi;
    return out;
  }
  // sum over squarefree d | q of mu(d) (q/d + 1)^k
  auto primes = prime_factors(uq);
  std::int64_t total = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << primes.size()); ++mask) {
    std::uint64_t d = 1;
    int bits = 0;
    for (std::size_t i = 0; i < primes.size(); ++i) {
      if (mask >> i & 1) {
        d *= primes[i];
        ++bits;
      }
    }
    std::int64_t term = 1;
    for (unsigned i = 0; i < k; ++i) term *= static_cast<std::int64_t>(uq / d + 1);
    total += bits % 2 == 0 ? term : -term;
  }
  return static_cast<std::uint64_t>(total);
}

std::uint64_t count_solutions(std::span<const Rational> y, const ApproximatingFunction& psi,
                              Coprimality mode, std::int64_t max_q) {
  if (y.empty()) throw InvalidArgument("point y must have dimension >= 1");
  for (const auto& yi : y) {
    if (yi < 0 || yi > 1) throw PreconditionViolated("y must lie in the unit cube");
  }
  unsigned k = static_cast<unsigned>(y.size());
  std::uint64_t count = 0;
  std::vector<std::vector<std::int64_t>> candidates(k);
  for (std::int64_t q = 1; q <= max_q; ++q) {
    Magnitude width = psi(static_cast<std::uint64_t>(q));
    if (width.is_zero()) continue;
    Rational slack = width.enclose(64).hi;
    bool empty = false;
    for (unsigned i = 0; i < k; ++i) {
      candidates[i].clear();
      Rational centre = y[i] * q;
      Integer lo = ceil(centre - slack);
      Integer hi = floor(centre + slack);
      std::int64_t from = std::max<std::int64_t>(0, lo.fits_slong_p() ? lo.get_si() : 0);
      std::int64_t to = std::min<std::int64_t>(q, hi.fits_slong_p() ? hi.get_si() : q);
      for (std::int64_t p = from; p <= to; ++p) {
        if (compare(Magnitude(abs(centre - p)), width) < 0) candidates[i].push_back(p);
      }
      if (candidates[i].empty()) {
        empty = true;
        break;
      }
    }
    if (empty) continue;
    std::vector<std::size_t> pos(k, 0);
    RationalPoint pt{std::vector<std::int64_t>(k), q};
    while (true) {
      for (unsigned i = 0; i < k; ++i) pt.p[i] = candidates[i][pos[i]];
      if (is_admissible(pt, mode)) ++count;
      unsigned i = k;
      while (i > 0 && pos[i - 1] + 1 == candidates[i - 1].size()) {
        pos[i - 1] = 0;
        --i;
      }
      if (i == 0) break;
      ++pos[i - 1];
    }
  }
  return count;
}

ApproximatingFunction theta_transform(const ApproximatingFunction& psi, const DimensionFunction& f,
                                      unsigned k) {
  if (k == 0) throw InvalidArgument("dimension k must be >= 1");
  if (!f.is_power()) throw ConfigurationError("theta transform needs a power dimension function");
  Rational t = f.exponent() / k;
  if (psi.is_power()) return ApproximatingFunction::power(t * (1 + psi.tau()) - 1);
  std::vector<Magnitude> values;
  values.reserve(psi.values().size());
  for (std::uint64_t q = 1; q <= psi.values().size(); ++q) {
    Magnitude x = psi(q).times(Rational(1, q));
    values.push_back(x.is_zero() ? x : x.pow(t).times(Rational(q)));
  }
  return ApproximatingFunction::magnitude_table(std::move(values));
}

BallFamily::BallFamily(ApproximatingFunction psi, unsigned k, Coprimality mode,
                       std::optional<std::int64_t> q_cap)
    : psi_(std::move(psi)), k_(k), mode_(mode), q_cap_(q_cap) {
  if (k_ == 0) throw InvalidArgument("dimension k must be >= 1");
  if (auto n = psi_.domain_max()) {
    if (!q_cap_) q_cap_ = static_cast<std::int64_t>(*n);
    if (*q_cap_ > static_cast<std::int64_t>(*n)) throw InvalidArgument("Q cap beyond psi table");
  }
  if (q_cap_ && *q_cap_ < 1) throw InvalidArgument("Q cap must be >= 1");
  if (psi_.is_power() && psi_.tau() <= -1) {
    throw ConfigurationError("radii psi(q)/q do not tend to 0 for tau <= -1");
  }
}

void BallFamily::check_q(std::int64_t q) const {
  if (q < 1) throw InvalidArgument("denominator must be >= 1");
  if (q_cap_ && q > *q_cap_) throw InvalidArgument("denominator beyond family cap");
}

std::uint64_t BallFamily::first_index(std::int64_t q) const {
  if (q <= 1) return 0;
  if (k_ == 1) return 1 + totient_sum(static_cast<std::uint64_t>(q - 1));
  std::uint64_t total = 0;
  for (std::int64_t j = 1; j < q; ++j) total += count_points_at(k_, j, mode_);
  return total;
}

std::uint64_t BallFamily::index_of(const RationalPoint& point) const {
  if (point.p.size() != k_ || !is_admissible(point, mode_)) {
    throw InvalidArgument("point is not a member of the family");
  }
  check_q(point.q);
  std::uint64_t base = first_index(point.q);
  if (k_ == 1) {
    if (point.q == 1) return base + static_cast<std::uint64_t>(point.p[0]);
    return base + coprime_rank(static_cast<std::uint64_t>(point.p[0]), static_cast<std::uint64_t>(point.q));
  }
  std::uint64_t rank = 0;
  bool found = false;
  for_each_numerator(k_, point.q, [&](const std::vector<std::int64_t>& p) {
    if (found) return;
    if (p == point.p) {
      found = true;
      return;
    }
    if (is_admissible({p, point.q}, mode_)) ++rank;
  });
  return base + rank;
}

std::int64_t BallFamily::first_q_at_or_after(std::uint64_t index) const {
  if (first_index(1) >= index) return 1;
  std::int64_t hi = 2;
  while (first_index(hi) < index) hi *= 2;
  std::int64_t lo = hi / 2;
  while (lo + 1 < hi) {
    std::int64_t mid = lo + (hi - lo) / 2;
    if (first_index(mid) >= index) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::int64_t BallFamily::max_q_within(std::uint64_t index_budget) const {
  if (budget_cache_ && budget_cache_->first == index_budget) return budget_cache_->second;
  std::int64_t q = first_q_at_or_after(index_budget + 1) - 1;
  if (q_cap_) q = std::min(q, *q_cap_);
  budget_cache_ = {index_budget, q};
  return q;
}

Rational BallFamily::radius(std::int64_t q) const {
  check_q(q);
  return psi_.ratio(static_cast<std::uint64_t>(q));
}

std::optional<Ball> BallFamily::ball(const RationalPoint& point) const {
  Rational r = radius(point.q);
  if (r == 0) return std::nullopt;
  return Ball(point.coordinates(), r);
}

Rational BallFamily::envelope(std::int64_t q) const {
  check_q(q);
  if (psi_.is_power()) return radius(q);
  Rational best(0);
  for (std::int64_t j = q; j <= *q_cap_; ++j) best = max(best, radius(j));
  return best;
}

std::vector<RationalPoint> BallFamily::points_with_centers_in(const std::vector<Rational>& lo,
                                                              const std::vector<Rational>& hi, std::int64_t q_lo,
                                                              std::int64_t q_hi) const {
  if (lo.size() != k_ || hi.size() != k_) throw InvalidArgument("region of wrong dimension");
  q_lo = std::max<std::int64_t>(q_lo, 1);
  if (q_cap_) q_hi = std::min(q_hi, *q_cap_);
  std::vector<RationalPoint> out;
  if (q_hi < q_lo) return out;
  if (k_ == 1) {
    for_each_farey_in(lo[0], hi[0], q_hi, [&](const Fraction& fr) {
      if (fr.q >= q_lo && radius(fr.q) != 0) out.push_back({{fr.p}, fr.q});
      return true;
    });
  } else {
    for (std::int64_t q = q_lo; q <= q_hi; ++q) {
      if (radius(q) == 0) continue;
      std::vector<std::int64_t> from(k_), to(k_);
      bool empty = false;
      for (unsigned i = 0; i < k_; ++i) {
        Integer a = ceil(lo[i] * q), b = floor(hi[i] * q);
        from[i] = std::max<std::int64_t>(0, a.get_si());
        to[i] = std::min<std::int64_t>(q, b.get_si());
        if (from[i] > to[i]) empty = true;
      }
      if (empty) continue;
      for_each_numerator(k_, q, [&](const std::vector<std::int64_t>& p) {
        RationalPoint pt{p, q};
        bool inside = true;
        for (unsigned i = 0; i < k_; ++i) inside = inside && p[i] >= from[i] && p[i] <= to[i];
        if (inside && is_admissible(pt, mode_)) out.push_back(std::move(pt));
      });
    }
  }
  std::sort(out.begin(), out.end(), [](const RationalPoint& a, const RationalPoint& b) {
    return a.q != b.q ? a.q < b.q : a.p < b.p;
  });
  return out;
}

std::vector<FamilyMember> BallFamily::members_with_centers_in(const std::vector<Rational>& lo,
                                                              const std::vector<Rational>& hi,
                                                              std::int64_t q_lo,
                                                              std::int64_t q_hi) const {
  std::vector<FamilyMember> out;
  for (auto& pt : points_with_centers_in(lo, hi, q_lo, q_hi)) {
    std::uint64_t index = index_of(pt);
    Ball b = *ball(pt);
    out.push_back({index, std::move(pt), std::move(b)});
  }
  return out;
}

std::vector<FamilyMember> BallFamily::members_up_to(std::int64_t max_q) const {
  if (q_cap_) max_q = std::min(max_q, *q_cap_);
  std::vector<FamilyMember> out;
  std::uint64_t index = 0;
  for (auto& pt : enumerate_rationals(k_, max_q, mode_)) {
    if (auto b = ball(pt)) out.push_back({index, pt, std::move(*b)});
    ++index;
  }
  return out;
}

}  // namespace mtp
