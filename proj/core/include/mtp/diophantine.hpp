#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mtp/dimension_function.hpp"
#include "mtp/exact.hpp"
#include "mtp/geometry.hpp"
#include "mtp/magnitude.hpp"

namespace mtp {

// psi(q) = q^-tau, or an explicit table psi(1..N). Table entries may be zero
// (no approximation at that q).
class ApproximatingFunction {
 public:
  enum class Kind { Power, Table };

  static ApproximatingFunction power(const Rational& tau);
  static ApproximatingFunction table(std::vector<Rational> values);
  static ApproximatingFunction magnitude_table(std::vector<Magnitude> values);

  Kind kind() const { return kind_; }
  bool is_power() const { return kind_ == Kind::Power; }
  const Rational& tau() const { return tau_; }
  const std::vector<Magnitude>& values() const { return values_; }
  // Largest q with a defined value, or nullopt for Power.
  std::optional<std::uint64_t> domain_max() const;

  Magnitude operator()(std::uint64_t q) const;
  // psi(q)/q when it is rational; throws ConfigurationError otherwise.
  Rational ratio(std::uint64_t q) const;
  bool ratio_is_rational(std::uint64_t q) const;

  std::string to_string() const;

 private:
  ApproximatingFunction(Kind kind, Rational tau, std::vector<Magnitude> values)
      : kind_(kind), tau_(std::move(tau)), values_(std::move(values)) {}

  Kind kind_;
  Rational tau_;
  std::vector<Magnitude> values_;
};

enum class Coprimality { Pairwise, Joint };

std::string to_string(Coprimality mode);
Coprimality parse_coprimality(const std::string& text);

// A rational point p/q in [0,1]^k.
struct RationalPoint {
  std::vector<std::int64_t> p;
  std::int64_t q = 1;

  std::vector<Rational> coordinates() const;
  friend bool operator==(const RationalPoint&, const RationalPoint&) = default;
};

bool is_admissible(const RationalPoint& point, Coprimality mode);

// All admissible points with q <= max_q, ordered by q then p
// lexicographically.
std::vector<RationalPoint> enumerate_rationals(unsigned k, std::int64_t max_q, Coprimality mode);

// Number of admissible points with denominator exactly q.
std::uint64_t count_points_at(unsigned k, std::int64_t q, Coprimality mode);

// Number of (p, q), q <= max_q, with |y_i - p_i/q| < psi(q)/q for every i.
std::uint64_t count_solutions(std::span<const Rational> y, const ApproximatingFunction& psi,
                              Coprimality mode, std::int64_t max_q);

// theta(q) = q * f(psi(q)/q)^(1/k), for f = Power(s).
ApproximatingFunction theta_transform(const ApproximatingFunction& psi, const DimensionFunction& f,
                                      unsigned k);

struct FamilyMember {
  std::uint64_t index;
  RationalPoint point;
  Ball ball;
};

// The sequence of balls B(p/q, psi(q)/q), ordered by q then p. Index i
// counts every admissible point before this one, including those whose
// psi(q) is zero.
class BallFamily {
 public:
  BallFamily(ApproximatingFunction psi, unsigned k, Coprimality mode,
             std::optional<std::int64_t> q_cap = std::nullopt);

  const ApproximatingFunction& psi() const { return psi_; }
  unsigned dim() const { return k_; }
  Coprimality mode() const { return mode_; }
  std::optional<std::int64_t> q_cap() const { return q_cap_; }

  // Index of the first point with denominator q.
  std::uint64_t first_index(std::int64_t q) const;
  std::uint64_t index_of(const RationalPoint& point) const;
  // Smallest q whose points all have index >= i.
  std::int64_t first_q_at_or_after(std::uint64_t index) const;
  std::uint64_t count_up_to(std::int64_t max_q) const { return first_index(max_q + 1); }
  // Largest q whose points all have index <= budget (and within the cap).
  std::int64_t max_q_within(std::uint64_t index_budget) const;

  // Ball of a point, or nullopt when psi(q) = 0.
  std::optional<Ball> ball(const RationalPoint& point) const;
  Rational radius(std::int64_t q) const;
  // max over q' >= q (up to the cap) of psi(q')/q'.
  Rational envelope(std::int64_t q) const;

  // Members with q_lo <= q <= q_hi whose center lies in the box
  // [lo_i, hi_i]; ordered by index.
  std::vector<FamilyMember> members_with_centers_in(const std::vector<Rational>& lo,
                                                    const std::vector<Rational>& hi,
                                                    std::int64_t q_lo, std::int64_t q_hi) const;
  // Same points without their indices, ordered by q then p (index order).
  std::vector<RationalPoint> points_with_centers_in(const std::vector<Rational>& lo, const std::vector<Rational>& hi,
                                                    std::int64_t q_lo, std::int64_t q_hi) const;
  std::vector<FamilyMember> members_up_to(std::int64_t max_q) const;

 private:
  void check_q(std::int64_t q) const;

  ApproximatingFunction psi_;
  unsigned k_;
  Coprimality mode_;
  std::optional<std::int64_t> q_cap_;
  mutable std::optional<std::pair<std::uint64_t, std::int64_t>> budget_cache_;
};

}  // namespace mtp
