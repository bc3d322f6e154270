#pragma once

#include <optional>
#include <span>
#include <string>

#include "mtp/exact.hpp"

namespace mtp {

// An exact non-negative real of the form
//
//     coeff * base^exponent * log(1/base)^log_exponent
//
// with rational coeff >= 0, base > 0, exponent and log_exponent. This is the
// value space of f-volumes and transformed radii for power and power-log
// dimension functions evaluated at rational radii. Pure power terms are
// ordered exactly by clearing denominators of the exponents; terms with a
// logarithm are ordered through rigorous rational enclosures.
class Magnitude {
 public:
  Magnitude() : coeff_(0), base_(1), exponent_(0), log_exponent_(0) {}
  Magnitude(const Rational& value);  // NOLINT: rationals are magnitudes
  Magnitude(const Rational& coeff, const Rational& base, const Rational& exponent,
            const Rational& log_exponent = Rational(0));

  const Rational& coeff() const { return coeff_; }
  const Rational& base() const { return base_; }
  const Rational& exponent() const { return exponent_; }
  const Rational& log_exponent() const { return log_exponent_; }

  bool is_zero() const { return coeff_ == 0; }
  bool is_rational() const { return exponent_ == 0 && log_exponent_ == 0; }
  bool has_log() const { return log_exponent_ != 0; }
  std::optional<Rational> rational() const;

  Magnitude times(const Rational& c) const;
  // this^t. Throws ConfigurationError when coeff^t is irrational and the
  // power part is not trivial (the result would need two bases).
  Magnitude pow(const Rational& t) const;

  // Rigorous enclosure with roughly `bits` significant bits.
  Enclosure enclose(unsigned bits = 128) const;

  std::string to_string() const;

  friend bool structurally_equal(const Magnitude& a, const Magnitude& b) {
    return a.coeff_ == b.coeff_ && a.base_ == b.base_ && a.exponent_ == b.exponent_ &&
           a.log_exponent_ == b.log_exponent_;
  }

 private:
  void normalize();
  void fold_coeff_into_base();

  Rational coeff_;
  Rational base_;
  Rational exponent_;
  Rational log_exponent_;
};

// Three-way exact comparison. Throws UndecidedComparison if two distinct
// logarithmic terms cannot be separated at the precision cap.
int compare(const Magnitude& a, const Magnitude& b);

inline bool operator<(const Magnitude& a, const Magnitude& b) { return compare(a, b) < 0; }
inline bool operator<=(const Magnitude& a, const Magnitude& b) { return compare(a, b) <= 0; }
inline bool operator>(const Magnitude& a, const Magnitude& b) { return compare(a, b) > 0; }
inline bool operator>=(const Magnitude& a, const Magnitude& b) { return compare(a, b) >= 0; }
inline bool operator==(const Magnitude& a, const Magnitude& b) { return compare(a, b) == 0; }

// Enclosure of a finite sum; exact when every term is rational.
Enclosure sum_enclosure(std::span<const Magnitude> terms, unsigned bits = 128);

// Decides `sum >= target` for a finite sum of magnitudes, refining the
// enclosure until decided. Throws UndecidedComparison at the precision cap.
bool sum_at_least(std::span<const Magnitude> terms, const Magnitude& target);
bool sum_at_most(std::span<const Magnitude> terms, const Magnitude& target);

}  // namespace mtp
