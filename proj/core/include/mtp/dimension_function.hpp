#pragma once

#include <string>

#include "mtp/exact.hpp"
#include "mtp/magnitude.hpp"

namespace mtp {

// Behaviour of r^-k f(r) as r -> 0, and of f / g in general.
enum class Limit { Zero, Finite, Infinite };

// f(r) = r^s, or f(r) = r^s * log(1/r)^a for r < 1.
class DimensionFunction {
 public:
  enum class Kind { Power, PowerLog };

  static DimensionFunction power(const Rational& s);
  static DimensionFunction power_log(const Rational& s, const Rational& a);

  Kind kind() const { return kind_; }
  bool is_power() const { return kind_ == Kind::Power; }
  const Rational& exponent() const { return s_; }
  const Rational& log_exponent() const { return a_; }

  // f(r) for rational r > 0 (r < 1 for PowerLog).
  Magnitude operator()(const Rational& r) const;
  // f applied to an already-symbolic radius (r^e etc.).
  Magnitude operator()(const Magnitude& r) const;

  // Largest radius below which f is non-decreasing; 1 for PowerLog with
  // a <= 0, infinite (nullopt) for Power.
  std::optional<Rational> monotone_below() const;

  // Limit of r^-k f(r) as r -> 0. Infinite is the case where the Cantor
  // construction is needed; Zero/Finite are the comparable-measure cases.
  Limit ratio_limit(unsigned k) const;

  // Whether r^-k f(r) is monotone near 0 (always true for these families)
  // and if so whether it is decreasing.
  bool ratio_decreasing(unsigned k) const;

  std::string to_string() const;

  friend bool operator==(const DimensionFunction& a, const DimensionFunction& b) {
    return a.kind_ == b.kind_ && a.s_ == b.s_ && a.a_ == b.a_;
  }

 private:
  DimensionFunction(Kind kind, Rational s, Rational a) : kind_(kind), s_(std::move(s)), a_(std::move(a)) {}

  Kind kind_;
  Rational s_;
  Rational a_;
};

// Limit of f(r)/g(r) as r -> 0. When it is Zero, H^f(F) = 0 whenever
// H^g(F) < infinity.
Limit ratio_limit(const DimensionFunction& f, const DimensionFunction& g);

}  // namespace mtp
