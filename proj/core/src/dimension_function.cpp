#include "mtp/dimension_function.hpp"

#include <mpfr.h>

#include "mtp/error.hpp"

namespace mtp {

DimensionFunction DimensionFunction::power(const Rational& s) {
  if (s <= 0) throw InvalidArgument("dimension function exponent must be positive, got " + mtp::to_string(s));
  return DimensionFunction(Kind::Power, s, Rational(0));
}

DimensionFunction DimensionFunction::power_log(const Rational& s, const Rational& a) {
  if (s <= 0) throw InvalidArgument("dimension function exponent must be positive, got " + mtp::to_string(s));
  if (a == 0) return power(s);
  return DimensionFunction(Kind::PowerLog, s, a);
}

Magnitude DimensionFunction::operator()(const Rational& r) const {
  if (r <= 0) throw InvalidArgument("radius must be positive");
  if (kind_ == Kind::Power) return Magnitude(1, r, s_);
  if (r >= 1) throw InvalidArgument("power-log dimension function needs r < 1");
  return Magnitude(1, r, s_, a_);
}

Magnitude DimensionFunction::operator()(const Magnitude& r) const {
  if (auto q = r.rational()) return (*this)(*q);
  if (kind_ != Kind::Power) throw ConfigurationError("power-log dimension function of a symbolic radius");
  return r.pow(s_);
}

std::optional<Rational> DimensionFunction::monotone_below() const {
  if (kind_ == Kind::Power) return std::nullopt;
  if (a_ < 0) return Rational(1);
  // f' >= 0 iff log(1/r) >= a/s iff r <= exp(-a/s); round down.
  mpfr_t x;
  mpfr_init2(x, 128);
  Rational t = -a_ / s_;
  mpfr_set_q(x, t.get_mpq_t(), MPFR_RNDD);
  mpfr_exp(x, x, MPFR_RNDD);
  Rational out;
  mpfr_get_q(out.get_mpq_t(), x);
  mpfr_clear(x);
  return out;
}

Limit DimensionFunction::ratio_limit(unsigned k) const {
  Rational kk(k);
  if (s_ < kk) return Limit::Infinite;
  if (s_ > kk) return Limit::Zero;
  if (a_ > 0) return Limit::Infinite;
  if (a_ == 0) return Limit::Finite;
  return Limit::Zero;
}

bool DimensionFunction::ratio_decreasing(unsigned k) const {
  return ratio_limit(k) == Limit::Infinite;
}

std::string DimensionFunction::to_string() const {
  if (kind_ == Kind::Power) return "r^(" + mtp::to_string(s_) + ")";
  return "r^(" + mtp::to_string(s_) + ")*log(1/r)^(" + mtp::to_string(a_) + ")";
}

Limit ratio_limit(const DimensionFunction& f, const DimensionFunction& g) {
  // f/g = r^(sf - sg) log(1/r)^(af - ag)
  if (f.exponent() > g.exponent()) return Limit::Zero;
  if (f.exponent() < g.exponent()) return Limit::Infinite;
  Rational da = f.log_exponent() - g.log_exponent();
  if (da < 0) return Limit::Zero;
  if (da > 0) return Limit::Infinite;
  return Limit::Finite;
}

}  // namespace mtp
