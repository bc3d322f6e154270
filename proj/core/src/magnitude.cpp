#include "mtp/magnitude.hpp"

#include <mpfr.h>

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <vector>

#include "mtp/error.hpp"

namespace mtp {

namespace {

constexpr unsigned kMinBits = 64;
constexpr unsigned kMaxBits = 16384;
// Largest integer exponent we are willing to expand exactly when clearing
// denominators; beyond this comparisons go through enclosures.
constexpr long kMaxCrossPower = 1L << 16;

bool fits_long(const Integer& z) { return mpz_fits_slong_p(z.get_mpz_t()) != 0; }

// Enclosure of base^(num/den) for den >= 1, base > 0, with about `bits`
// significant bits.
Enclosure enclose_power(const Rational& base, long num, unsigned long den, unsigned bits) {
  Rational y = pow(base, num);
  if (den == 1) return Enclosure::exact(y);
  if (auto root = exact_root(y, den)) return Enclosure::exact(*root);
  double log2_root = log2_approx(y) / static_cast<double>(den);
  long shift = static_cast<long>(bits) - static_cast<long>(std::floor(log2_root)) + 2;
  Rational scaled = y * pow2(shift * static_cast<long>(den));
  Integer whole = floor(scaled);
  Integer r;
  mpz_root(r.get_mpz_t(), whole.get_mpz_t(), den);
  Rational unit = pow2(-shift);
  return {Rational(r) * unit, Rational(r + 1) * unit};
}

struct MpfrValue {
  mpfr_t v;
  explicit MpfrValue(mpfr_prec_t prec) { mpfr_init2(v, prec); }
  ~MpfrValue() { mpfr_clear(v); }
  MpfrValue(const MpfrValue&) = delete;
  MpfrValue& operator=(const MpfrValue&) = delete;

  Rational to_rational() const {
    Rational q;
    mpfr_get_q(q.get_mpq_t(), v);
    return q;
  }
};

// x^(num/den) for x > 0 in MPFR with the given rounding direction, where the
// result is monotone so directed rounding of each step is sound.
void mpfr_rational_power(MpfrValue& out, const MpfrValue& x, long num, unsigned long den,
                         bool round_up) {
  mpfr_rnd_t dir = round_up ? MPFR_RNDU : MPFR_RNDD;
  mpfr_rnd_t inv = round_up ? MPFR_RNDD : MPFR_RNDU;
  unsigned long n = static_cast<unsigned long>(std::labs(num));
  if (num >= 0) {
    mpfr_pow_ui(out.v, x.v, n, dir);
    mpfr_rootn_ui(out.v, out.v, den, dir);
  } else {
    // x^(-n/d) = 1 / x^(n/d); bound the denominator the other way.
    mpfr_pow_ui(out.v, x.v, n, inv);
    mpfr_rootn_ui(out.v, out.v, den, inv);
    mpfr_ui_div(out.v, 1, out.v, dir);
  }
}

// Enclosure of log(1/base)^a for 0 < base < 1.
Enclosure enclose_log_power(const Rational& base, const Rational& a, unsigned bits) {
  auto prec = static_cast<mpfr_prec_t>(bits + 64);
  MpfrValue b_lo(prec), b_hi(prec), l_lo(prec), l_hi(prec);
  mpfr_set_q(b_hi.v, base.get_mpq_t(), MPFR_RNDU);
  mpfr_set_q(b_lo.v, base.get_mpq_t(), MPFR_RNDD);
  // log(1/b) = -log(b); an upper bound of log(b) gives a lower bound here.
  mpfr_log(l_lo.v, b_hi.v, MPFR_RNDU);
  mpfr_neg(l_lo.v, l_lo.v, MPFR_RNDN);
  mpfr_log(l_hi.v, b_lo.v, MPFR_RNDD);
  mpfr_neg(l_hi.v, l_hi.v, MPFR_RNDN);
  if (mpfr_sgn(l_lo.v) <= 0) {
    throw UndecidedComparison("log(1/base) not separated from zero at " + std::to_string(bits) +
                              " bits");
  }
  long num = a.get_num().get_si();
  unsigned long den = a.get_den().get_ui();
  MpfrValue lo(prec), hi(prec);
  if (a > 0) {
    mpfr_rational_power(lo, l_lo, num, den, false);
    mpfr_rational_power(hi, l_hi, num, den, true);
  } else {
    mpfr_rational_power(lo, l_hi, num, den, false);
    mpfr_rational_power(hi, l_lo, num, den, true);
  }
  return {lo.to_rational(), hi.to_rational()};
}

// Compares c1*b1^e1 with c2*b2^e2 exactly, or returns nullopt when the
// cleared exponents are too large to expand.
std::optional<int> compare_pure(const Magnitude& a, const Magnitude& b) {
  if (a.is_zero() || b.is_zero()) {
    return a.is_zero() ? (b.is_zero() ? 0 : -1) : 1;
  }
  Integer d1 = a.exponent().get_den();
  Integer d2 = b.exponent().get_den();
  Integer l;
  mpz_lcm(l.get_mpz_t(), d1.get_mpz_t(), d2.get_mpz_t());
  if (!fits_long(l) || l > kMaxCrossPower) return std::nullopt;
  Integer n1 = a.exponent().get_num() * (l / d1);
  Integer n2 = b.exponent().get_num() * (l / d2);
  if (!fits_long(n1) || !fits_long(n2) || abs(n1) > kMaxCrossPower || abs(n2) > kMaxCrossPower) {
    return std::nullopt;
  }
  long lp = l.get_si();
  Rational lhs = pow(a.coeff(), lp) * pow(a.base(), n1.get_si());
  Rational rhs = pow(b.coeff(), lp) * pow(b.base(), n2.get_si());
  return cmp(lhs, rhs) < 0 ? -1 : (lhs == rhs ? 0 : 1);
}

}  // namespace

Magnitude::Magnitude(const Rational& value)
    : coeff_(value), base_(1), exponent_(0), log_exponent_(0) {
  if (value < 0) throw InvalidArgument("negative magnitude " + mtp::to_string(value));
}

Magnitude::Magnitude(const Rational& coeff, const Rational& base, const Rational& exponent,
                     const Rational& log_exponent)
    : coeff_(coeff), base_(base), exponent_(exponent), log_exponent_(log_exponent) {
  if (coeff_ < 0) throw InvalidArgument("negative coefficient");
  if (base_ <= 0) throw InvalidArgument("non-positive base " + mtp::to_string(base_));
  if (log_exponent_ != 0 && base_ >= 1) {
    throw InvalidArgument("log(1/base) factor requires base < 1");
  }
  normalize();
}

void Magnitude::normalize() {
  coeff_.canonicalize();
  base_.canonicalize();
  exponent_.canonicalize();
  log_exponent_.canonicalize();
  if (coeff_ == 0) {
    base_ = 1;
    exponent_ = 0;
    log_exponent_ = 0;
    return;
  }
  if (log_exponent_ != 0) {
    fold_coeff_into_base();
    return;
  }
  if (exponent_ == 0 || base_ == 1) {
    base_ = 1;
    exponent_ = 0;
    return;
  }
  Integer den = exponent_.get_den();
  if (!fits_long(den)) return;
  if (auto root = exact_root(base_, den.get_ui())) {
    Integer num = exponent_.get_num();
    if (fits_long(num) && abs(num) <= kMaxCrossPower) {
      coeff_ *= mtp::pow(*root, num.get_si());
      coeff_.canonicalize();
      base_ = 1;
      exponent_ = 0;
      return;
    }
  }
  fold_coeff_into_base();
}

// coeff = base^m for an integer m moves into the exponent, so that e.g.
// (1/q) * q^(-2) becomes q^(-3) and can be raised to rational powers.
void Magnitude::fold_coeff_into_base() {
  if (coeff_ == 1 || base_ == 1) return;
  double lb = log2_approx(base_);
  if (std::abs(lb) < 1e-9) return;
  double m = std::round(log2_approx(coeff_) / lb);
  if (std::abs(m) > static_cast<double>(kMaxCrossPower)) return;
  auto mi = static_cast<long>(m);
  if (mi == 0 || mtp::pow(base_, mi) != coeff_) return;
  coeff_ = 1;
  exponent_ += mi;
  exponent_.canonicalize();
}

std::optional<Rational> Magnitude::rational() const {
  if (is_rational()) return coeff_;
  return std::nullopt;
}

Magnitude Magnitude::times(const Rational& c) const {
  if (c < 0) throw InvalidArgument("negative scale factor");
  Magnitude m = *this;
  m.coeff_ *= c;
  m.normalize();
  return m;
}

Magnitude Magnitude::pow(const Rational& t) const {
  if (is_zero()) {
    if (t <= 0) throw InvalidArgument("zero to a non-positive power");
    return Magnitude();
  }
  if (is_rational()) return Magnitude(1, coeff_, t);
  Integer den = t.get_den();
  Integer num = t.get_num();
  if (!fits_long(den) || !fits_long(num)) throw ConfigurationError("exponent too large");
  auto root = exact_root(coeff_, den.get_ui());
  if (!root) {
    throw ConfigurationError("coefficient " + mtp::to_string(coeff_) + " to the power " +
                             mtp::to_string(t) + " is not representable");
  }
  return Magnitude(mtp::pow(*root, num.get_si()), base_, exponent_ * t, log_exponent_ * t);
}

Enclosure Magnitude::enclose(unsigned bits) const {
  if (is_rational()) return Enclosure::exact(coeff_);
  Integer num = exponent_.get_num();
  Integer den = exponent_.get_den();
  if (!fits_long(num) || !fits_long(den)) throw ConfigurationError("exponent too large");
  Enclosure power = enclose_power(base_, num.get_si(), den.get_ui(), bits);
  Enclosure value = scale_nonneg(power, coeff_);
  if (log_exponent_ != 0) value = mul_nonneg(value, enclose_log_power(base_, log_exponent_, bits));
  return value;
}

std::string Magnitude::to_string() const {
  if (is_rational()) return mtp::to_string(coeff_);
  std::ostringstream out;
  out << mtp::to_string(coeff_) << "*(" << mtp::to_string(base_) << ")^(" << mtp::to_string(exponent_)
      << ")";
  if (log_exponent_ != 0) {
    out << "*log(" << mtp::to_string(1 / base_) << ")^(" << mtp::to_string(log_exponent_) << ")";
  }
  return out.str();
}

int compare(const Magnitude& a, const Magnitude& b) {
  if (!a.has_log() && !b.has_log()) {
    if (auto c = compare_pure(a, b)) return *c;
  }
  if (structurally_equal(a, b)) return 0;
  for (unsigned bits = kMinBits; bits <= kMaxBits; bits *= 2) {
    Enclosure ea = a.enclose(bits);
    Enclosure eb = b.enclose(bits);
    if (ea.hi < eb.lo) return -1;
    if (eb.hi < ea.lo) return 1;
    if (ea.is_exact() && eb.is_exact()) return ea.lo == eb.lo ? 0 : (ea.lo < eb.lo ? -1 : 1);
  }
  throw UndecidedComparison(a.to_string() + " vs " + b.to_string());
}

Enclosure sum_enclosure(std::span<const Magnitude> terms, unsigned bits) {
  Enclosure total = Enclosure::exact(0);
  for (const auto& t : terms) total += t.enclose(bits);
  return total;
}

namespace {

int compare_sum(std::span<const Magnitude> terms, const Magnitude& target) {
  for (unsigned bits = kMinBits; bits <= kMaxBits; bits *= 2) {
    Enclosure s = sum_enclosure(terms, bits);
    Enclosure t = target.enclose(bits);
    if (s.hi < t.lo) return -1;
    if (t.hi < s.lo) return 1;
    if (s.is_exact() && t.is_exact()) return s.lo == t.lo ? 0 : (s.lo < t.lo ? -1 : 1);
  }
  throw UndecidedComparison("finite sum vs " + target.to_string());
}

}  // namespace

bool sum_at_least(std::span<const Magnitude> terms, const Magnitude& target) {
  return compare_sum(terms, target) >= 0;
}

bool sum_at_most(std::span<const Magnitude> terms, const Magnitude& target) {
  return compare_sum(terms, target) <= 0;
}

}  // namespace mtp
