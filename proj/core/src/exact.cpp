#include "mtp/exact.hpp"

#include <cctype>
#include <cmath>

#include "mtp/error.hpp"

namespace mtp {

Rational make_rational(long num, long den) {
  if (den == 0) throw InvalidArgument("zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw InvalidArgument("zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& value) {
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

namespace {

Integer parse_integer(std::string_view text, std::string_view whole) {
  if (text.empty()) throw InvalidArgument("malformed number '" + std::string(whole) + "'");
  std::size_t i = (text[0] == '+' || text[0] == '-') ? 1 : 0;
  if (i == text.size()) throw InvalidArgument("malformed number '" + std::string(whole) + "'");
  for (std::size_t j = i; j < text.size(); ++j) {
    if (!std::isdigit(static_cast<unsigned char>(text[j]))) {
      throw InvalidArgument("malformed number '" + std::string(whole) + "'");
    }
  }
  std::string s(text[0] == '+' ? text.substr(1) : text);
  return Integer(s, 10);
}

Rational parse_decimal(std::string_view text) {
  std::string_view mantissa = text;
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    exponent = parse_integer(text.substr(e + 1), text).get_si();
  }
  bool negative = false;
  if (!mantissa.empty() && (mantissa[0] == '-' || mantissa[0] == '+')) {
    negative = mantissa[0] == '-';
    mantissa.remove_prefix(1);
  }
  std::string digits;
  long scale = 0;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    digits = std::string(mantissa.substr(0, dot)) + std::string(mantissa.substr(dot + 1));
    scale = static_cast<long>(mantissa.size() - dot - 1);
  } else {
    digits = std::string(mantissa);
  }
  if (digits.empty()) throw InvalidArgument("malformed number '" + std::string(text) + "'");
  Rational value(parse_integer(digits, text));
  value *= pow(Rational(10), exponent - scale);
  if (negative) value = -value;
  return value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer num = parse_integer(text.substr(0, slash), text);
    Integer den = parse_integer(text.substr(slash + 1), text);
    return make_rational(num, den);
  }
  if (text.find_first_of(".eE") != std::string_view::npos) return parse_decimal(text);
  return Rational(parse_integer(text, text));
}

Integer floor(const Rational& x) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}

Integer ceil(const Rational& x) {
  Integer q;
  mpz_cdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}

Integer pow(const Integer& x, unsigned long n) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), x.get_mpz_t(), n);
  return r;
}

Rational pow(const Rational& x, long n) {
  if (n == 0) return Rational(1);
  if (x == 0) {
    if (n < 0) throw InvalidArgument("zero to a negative power");
    return Rational(0);
  }
  unsigned long m = n < 0 ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
  Rational r(pow(Integer(x.get_num()), m), pow(Integer(x.get_den()), m));
  if (n < 0) r = 1 / r;
  r.canonicalize();
  return r;
}

std::optional<Integer> exact_root(const Integer& x, unsigned long n) {
  if (x < 0) return std::nullopt;
  Integer r;
  if (mpz_root(r.get_mpz_t(), x.get_mpz_t(), n) != 0) return r;
  return std::nullopt;
}

std::optional<Rational> exact_root(const Rational& x, unsigned long n) {
  auto num = exact_root(Integer(x.get_num()), n);
  if (!num) return std::nullopt;
  auto den = exact_root(Integer(x.get_den()), n);
  if (!den) return std::nullopt;
  return make_rational(*num, *den);
}

Rational abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }
const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }

namespace {

void sum_range(std::span<const Rational> terms, Integer& num, Integer& den) {
  if (terms.size() == 1) {
    num = terms[0].get_num();
    den = terms[0].get_den();
    return;
  }
  std::size_t half = terms.size() / 2;
  Integer n1, d1, n2, d2;
  sum_range(terms.first(half), n1, d1);
  sum_range(terms.subspan(half), n2, d2);
  if (d1 == d2) {
    num = n1 + n2;
    den = d1;
  } else {
    num = n1 * d2 + n2 * d1;
    den = d1 * d2;
  }
}

}  // namespace

Rational sum(std::span<const Rational> terms) {
  if (terms.empty()) return Rational(0);
  Integer num, den;
  sum_range(terms, num, den);
  return make_rational(num, den);
}

Rational pow2(long e) {
  Integer p(1);
  if (e >= 0) {
    mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
    return Rational(p);
  }
  mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(-e));
  return make_rational(Integer(1), p);
}

double to_double(const Rational& x) { return x.get_d(); }

double log2_approx(const Rational& x) {
  if (x <= 0) throw InvalidArgument("log of non-positive value");
  long en = 0;
  long ed = 0;
  double mn = mpz_get_d_2exp(&en, x.get_num_mpz_t());
  double md = mpz_get_d_2exp(&ed, x.get_den_mpz_t());
  return std::log2(mn) - std::log2(md) + static_cast<double>(en - ed);
}

Rational round_down_dyadic(const Rational& x, unsigned bits) {
  Integer scaled = floor(x * pow2(bits));
  return Rational(scaled) * pow2(-static_cast<long>(bits));
}

Rational round_up_dyadic(const Rational& x, unsigned bits) {
  Integer scaled = ceil(x * pow2(bits));
  return Rational(scaled) * pow2(-static_cast<long>(bits));
}

Enclosure mul_nonneg(const Enclosure& a, const Enclosure& b) { return {a.lo * b.lo, a.hi * b.hi}; }

Enclosure div_nonneg(const Enclosure& a, const Enclosure& b) {
  if (b.lo <= 0) throw InvalidArgument("division by an enclosure touching zero");
  return {a.lo / b.hi, a.hi / b.lo};
}

Enclosure scale_nonneg(const Enclosure& a, const Rational& c) { return {a.lo * c, a.hi * c}; }

}  // namespace mtp
