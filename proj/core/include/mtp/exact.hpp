#pragma once

// Exact arithmetic helpers on top of GMP.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace mtp {

using Integer = mpz_class;
using Rational = mpq_class;

Rational make_rational(long num, long den = 1);
Rational make_rational(const Integer& num, const Integer& den);

// Canonical lowest-terms "p/q" (always with a denominator, "3/1").
std::string to_string(const Rational& value);

// Accepts "p/q", "p", or a finite decimal such as "0.25" or "-1.5e-3".
Rational parse_rational(std::string_view text);

Integer floor(const Rational& x);
Integer ceil(const Rational& x);

// x^n for any integer n (x != 0 when n < 0).
Rational pow(const Rational& x, long n);
Integer pow(const Integer& x, unsigned long n);

// Exact n-th root of a non-negative integer if it exists.
std::optional<Integer> exact_root(const Integer& x, unsigned long n);
// Exact n-th root of a non-negative rational if it exists.
std::optional<Rational> exact_root(const Rational& x, unsigned long n);

Rational abs(const Rational& x);
const Rational& min(const Rational& a, const Rational& b);
const Rational& max(const Rational& a, const Rational& b);

// Exact sum by balanced pairwise combination without intermediate
// reduction; much faster than a running sum when denominators vary.
Rational sum(std::span<const Rational> terms);

// 2^e for any integer e.
Rational pow2(long e);

double to_double(const Rational& x);
// Base-2 logarithm estimate good to ~1e-12 relative, valid for huge or tiny x > 0.
double log2_approx(const Rational& x);

// Lower / upper dyadic approximations with `bits` fractional bits.
Rational round_down_dyadic(const Rational& x, unsigned bits);
Rational round_up_dyadic(const Rational& x, unsigned bits);

// A closed interval [lo, hi] known to contain some real quantity.
struct Enclosure {
  Rational lo;
  Rational hi;

  static Enclosure exact(const Rational& value) { return {value, value}; }
  bool is_exact() const { return lo == hi; }
  bool contains(const Rational& v) const { return lo <= v && v <= hi; }
  Rational width() const { return hi - lo; }
  friend bool operator==(const Enclosure& a, const Enclosure& b) { return a.lo == b.lo && a.hi == b.hi; }

  Enclosure& operator+=(const Enclosure& o) {
    lo += o.lo;
    hi += o.hi;
    return *this;
  }
};

inline Enclosure operator+(Enclosure a, const Enclosure& b) { return a += b; }

// Products and quotients of enclosures of non-negative quantities.
Enclosure mul_nonneg(const Enclosure& a, const Enclosure& b);
Enclosure div_nonneg(const Enclosure& a, const Enclosure& b);
Enclosure scale_nonneg(const Enclosure& a, const Rational& c);

}  // namespace mtp
