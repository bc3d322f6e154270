#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mtp/exact.hpp"

namespace mtp {

std::uint64_t gcd(std::uint64_t a, std::uint64_t b);

// Euler's totient by trial-division factorization. Throws on n = 0.
std::uint64_t euler_phi(std::uint64_t n);

// phi[0..n] with phi[0] = 0.
std::vector<std::uint64_t> phi_sieve(std::uint64_t n);

// Sum of phi(q) for 1 <= q <= n, in sublinear time with a shared cache.
std::uint64_t totient_sum(std::uint64_t n);

std::vector<std::uint64_t> prime_factors(std::uint64_t n);

// #{1 <= p' < p : gcd(p', q) = 1}.
std::uint64_t coprime_rank(std::uint64_t p, std::uint64_t q);

struct Fraction {
  std::int64_t p;
  std::int64_t q;
};

// Visits every reduced p/q in [lo, hi] with 1 <= q <= max_q, in increasing
// order of value, by walking the Farey sequence of order max_q from the
// first term >= lo. The visitor returns false to stop early. Cost is the
// number of Farey terms in the interval plus O(log max_q).
void for_each_farey_in(const Rational& lo, const Rational& hi, std::int64_t max_q,
                       const std::function<bool(const Fraction&)>& visit);

}  // namespace mtp
