#pragma once

// Partial sums of the divergence criteria. Only finite partial sums and
// fitted growth rates are reported; nothing here decides divergence.

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "mtp/diophantine.hpp"
#include "mtp/dimension_function.hpp"
#include "mtp/exact.hpp"

namespace mtp {

// sum_{n<=N} (phi(n) psi(n) / n)^k; psi must be rational-valued on 1..N.
Rational sum_conjecture1(const ApproximatingFunction& psi, unsigned k, std::uint64_t n_max);

// sum_{n<=N} f(psi(n)/n) phi(n)^k. Exact when every term is rational,
// otherwise a rigorous enclosure whose lower end is a certified lower bound.
Enclosure sum_conjecture2(const ApproximatingFunction& psi, const DimensionFunction& f, unsigned k,
                          std::uint64_t n_max, unsigned bits = 128);

// sum_{n<=N} psi(n)^k.
Rational sum_gallagher(const ApproximatingFunction& psi, unsigned k, std::uint64_t n_max);

// sum_{n<=N} f(psi(n)/n) n^k.
Enclosure sum_theorem3(const ApproximatingFunction& psi, const DimensionFunction& f, unsigned k,
                       std::uint64_t n_max, unsigned bits = 128);

struct GrowthPoint {
  std::uint64_t n;
  double sum;
};

struct GrowthReport {
  std::vector<GrowthPoint> table;
  std::size_t fitted_points = 0;
  double slope_vs_loglog = 0;  // d log S / d log log N
  double slope_vs_log = 0;     // d log S / d log N
  double residual_loglog = 0;  // RMS residual of each fit
  double residual_log = 0;
};

// Least-squares log-growth fits over the points with N >= 4 and S(N) > 0.
// Throws InvalidArgument when fewer than three such points remain.
GrowthReport growth_report(std::span<const GrowthPoint> points);

// Partial sums at N = 2^j, j = 0..J, from one pass over the terms.
std::vector<GrowthPoint> partial_sums_at_powers_of_two(std::span<const Rational> terms);

struct CriteriaRow {
  std::uint64_t n;
  Rational conjecture1;
  Enclosure conjecture2;
  Rational gallagher;
  Enclosure theorem3;
};

std::vector<CriteriaRow> criteria_table(const ApproximatingFunction& psi, const DimensionFunction& f,
                                        unsigned k, std::span<const std::uint64_t> checkpoints);

// CSV with one row per checkpoint; the fitted slopes of the conjecture-1
// sums are appended as trailing columns on every row.
void write_criteria_csv(std::ostream& out, std::span<const CriteriaRow> rows, const GrowthReport* growth);

}  // namespace mtp
