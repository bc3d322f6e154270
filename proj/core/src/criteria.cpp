#include "mtp/criteria.hpp"

#include <algorithm>
#include <cmath>

#include "mtp/error.hpp"
#include "mtp/number_theory.hpp"

namespace mtp {

namespace {

void check_common(unsigned k, std::uint64_t n_max, const ApproximatingFunction& psi) {
  if (k == 0) throw InvalidArgument("dimension k must be >= 1");
  if (n_max == 0) throw InvalidArgument("N must be >= 1");
  if (auto d = psi.domain_max(); d && n_max > *d) {
    throw InvalidArgument("N = " + std::to_string(n_max) + " beyond psi table of size " + std::to_string(*d));
  }
}

Rational rational_value(const ApproximatingFunction& psi, std::uint64_t n) {
  Magnitude v = psi(n);
  if (auto r = v.rational()) return *r;
  throw ConfigurationError("psi(" + std::to_string(n) + ") = " + v.to_string() +
                           " is irrational; this sum is exact-only");
}

// sum_{n<=N} f(psi(n)/n) w(n)^k
template <typename Weight>
Enclosure weighted_f_sum(const ApproximatingFunction& psi, const DimensionFunction& f, unsigned k,
                         std::uint64_t n_max, unsigned bits, Weight&& weight) {
  std::vector<Rational> lo, hi;
  lo.reserve(n_max);
  hi.reserve(n_max);
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    Magnitude x = psi(n).times(Rational(1, n));
    if (x.is_zero()) continue;
    Rational w = pow(Rational(weight(n)), static_cast<long>(k));
    Enclosure term = scale_nonneg(f(x).enclose(bits), w);
    lo.push_back(std::move(term.lo));
    hi.push_back(std::move(term.hi));
  }
  return {sum(lo), sum(hi)};
}

}  // namespace

Rational sum_conjecture1(const ApproximatingFunction& psi, unsigned k, std::uint64_t n_max) {
  check_common(k, n_max, psi);
  auto phi = phi_sieve(n_max);
  std::vector<Rational> terms;
  terms.reserve(n_max);
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    Rational v = rational_value(psi, n);
    if (v == 0) continue;
    terms.push_back(pow(v * Rational(phi[n]) / Rational(n), static_cast<long>(k)));
  }
  return sum(terms);
}

Enclosure sum_conjecture2(const ApproximatingFunction& psi, const DimensionFunction& f, unsigned k,
                          std::uint64_t n_max, unsigned bits) {
  check_common(k, n_max, psi);
  auto phi = phi_sieve(n_max);
  return weighted_f_sum(psi, f, k, n_max, bits, [&](std::uint64_t n) { return phi[n]; });
}

Rational sum_gallagher(const ApproximatingFunction& psi, unsigned k, std::uint64_t n_max) {
  check_common(k, n_max, psi);
  std::vector<Rational> terms;
  terms.reserve(n_max);
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    Rational v = rational_value(psi, n);
    if (v != 0) terms.push_back(pow(v, static_cast<long>(k)));
  }
  return sum(terms);
}

Enclosure sum_theorem3(const ApproximatingFunction& psi, const DimensionFunction& f, unsigned k,
                       std::uint64_t n_max, unsigned bits) {
  check_common(k, n_max, psi);
  return weighted_f_sum(psi, f, k, n_max, bits, [](std::uint64_t n) { return n; });
}

namespace {

struct Fit {
  double slope;
  double rms;
};

Fit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  double slope = sxy / sxx;
  double intercept = my - slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (intercept + slope * x[i]);
    ss += r * r;
  }
  return {slope, std::sqrt(ss / n)};
}

}  // namespace

GrowthReport growth_report(std::span<const GrowthPoint> points) {
  GrowthReport report;
  report.table.assign(points.begin(), points.end());
  std::vector<double> loglog, logn, logs;
  for (const auto& p : points) {
    if (p.n < 4 || !(p.sum > 0)) continue;
    double ln = std::log(static_cast<double>(p.n));
    loglog.push_back(std::log(ln));
    logn.push_back(ln);
    logs.push_back(std::log(p.sum));
  }
  if (loglog.size() < 3) {
    throw InvalidArgument("growth fit needs at least three nonzero partial sums with N >= 4");
  }
  report.fitted_points = loglog.size();
  Fit a = least_squares(loglog, logs);
  Fit b = least_squares(logn, logs);
  report.slope_vs_loglog = a.slope;
  report.residual_loglog = a.rms;
  report.slope_vs_log = b.slope;
  report.residual_log = b.rms;
  return report;
}

std::vector<GrowthPoint> partial_sums_at_powers_of_two(std::span<const Rational> terms) {
  std::vector<GrowthPoint> out;
  Rational running(0);
  std::size_t start = 0;
  for (std::uint64_t n = 1; n <= terms.size(); n *= 2) {
    running += sum(terms.subspan(start, n - start));
    start = n;
    out.push_back({n, to_double(running)});
  }
  return out;
}

std::vector<CriteriaRow> criteria_table(const ApproximatingFunction& psi, const DimensionFunction& f,
                                        unsigned k, std::span<const std::uint64_t> checkpoints) {
  std::vector<CriteriaRow> rows;
  for (std::uint64_t n : checkpoints) {
    rows.push_back({n, sum_conjecture1(psi, k, n), sum_conjecture2(psi, f, k, n), sum_gallagher(psi, k, n),
                    sum_theorem3(psi, f, k, n)});
  }
  return rows;
}

void write_criteria_csv(std::ostream& out, std::span<const CriteriaRow> rows, const GrowthReport* growth) {
  out << "N,sum_conjecture1,sum_conjecture2_lo,sum_conjecture2_hi,sum_gallagher,sum_theorem3_lo,"
         "sum_theorem3_hi";
  if (growth) out << ",slope_vs_loglog,slope_vs_log";
  out << "\n";
  for (const auto& r : rows) {
    out << r.n << "," << to_string(r.conjecture1) << "," << to_string(r.conjecture2.lo) << ","
        << to_string(r.conjecture2.hi) << "," << to_string(r.gallagher) << "," << to_string(r.theorem3.lo) << ","
        << to_string(r.theorem3.hi);
    if (growth) out << "," << growth->slope_vs_loglog << "," << growth->slope_vs_log;
    out << "\n";
  }
}

}  // namespace mtp
