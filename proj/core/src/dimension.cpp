#include "mtp/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "mtp/error.hpp"
#include "mtp/number_theory.hpp"

namespace mtp {

Enclosure premeasure_upper(std::span<const Ball> cover, const DimensionFunction& f, const Rational& rho) {
  std::vector<Magnitude> terms;
  terms.reserve(cover.size());
  for (const auto& b : cover) {
    if (b.radius() > rho) {
      throw InvalidArgument("cover radius " + to_string(b.radius()) + " exceeds rho = " + to_string(rho));
    }
    terms.push_back(f_volume(b, f));
  }
  return sum_enclosure(terms);
}

Enclosure premeasure_upper(const BallFamily& family, const DimensionFunction& f, const Rational& rho,
                           std::uint64_t tail_g, std::int64_t max_q) {
  if (max_q < 1) throw InvalidArgument("max_q must be >= 1");
  std::int64_t q = std::max<std::int64_t>(1, family.first_q_at_or_after(tail_g) - 1);
  std::uint64_t index = family.first_index(q);
  std::vector<Magnitude> terms;
  for (; q <= max_q; ++q) {
    std::uint64_t n = count_points_at(family.dim(), q, family.mode());
    std::uint64_t from = std::max(index, tail_g);
    index += n;
    if (index <= from) continue;
    Rational r = family.radius(q);
    if (r == 0) continue;
    if (r > rho) {
      throw InvalidArgument("radius at q = " + std::to_string(q) + " exceeds rho = " + to_string(rho));
    }
    terms.push_back(f(r).times(Rational(static_cast<unsigned long>(index - from))));
  }
  return sum_enclosure(terms);
}

MdpBound mdp_lower_bound(const Certificate& certificate) {
  if (certificate.status != "constructed") {
    throw PreconditionViolated("certificate has no tree: " + certificate.status);
  }
  if (!certificate.exact_checks_pass()) throw PreconditionViolated("certificate failed its exact checks");
  if (!certificate.ball_bound) throw PreconditionViolated("certificate has no sampled ball bound");
  const auto& bb = *certificate.ball_bound;
  if (bb.c_emp <= 0) throw PreconditionViolated("sampled ball bound has no positive constant");
  MdpBound out;
  out.eta = certificate.params.eta;
  out.c_emp = bb.c_emp;
  out.bound = out.eta / out.c_emp;
  out.constants = certificate.mode == Mode::Demo ? "demo constants" : "faithful constants";
  out.caveat = bb.label;
  return out;
}

namespace {

// Number of dyadic boxes [j h, (j+1) h) of [0,1] hit by the closed
// intervals of the shell lo < q <= hi; h = 2^-n.
std::uint64_t count_boxes(const BallFamily& family, std::int64_t lo, std::int64_t hi, unsigned n) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges;
  const std::uint64_t last = (std::uint64_t{1} << n) - 1;
  Integer num, den, j;
  auto box_of = [&](const Integer& numerator) -> std::uint64_t {
    if (numerator <= 0) return 0;
    mpz_fdiv_q(j.get_mpz_t(), numerator.get_mpz_t(), den.get_mpz_t());
    if (j > Integer(static_cast<unsigned long>(last))) return last;
    return j.get_ui();
  };
  for (std::int64_t q = lo + 1; q <= hi; ++q) {
    Rational r = family.radius(q);
    if (r == 0) continue;
    const Integer& a = r.get_num();
    const Integer& b = r.get_den();
    // x 2^n with x = p/q -+ a/b has denominator q b.
    den = b * static_cast<unsigned long>(q);
    Integer shift = a * static_cast<unsigned long>(q);
    mpz_mul_2exp(shift.get_mpz_t(), shift.get_mpz_t(), n);
    Integer step = b;
    mpz_mul_2exp(step.get_mpz_t(), step.get_mpz_t(), n);
    for (std::int64_t p = 0; p <= q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      num = step * static_cast<unsigned long>(p);
      std::uint64_t from = box_of(num - shift);
      std::uint64_t to = box_of(num + shift);
      ranges.emplace_back(from, to);
    }
  }
  std::sort(ranges.begin(), ranges.end());
  std::uint64_t count = 0;
  std::uint64_t end = 0;  // one past the last counted box
  for (const auto& [from, to] : ranges) {
    std::uint64_t start = std::max(from, end);
    if (to + 1 > start) {
      count += to + 1 - start;
      end = to + 1;
    }
  }
  return count;
}

}  // namespace

BoxDimension box_dim_estimate(const ApproximatingFunction& psi, unsigned k, std::span<const std::int64_t> scales) {
  if (k != 1) throw InvalidArgument("box counting is implemented for k = 1 only");
  if (scales.size() < 3) throw InvalidArgument("box_dim_estimate needs at least three scales");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (scales[i] < 2) throw InvalidArgument("scales must be >= 2");
    if (i > 0 && scales[i] <= scales[i - 1]) throw InvalidArgument("scales must be strictly increasing");
  }
  BallFamily family(psi, 1, Coprimality::Pairwise);
  BoxDimension out;
  std::vector<double> x, y;
  for (std::int64_t big_q : scales) {
    std::int64_t lo = big_q / 2;
    std::optional<Rational> delta;
    for (std::int64_t q = lo + 1; q <= big_q; ++q) {
      Rational r = family.radius(q);
      if (r != 0 && (!delta || r < *delta)) delta = r;
    }
    if (!delta) throw InvalidArgument("no ball with Q/2 < q <= " + std::to_string(big_q));
    Integer inv = floor(Rational(1) / *delta);
    if (inv < 1) inv = 1;
    auto n = static_cast<unsigned>(mpz_sizeinbase(inv.get_mpz_t(), 2) - 1);
    if (n > 62) throw InvalidArgument("box side below 2^-62 at Q = " + std::to_string(big_q));
    BoxCount c{big_q, pow2(-static_cast<long>(n)), count_boxes(family, lo, big_q, n)};
    x.push_back(static_cast<double>(n) * std::log(2.0));
    y.push_back(std::log(static_cast<double>(c.boxes)));
    out.counts.push_back(std::move(c));
  }
  double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw InvalidArgument("scales give a single box size; nothing to fit");
  out.slope = sxy / sxx;
  double intercept = my - out.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.residuals.push_back(y[i] - (intercept + out.slope * x[i]));
    ss += out.residuals.back() * out.residuals.back();
  }
  out.rms = std::sqrt(ss / n);
  return out;
}

Rational jarnik_besicovitch_dimension(const Rational& tau) {
  if (tau <= 1) return Rational(1);
  return Rational(2) / (1 + tau);
}

void write_box_csv(std::ostream& out, const BoxDimension& estimate) {
  out << "Q,delta,N\n";
  for (const auto& c : estimate.counts) out << c.q << "," << to_string(c.delta) << "," << c.boxes << "\n";
}

}  // namespace mtp
