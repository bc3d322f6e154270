#pragma once

// Upper bounds on Hausdorff pre-measures from explicit covers, the mass
// distribution lower bound read off a certificate, and box counting for the
// sets of tau-approximable numbers.

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mtp/diophantine.hpp"
#include "mtp/dimension_function.hpp"
#include "mtp/exact.hpp"
#include "mtp/geometry.hpp"
#include "mtp/transference.hpp"

namespace mtp {

// sum V^f(B) over an explicit cover; every radius must be <= rho.
Enclosure premeasure_upper(std::span<const Ball> cover, const DimensionFunction& f, const Rational& rho);

// sum V^f(B_i) over the members with index >= tail_g and q <= max_q. Throws
// InvalidArgument when some radius in the tail exceeds rho.
Enclosure premeasure_upper(const BallFamily& family, const DimensionFunction& f, const Rational& rho,
                           std::uint64_t tail_g, std::int64_t max_q);

struct MdpBound {
  Rational eta;
  Rational c_emp;
  Rational bound;  // eta / c_emp
  std::string constants;  // "demo constants" or "faithful constants"
  std::string caveat;     // the ball bound behind c_emp was sampled
};

// eta / C_emp from a certificate whose exact checks passed and whose sampled
// ball bound was run. Throws PreconditionViolated otherwise.
MdpBound mdp_lower_bound(const Certificate& certificate);

struct BoxCount {
  std::int64_t q = 0;
  Rational delta;  // dyadic box side
  std::uint64_t boxes = 0;
};

struct BoxDimension {
  std::vector<BoxCount> counts;
  double slope = 0;
  std::vector<double> residuals;
  double rms = 0;
};

// For each Q, counts the dyadic boxes of side 2^-floor(log2(1/delta)) hit by
// the balls with Q/2 < q <= Q, where delta is the smallest nonzero radius
// among them, and fits log N against log(1/side). k = 1 only; needs at least
// three increasing scales.
BoxDimension box_dim_estimate(const ApproximatingFunction& psi, unsigned k, std::span<const std::int64_t> scales);

// 2 / (1 + tau), or 1 when tau <= 1
Rational jarnik_besicovitch_dimension(const Rational& tau);

void write_box_csv(std::ostream& out, const BoxDimension& estimate);

}  // namespace mtp
