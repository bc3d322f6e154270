#pragma once

// The batch commands behind the mtp executable. Each returns a versioned JSON
// document and whether every exact check it ran passed.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtp/diophantine.hpp"
#include "mtp/serialize.hpp"
#include "mtp/transference.hpp"

namespace mtp {

struct Inputs {
  unsigned k = 1;
  Rational tau = Rational(2);
  Rational f_exponent = make_rational(2, 3);
  Coprimality coprimality = Coprimality::Pairwise;

  BallFamily family() const;
  DimensionFunction f() const { return DimensionFunction::power(f_exponent); }
  DimensionFunction g() const { return DimensionFunction::power(Rational(k)); }
};

struct CommandResult {
  Json document;
  bool ok = true;
  std::string csv;  // tabular form, when the command has one
};

CommandResult run_generate(const Inputs& in, std::int64_t max_q);

// Rows at N = 1, 2, 4, ... and at n_max itself.
CommandResult run_criteria(const Inputs& in, std::uint64_t n_max);

CommandResult run_construct(const Inputs& in, const ConstructionParams& params, const Ball& root);

// Rebuilds the certificate of a construct document from its tree alone.
CommandResult run_verify(const Json& document);

struct PremeasureRequest {
  std::int64_t tail_q = 2;  // first denominator of the tail cover
  std::int64_t max_q = 1024;
  std::optional<Rational> rho;  // defaults to the largest radius in the tail
};

CommandResult run_dimension(const Inputs& in, const std::vector<std::int64_t>& scales,
                            const PremeasureRequest& premeasure);

// Passes when every slope is within `tolerance` of 2/(1+tau).
CommandResult run_jb_check(const std::vector<Rational>& taus, const std::vector<std::int64_t>& scales,
                           double tolerance);

// Q = 2^4, ..., 2^12.
std::vector<std::int64_t> default_scales();

}  // namespace mtp
