#pragma once

// JSON forms of the library's values. Rationals are written as "p/q"
// strings so nothing is rounded; every document carries a format version.

#include <nlohmann/json.hpp>

#include "mtp/diophantine.hpp"
#include "mtp/dimension.hpp"
#include "mtp/exact.hpp"
#include "mtp/geometry.hpp"
#include "mtp/magnitude.hpp"
#include "mtp/transference.hpp"

namespace mtp {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

Json to_json(const Rational& value);
Rational rational_from_json(const Json& j);
Json to_json(const Enclosure& e);
Enclosure enclosure_from_json(const Json& j);
Json to_json(const Magnitude& m);
Magnitude magnitude_from_json(const Json& j);
Json to_json(const Ball& b);
Ball ball_from_json(const Json& j);
Json to_json(const RationalPoint& p);
RationalPoint point_from_json(const Json& j);

Json to_json(const ConstructionParams& p);
ConstructionParams params_from_json(const Json& j);
Json to_json(const CantorTree& tree);
CantorTree tree_from_json(const Json& j);

Json to_json(const Verification& v);
Json to_json(const BallBoundReport& r);
Json to_json(const Certificate& c);
Json to_json(const MdpBound& m);
Json to_json(const BoxDimension& b, const Rational& target);

// Throws InvalidArgument when the document has no or a different version.
void check_version(const Json& j);

}  // namespace mtp
