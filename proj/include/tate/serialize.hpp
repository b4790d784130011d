#pragma once

#include <json.hpp>

#include "tate/alpha.hpp"

namespace tate {

using Json = nlohmann::ordered_json;

/// {p, kind, modulus, m}; Eisenstein rings add base_modulus and modulus_precision.
/// All coefficients are decimal strings.
Json to_json(const LocalRing& R);
RingPtr ring_from_json(const Json& j);

/// Coefficient vector of decimal strings.
Json to_json(const Elem& a);
Elem elem_from_json(const RingPtr& R, const Json& j);

/// "inf", {x, y} or {z}.
Json to_json(const LocalPoint& P);
LocalPoint point_from_json(const CurvePtr& E, const Json& j);

Json to_json(const LocalCurve& E);
Json to_json(const TateVector& v);
Json to_json(const ThetaValue& t);
Json to_json(const Character& chi);
Character character_from_json(const Json& j, const std::vector<RingPtr>& rings);
Json to_json(const FactoredOrder& o);

}  // namespace tate
