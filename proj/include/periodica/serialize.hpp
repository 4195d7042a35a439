#pragma once

// JSON forms of the proof records. Doubles are written as hex-float strings
// so that a record round-trips bit-exactly; intervals as [lo, hi] pairs.

#include <string>
#include <vector>

#include <json.hpp>

#include "periodica/certify.hpp"
#include "periodica/cheb.hpp"
#include "periodica/interval.hpp"
#include "periodica/maps.hpp"
#include "periodica/pdcurve.hpp"

namespace periodica {

using json = nlohmann::ordered_json;

json hex_json(double x);
double double_from_json(const json& j);

json to_json(const Interval& x);
Interval interval_from_json(const json& j);

json to_json(const ChebSeq& s);
ChebSeq cheb_from_json(const json& j);

json to_json(const MapDef& m);
MapDef map_from_json(const json& j);

json to_json(const Certificate& c);
/// Rebuilds the candidate (map, period, x_bar, Newton status and residual) and
/// the recorded fields; A is recomputed from x_bar. The residual history is not
/// stored, so iterations() reads 0 after loading.
Certificate certificate_from_json(const json& j);

json to_json(const CurveCertificate& c);
json to_json(const PatchResult& p);

/// kappa, beta_lo, beta_hi rows.
std::string curve_samples_csv(const std::vector<CurveCertificate>& pieces, int per_piece);

}  // namespace periodica
