#pragma once

#include <json.hpp>

#include "qkdtk/analyzers.hpp"
#include "qkdtk/bounds.hpp"
#include "qkdtk/cinfo.hpp"
#include "qkdtk/engine.hpp"
#include "qkdtk/qcore.hpp"

// JSON round-trip for the report and transcript types. Every document the
// CLI emits is readable back by the matching from_json.

namespace qkdtk::json_io {

using nlohmann::json;

json to_json(const cinfo::ProbDist& p);
cinfo::ProbDist prob_dist_from_json(const json& j);

json to_json(const qcore::DensityOperator& rho);
qcore::DensityOperator density_from_json(const json& j);

json to_json(const bounds::BoundReport& r);
json to_json(const analyzers::RateReport& r);
json to_json(const analyzers::ThresholdReport& r);

json to_json(const engine::Transcript& t);
engine::Transcript transcript_from_json(const json& j);

std::string bits_to_string(const randkit::Bits& b);
randkit::Bits bits_from_string(const std::string& s);

}  // namespace qkdtk::json_io
