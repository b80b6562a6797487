#pragma once

#include <json.hpp>

#include "pfdde/charmatrix.hpp"
#include "pfdde/integrator.hpp"
#include "pfdde/normal_form.hpp"

namespace pfdde {

nlohmann::json triple_to_json(const EigenTriple& t, const Model& model);
nlohmann::json scan_to_json(const ResonanceScan& scan);
nlohmann::json resonance_to_json(const ResonanceClass& rc);
nlohmann::json fold_report_to_json(const FoldReport& rep, const Model& model);
nlohmann::json hopf_report_to_json(const HopfReport& rep, const Model& model, const HopfOptions& opts);
nlohmann::json strobe_to_json(const StrobeResult& res, const StrobeOptions& opts);

/// Machine-readable error payload {"error": tag, "message": ..., extra fields}.
nlohmann::json error_to_json(const std::exception& e);

}  // namespace pfdde
