#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "pfdde/model.hpp"

namespace pfdde {

/// Parses a model document:
///   { "n": 1,
///     "forcing": {"type": "periodic", "T": 6.283},      // or {"type": "autonomous"}
///     "delays": [0, 1], "max_delay": 1,                 // max_delay optional
///     "matrices": [[[0]], [[-1.5707963]]],
///     "bilinear": [{"slots": [[0, 0], [1, 0]],           // (delay, component) per argument
///                   "coeff": [[[-1, 0.5, 0], [1, 0.5, 0]]],  // per component: [m, re, im]
///                   "real": true}],
///     "trilinear": [],
///     "equilibrium": [0] }
/// Throws ValidationError on malformed or inconsistent documents.
Model parse_model(const std::string& text);
Model parse_model(const nlohmann::json& doc);
inline Model parse_model(const char* text) { return parse_model(std::string(text)); }
Model load_model(const std::filesystem::path& path);

nlohmann::json model_to_json(const Model& model);
std::string serialize_model(const Model& model);
void save_model(const Model& model, const std::filesystem::path& path);

/// Mode list [[m, re, im], ...] of a scalar series (or one component).
nlohmann::json series_to_json(const FourierSeries& s, Eigen::Index component = 0);
/// Vector series, one mode list per component.
nlohmann::json vector_series_to_json(const FourierSeries& s);
FourierSeries vector_series_from_json(const nlohmann::json& j, Eigen::Index dim,
                                      std::optional<double> period);

nlohmann::json complex_to_json(cplx z);
cplx complex_from_json(const nlohmann::json& j);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace pfdde
