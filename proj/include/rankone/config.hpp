#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "rankone/model.hpp"

namespace rankone {

struct ModelConfig {
  ModelParams params;
  ModelFunctions funcs = ModelFunctions::sine_family();

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Parses a model config document:
///
///   {"params": {"eps1": .., "eps2": .., "alpha1": .., "alpha2": .., "delta": ..,
///               "delta1": .., "delta2": .., "b": ..},
///    "functions": {"psi1": {"x": {"c0": 1.1, "sin": [1.0], "cos": []}, "y": []},
///                  "psi2": .., "g": ..,
///                  "psi3": {"t": {..}},
///                  "psi4": {"x": {..}, "y": [..], "t": {..}}}}
///
/// All eight params are required. Missing function entries take their sine
/// family value; missing parts inside an entry are zero. Unknown keys and
/// wrong types raise ParseError (with the 1-based line where the offending
/// key appears). Parameter ranges (H1, H2) always raise ValidationError;
/// strict mode also requires H3..H6 to pass.
ModelConfig parse_config_text(const std::string& text, bool strict = false);
ModelConfig parse_config(const std::filesystem::path& path, bool strict = false);

/// Canonical document: fixed key order, shortest round-trip numbers.
std::string emit_config(const ModelConfig& cfg);

nlohmann::ordered_json params_to_json(const ModelParams& p);
nlohmann::ordered_json functions_to_json(const ModelFunctions& f);

/// Schema readers shared with the sweep spec. `text` is the source document,
/// used only to locate line numbers for errors.
ModelParams params_from_json(const nlohmann::json& j, const std::string& text);
ModelFunctions functions_from_json(const nlohmann::json& j, const std::string& text);

/// Throws ValidationError for the first failing hypothesis among `names`.
void enforce_hypotheses(const ModelParams& p, const ModelFunctions& f,
                        std::initializer_list<const char*> names);

/// 1-based line containing byte offset `pos` of text.
int line_at(const std::string& text, std::size_t pos);
/// Line of the first occurrence of "key" (quoted) in text, 0 if absent.
int line_of_key(const std::string& text, const std::string& key);

std::string read_text_file(const std::filesystem::path& path);
/// Writes via a temporary file in the same directory and renames.
void write_text_file_atomic(const std::filesystem::path& path, const std::string& data);

}  // namespace rankone
