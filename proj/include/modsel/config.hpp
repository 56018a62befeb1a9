#pragma once

// JSON configuration covering the characteristic schema, the ground-truth
// risk model, and annealer tuning. Every section is optional and falls back
// to the built-in defaults; unknown fields are rejected so typos surface as
// errors instead of silently reverting to defaults.
//
// Layout (field names match the corresponding struct members):
//   {
//     "schema": { "characteristics": [
//         { "name": "age", "kind": "continuous", "distribution": "normal",
//           "mean": 50, "sd": 15, "truncated": true,
//           "lower": 18, "upper": 90 },
//         { "name": "tobacco", "kind": "categorical", "category_count": 2,
//           "category_probabilities": [0.7, 0.3] } ] },
//     "risk": {
//       "intercept": -8.9,            // or "calibrate_to_prevalence": 4.25e-4
//       "terms": [
//         { "target": ["tobacco"], "coefficient": 0.5 },
//         { "target": [ { "characteristic": "alcohol", "category": 4 } ],
//           "coefficient": 1.0 },
//         { "target": ["hepatitis_b", "aflatoxin"], "coefficient": 0.7 } ] },
//     "annealer": { "p_slots": 7, "seed": 1, ... }
//   }

#include <iosfwd>
#include <optional>
#include <string>

#include "modsel/annealer.hpp"
#include "modsel/schema.hpp"

namespace modsel {

// Risk section before intercept resolution: exactly one of `intercept` and
// `calibrate_to_prevalence` may be given; with neither, the built-in
// calibrated model applies and `terms` must be absent too.
struct RiskSpec {
  std::optional<double> intercept;
  std::optional<double> calibrate_to_prevalence;
  std::vector<RiskTerm> terms;
  bool specified = false;  // whether a "risk" section was present at all
};

struct ProjectConfig {
  CharacteristicSchema schema;
  RiskSpec risk;
  AnnealerConfig annealer;
};

// Defaults used wherever a section is missing: the built-in schema, the
// built-in prevalence-calibrated risk model, stock annealer tuning.
ProjectConfig default_project_config();

// Throws ValidationError on malformed JSON, unknown fields, or any type
// invariant violation; messages name the offending field.
ProjectConfig load_config(std::istream& in);
ProjectConfig load_config_file(const std::string& path);  // IoError if unreadable

void save_config(std::ostream& out, const ProjectConfig& config);

// Turns a RiskSpec into a concrete RiskModel, calibrating the intercept
// against the schema when requested (fixed kCalibrationSeed).
RiskModel resolve_risk(const CharacteristicSchema& schema,
                       const RiskSpec& risk);

}  // namespace modsel
