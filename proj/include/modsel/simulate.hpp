#pragma once

// Synthetic population generation and population-based case-control sampling.
//
// A population is drawn characteristic by characteristic from the schema's
// declared distributions; each individual is then afflicted with probability
// logistic(intercept + sum of risk term contributions). A case-control
// dataset is every diseased individual plus an equal-size uniform sample of
// the healthy ones.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "modsel/schema.hpp"

namespace modsel {

class Rng;

struct Individual {
  // One raw value per characteristic, in schema order. Continuous values are
  // stored at full precision; categorical values hold the category index as
  // an exact integer-valued double.
  std::vector<double> values;
  bool diseased = false;
};

using Population = std::vector<Individual>;

struct CaseControlDataset {
  std::vector<Individual> rows;  // all cases first, then the sampled controls
  int case_count = 0;
  int control_count = 0;
  std::int64_t source_population_size = 0;
  std::uint64_t seed = 0;
};

// Log-odds of disease for one individual: intercept + sum of term
// contributions. Continuous factors contribute (value - standardize_offset)
// in natural units; indicators contribute 0/1; pair targets multiply.
double risk_log_odds(const CharacteristicSchema& schema, const RiskModel& risk,
                     const Individual& individual);

// logistic(risk_log_odds), with the -infinity intercept sentinel clamping
// the probability to exactly zero.
double disease_probability(const CharacteristicSchema& schema,
                           const RiskModel& risk, const Individual& individual);

// Draws the characteristic values of one individual (no disease flag).
// Exposed for the calibration path; consumes rng in schema order.
std::vector<double> draw_values(const CharacteristicSchema& schema, Rng& rng);

// Generates `size` individuals. Bit-identical output for identical inputs.
Population generate_population(const CharacteristicSchema& schema,
                               const RiskModel& risk, std::int64_t size,
                               std::uint64_t seed);

// Number of covariate draws used by calibrate_intercept.
inline constexpr int kCalibrationSampleSize = 400000;

// Finds the intercept whose Monte-Carlo expected prevalence over a fixed
// seeded calibration sample matches target_prevalence, by bisection on the
// (monotone) expected-prevalence curve. target_prevalence in (1e-7, 0.5).
double calibrate_intercept(const CharacteristicSchema& schema,
                           const std::vector<RiskTerm>& risk_terms,
                           double target_prevalence, std::uint64_t seed);

// All diseased individuals plus an equal-count uniform sample (without
// replacement) of the healthy ones; controls are listed in population order.
CaseControlDataset sample_case_control(const Population& population,
                                       std::uint64_t seed);

// CSV with one header row: one column per characteristic plus `diseased`.
void write_dataset_csv(std::ostream& out, const CharacteristicSchema& schema,
                       const CaseControlDataset& dataset);
CaseControlDataset read_dataset_csv(std::istream& in,
                                    const CharacteristicSchema& schema);

// FNV-1a over the dataset's raw values; used to confirm that several methods
// consumed the identical dataset.
std::uint64_t dataset_fingerprint(const CaseControlDataset& dataset);

// The built-in eight-characteristic schema: age (truncated normal), six
// binary characteristics, and a five-level alcohol scale. Expands to 11
// w-variables and a 61-entry x-catalog.
const CharacteristicSchema& default_schema();

inline constexpr double kDefaultPrevalence = 4.25e-4;

// Fixed seed shared by every built-in or configuration-driven intercept
// calibration, so identical targets give identical intercepts everywhere.
inline constexpr std::uint64_t kCalibrationSeed = 0x5ca1ab1e5eedULL;

// The built-in ground-truth risk model, intercept calibrated once (lazily,
// with a fixed internal seed) so that the expected prevalence is
// kDefaultPrevalence.
const RiskModel& default_risk_model();

}  // namespace modsel
