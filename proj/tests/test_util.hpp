#pragma once

// Shared fixtures for the test suites: compact schemas, simulated toy
// datasets, and a couple of statistics helpers.

#include <algorithm>
#include <string>
#include <vector>

#include "modsel/config.hpp"
#include "modsel/simulate.hpp"

namespace testutil {

// k binary characteristics named c1..ck, positive category with probability p.
inline modsel::CharacteristicSchema binary_schema(int k, double p = 0.5) {
  modsel::CharacteristicSchema schema;
  for (int i = 1; i <= k; ++i) {
    modsel::Characteristic ch;
    ch.name = "c" + std::to_string(i);
    ch.kind = modsel::CategoricalSpec{2, {1.0 - p, p}};
    schema.characteristics.push_back(std::move(ch));
  }
  return schema;
}

// Additive single-factor risk on the named binary characteristics.
inline modsel::RiskModel toy_risk(
    double intercept,
    const std::vector<std::pair<std::string, double>>& effects) {
  modsel::RiskModel risk;
  risk.intercept = intercept;
  for (const auto& [name, coefficient] : effects) {
    modsel::RiskTerm term;
    term.target.push_back({name, 0});
    term.coefficient = coefficient;
    risk.terms.push_back(std::move(term));
  }
  return risk;
}

// One simulated population -> case-control dataset, seeded like the bench
// trial sub-streams.
inline modsel::CaseControlDataset toy_dataset(
    const modsel::CharacteristicSchema& schema, const modsel::RiskModel& risk,
    int population, std::uint64_t seed) {
  const modsel::Population pop = modsel::generate_population(
      schema, risk, population, modsel::derive_seed(seed, 0));
  return modsel::sample_case_control(pop, modsel::derive_seed(seed, 1));
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace testutil
