#pragma once

// Trial orchestration: run every requested selection method on identical
// seeded case-control datasets and collect comparison tables.
//
// Seeding: trial_seed = derive_seed(master_seed, trial_index), from which
// three sub-streams derive — population (0), case-control sampling (1), and
// the annealer (2). Trials are therefore order-independent: running trial 7
// alone gives the same reports as running trials 0..9.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "modsel/annealer.hpp"

namespace modsel {

struct TableOptions {
  bool include_wall = true;    // false: wall_ms column written as 0.000
  bool include_fingerprint = false;  // true: append the fingerprint column
};

struct TrialConfig {
  int population_size = 100000;
  int trial_count = 5;
  std::uint64_t master_seed = 0;
  std::vector<Method> methods{Method::kForward, Method::kBackward,
                              Method::kAnnealer};
  // Per-trial the annealer runs with this tuning but a derived seed; the
  // seed field here is ignored.
  AnnealerConfig annealer;
  int exhaustive_max_p = 3;  // subset-size cap when kExhaustive is requested
  CharacteristicSchema schema;
  RiskModel risk;

  void validate() const;
};

struct BenchmarkRow {
  int trial = 0;
  Method method = Method::kForward;
  double cp = 0.0;
  long long evaluations = 0;
  int p_selected = 0;
  std::vector<int> subset;  // sorted nonconstant x indices
  double wall_ms = 0.0;
  std::uint64_t fingerprint = 0;  // of the trial's dataset
};

struct TrialResult {
  int trial = 0;
  std::uint64_t dataset_fingerprint = 0;
  std::vector<SelectionReport> reports;  // one per requested method, in order
};

// Runs one seeded trial: one population, one dataset, one Cp context, every
// requested method on that identical dataset. Errors from the underlying
// modules are rethrown with "trial N:" prefixed, preserving their type.
TrialResult run_trial(const TrialConfig& config, int trial_index);

struct BenchmarkTable {
  std::vector<BenchmarkRow> rows;  // trial_count x |methods|
};

BenchmarkTable run_bench(const TrialConfig& config);

BenchmarkRow to_row(const SelectionReport& report, int trial,
                    std::uint64_t fingerprint);

// trial,method,cp,evaluations,p_selected,subset,wall_ms[,fingerprint]
// cp fixed at 6 decimals; subset ';'-joined; rows ordered by (trial, method
// name). include_wall=false writes a constant 0.000 in the wall_ms column so
// repeated runs compare byte-for-byte.
void emit_table(std::ostream& out, const BenchmarkTable& table,
                const TableOptions& options = {});

}  // namespace modsel
