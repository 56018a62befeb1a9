#include "modsel/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>

#include "modsel/errors.hpp"

namespace modsel {

namespace {

// Rethrows the current module error with trial context, preserving its type
// so exit-code mapping downstream still works.
template <typename F>
auto with_trial_context(int trial, F&& body) {
  const std::string prefix = "trial " + std::to_string(trial) + ": ";
  try {
    return body();
  } catch (const ValidationError& e) {
    throw ValidationError(prefix + e.what());
  } catch (const DataError& e) {
    throw DataError(prefix + e.what());
  } catch (const DomainError& e) {
    throw DomainError(prefix + e.what());
  } catch (const BoundsError& e) {
    throw BoundsError(prefix + e.what());
  } catch (const SamplingError& e) {
    throw SamplingError(prefix + e.what());
  } catch (const CalibrationError& e) {
    throw CalibrationError(prefix + e.what());
  } catch (const BudgetError& e) {
    throw BudgetError(prefix + e.what());
  } catch (const IoError& e) {
    throw IoError(prefix + e.what());
  }
}

}  // namespace

void TrialConfig::validate() const {
  if (population_size < 1)
    throw ValidationError("bench: population_size must be >= 1");
  if (trial_count < 1) throw ValidationError("bench: trial_count must be >= 1");
  if (methods.empty()) throw ValidationError("bench: methods must be nonempty");
  annealer.validate();
  schema.validate();
  risk.validate(schema);
}

TrialResult run_trial(const TrialConfig& config, int trial_index) {
  config.validate();
  if (trial_index < 0 || trial_index >= config.trial_count)
    throw ValidationError("bench: trial index " + std::to_string(trial_index) +
                          " outside 0.." +
                          std::to_string(config.trial_count - 1));

  return with_trial_context(trial_index, [&] {
    const std::uint64_t trial_seed =
        derive_seed(config.master_seed,
                    static_cast<std::uint64_t>(trial_index));
    const std::uint64_t population_seed = derive_seed(trial_seed, 0);
    const std::uint64_t sampling_seed = derive_seed(trial_seed, 1);
    const std::uint64_t annealer_seed = derive_seed(trial_seed, 2);

    const Population population = generate_population(
        config.schema, config.risk, config.population_size, population_seed);
    const CaseControlDataset dataset =
        sample_case_control(population, sampling_seed);
    const VariableCatalog catalog = build_catalog(config.schema);
    const CpContext ctx = make_cp_context(dataset, catalog);

    TrialResult result;
    result.trial = trial_index;
    result.dataset_fingerprint = dataset_fingerprint(dataset);
    for (const Method method : config.methods) {
      switch (method) {
        case Method::kForward:
          result.reports.push_back(forward_select(dataset, catalog, ctx));
          break;
        case Method::kBackward:
          result.reports.push_back(backward_select(dataset, catalog, ctx));
          break;
        case Method::kExhaustive:
          result.reports.push_back(exhaustive_best_subset(
              dataset, catalog, ctx, config.exhaustive_max_p));
          break;
        case Method::kAnnealer: {
          AnnealerConfig annealer = config.annealer;
          annealer.seed = annealer_seed;
          result.reports.push_back(
              run_annealer(dataset, catalog, ctx, annealer));
          break;
        }
      }
    }
    return result;
  });
}

BenchmarkTable run_bench(const TrialConfig& config) {
  config.validate();
  BenchmarkTable table;
  for (int trial = 0; trial < config.trial_count; ++trial) {
    const TrialResult result = run_trial(config, trial);
    for (const SelectionReport& report : result.reports)
      table.rows.push_back(to_row(report, trial, result.dataset_fingerprint));
  }
  return table;
}

BenchmarkRow to_row(const SelectionReport& report, int trial,
                    std::uint64_t fingerprint) {
  BenchmarkRow row;
  row.trial = trial;
  row.method = report.method;
  row.cp = report.cp;
  row.evaluations = report.evaluations;
  row.p_selected = static_cast<int>(report.selected.size());
  row.subset = report.selected;
  row.wall_ms = report.wall_ms;
  row.fingerprint = fingerprint;
  return row;
}

void emit_table(std::ostream& out, const BenchmarkTable& table,
                const TableOptions& options) {
  std::vector<const BenchmarkRow*> ordered;
  ordered.reserve(table.rows.size());
  for (const BenchmarkRow& row : table.rows) ordered.push_back(&row);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const BenchmarkRow* a, const BenchmarkRow* b) {
                     if (a->trial != b->trial) return a->trial < b->trial;
                     return method_name(a->method) < method_name(b->method);
                   });

  out << "trial,method,cp,evaluations,p_selected,subset,wall_ms";
  if (options.include_fingerprint) out << ",fingerprint";
  out << '\n';
  if (!out) throw IoError("emit_table: write failure");

  char buf[64];
  for (const BenchmarkRow* row : ordered) {
    std::snprintf(buf, sizeof buf, "%.6f", row->cp);
    out << row->trial << ',' << method_name(row->method) << ',' << buf << ','
        << row->evaluations << ',' << row->p_selected << ',';
    for (std::size_t i = 0; i < row->subset.size(); ++i) {
      if (i > 0) out << ';';
      out << row->subset[i];
    }
    std::snprintf(buf, sizeof buf, "%.3f",
                  options.include_wall ? row->wall_ms : 0.0);
    out << ',' << buf;
    if (options.include_fingerprint) out << ',' << row->fingerprint;
    out << '\n';
  }
  if (!out) throw IoError("emit_table: write failure");
}

}  // namespace modsel
