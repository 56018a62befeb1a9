#include "modsel/cli.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "modsel/bench.hpp"
#include "modsel/config.hpp"
#include "modsel/errors.hpp"

namespace modsel {

namespace {

Method parse_method(const std::string& name) {
  if (name == "forward") return Method::kForward;
  if (name == "backward") return Method::kBackward;
  if (name == "asa") return Method::kAnnealer;
  if (name == "exhaustive") return Method::kExhaustive;
  throw ValidationError("unknown method \"" + name + "\"");
}

ProjectConfig load_or_default(const std::string& config_path) {
  if (config_path.empty()) return default_project_config();
  return load_config_file(config_path);
}

// Runs `write` against --out if given, the session stream otherwise.
void with_output(const std::string& path, std::ostream& fallback,
                 const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path + " for writing");
  write(file);
  if (!file) throw IoError("write failure on " + path);
}

struct SimulateOptions {
  std::string config_path;
  std::string out_path;
  int population = 100000;
  std::uint64_t seed = 0;
};

void run_simulate(const SimulateOptions& opt, std::ostream& out,
                  std::ostream& err) {
  const ProjectConfig config = load_or_default(opt.config_path);
  const RiskModel risk = resolve_risk(config.schema, config.risk);
  const Population population = generate_population(
      config.schema, risk, opt.population, derive_seed(opt.seed, 0));
  const CaseControlDataset dataset =
      sample_case_control(population, derive_seed(opt.seed, 1));
  with_output(opt.out_path, out, [&](std::ostream& o) {
    write_dataset_csv(o, config.schema, dataset);
  });
  err << "simulate: population " << opt.population << ", " << dataset.case_count
      << " cases + " << dataset.control_count << " controls\n";
}

struct SelectOptions {
  std::string config_path;
  std::string data_path;
  std::string out_path;
  std::string trace_path;
  std::string method = "forward";
  std::uint64_t seed = 0;
  int p_slots = -1;  // -1: keep the configured value
  int max_p = 3;
  bool omit_timing = false;
  bool verbose = false;
};

void run_select(const SelectOptions& opt, std::ostream& out, std::ostream&) {
  const ProjectConfig config = load_or_default(opt.config_path);
  std::ifstream data(opt.data_path);
  if (!data) throw IoError("cannot open " + opt.data_path);
  const CaseControlDataset dataset = read_dataset_csv(data, config.schema);
  const VariableCatalog catalog = build_catalog(config.schema);
  const CpContext ctx = make_cp_context(dataset, catalog);

  const Method method = parse_method(opt.method);
  SelectionReport report;
  std::vector<AnnealTracePoint> anneal_trace;
  switch (method) {
    case Method::kForward:
      report = forward_select(dataset, catalog, ctx);
      break;
    case Method::kBackward:
      report = backward_select(dataset, catalog, ctx);
      break;
    case Method::kExhaustive:
      report = exhaustive_best_subset(dataset, catalog, ctx, opt.max_p);
      break;
    case Method::kAnnealer: {
      AnnealerConfig annealer = config.annealer;
      annealer.seed = opt.seed;
      if (opt.p_slots > 0) annealer.p_slots = opt.p_slots;
      AnnealerResult result = run_annealer_full(dataset, catalog, ctx, annealer);
      report = std::move(result.report);
      anneal_trace = std::move(result.anneal_trace);
      break;
    }
  }

  if (!opt.trace_path.empty()) {
    with_output(opt.trace_path, out, [&](std::ostream& o) {
      if (method == Method::kAnnealer)
        write_anneal_trace_csv(o, anneal_trace);
      else
        write_trace_csv(o, report);
    });
  }

  BenchmarkTable table;
  table.rows.push_back(to_row(report, 0, dataset_fingerprint(dataset)));
  with_output(opt.out_path, out, [&](std::ostream& o) {
    emit_table(o, table, {!opt.omit_timing, opt.verbose});
  });
}

struct BenchOptions {
  std::string config_path;
  std::string out_path;
  int population = 100000;
  int trials = 5;
  std::uint64_t seed = 0;
  std::vector<std::string> methods;
  int p_slots = -1;
  int max_p = 3;
  bool omit_timing = false;
  bool verbose = false;
};

void run_bench_command(const BenchOptions& opt, std::ostream& out,
                       std::ostream&) {
  const ProjectConfig config = load_or_default(opt.config_path);
  TrialConfig trial;
  trial.population_size = opt.population;
  trial.trial_count = opt.trials;
  trial.master_seed = opt.seed;
  trial.annealer = config.annealer;
  if (opt.p_slots > 0) trial.annealer.p_slots = opt.p_slots;
  trial.exhaustive_max_p = opt.max_p;
  trial.schema = config.schema;
  trial.risk = resolve_risk(config.schema, config.risk);
  if (!opt.methods.empty()) {
    trial.methods.clear();
    for (const std::string& name : opt.methods)
      trial.methods.push_back(parse_method(name));
  }

  const BenchmarkTable table = run_bench(trial);
  with_output(opt.out_path, out, [&](std::ostream& o) {
    emit_table(o, table, {!opt.omit_timing, opt.verbose});
  });
}

struct CatalogOptions {
  std::string config_path;
  std::string out_path;
};

void run_catalog(const CatalogOptions& opt, std::ostream& out, std::ostream&) {
  const ProjectConfig config = load_or_default(opt.config_path);
  const VariableCatalog catalog = build_catalog(config.schema);
  with_output(opt.out_path, out,
              [&](std::ostream& o) { write_catalog_csv(o, catalog); });
}

struct OracleOptions {
  std::string config_path;
  std::string data_path;
  std::string out_path;
  int population = 100000;
  std::uint64_t seed = 0;
  int p_slots = 3;
  bool omit_timing = false;
  bool verbose = false;
};

void run_oracle(const OracleOptions& opt, std::ostream& out, std::ostream&) {
  const ProjectConfig config = load_or_default(opt.config_path);
  CaseControlDataset dataset;
  if (!opt.data_path.empty()) {
    std::ifstream data(opt.data_path);
    if (!data) throw IoError("cannot open " + opt.data_path);
    dataset = read_dataset_csv(data, config.schema);
  } else {
    const RiskModel risk = resolve_risk(config.schema, config.risk);
    const Population population = generate_population(
        config.schema, risk, opt.population, derive_seed(opt.seed, 0));
    dataset = sample_case_control(population, derive_seed(opt.seed, 1));
  }
  const VariableCatalog catalog = build_catalog(config.schema);
  const CpContext ctx = make_cp_context(dataset, catalog);
  const SelectionReport report =
      exhaustive_best_subset(dataset, catalog, ctx, opt.p_slots);

  BenchmarkTable table;
  table.rows.push_back(to_row(report, 0, dataset_fingerprint(dataset)));
  with_output(opt.out_path, out, [&](std::ostream& o) {
    emit_table(o, table, {!opt.omit_timing, opt.verbose});
  });
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
  CLI::App app{
      "Model-selection toolkit: simulated case-control studies with "
      "stepwise and annealing-based Cp subset search"};
  app.require_subcommand(1);
  const auto method_names =
      CLI::IsMember({"forward", "backward", "asa", "exhaustive"});

  SimulateOptions simulate;
  CLI::App* sim = app.add_subcommand(
      "simulate", "Generate a seeded case-control dataset CSV");
  sim->add_option("--config", simulate.config_path,
                  "JSON configuration (schema/risk/annealer)");
  sim->add_option("--population", simulate.population,
                  "Source population size")
      ->check(CLI::PositiveNumber);
  sim->add_option("--seed", simulate.seed, "Master seed (64-bit)");
  sim->add_option("--out", simulate.out_path, "Output CSV path (default stdout)");

  SelectOptions select;
  CLI::App* sel = app.add_subcommand(
      "select", "Run one selection method on a dataset file");
  sel->add_option("--data", select.data_path, "Dataset CSV (from `simulate`)")
      ->required();
  sel->add_option("--method", select.method,
                  "forward | backward | asa | exhaustive")
      ->required()
      ->check(method_names);
  sel->add_option("--config", select.config_path, "JSON configuration");
  sel->add_option("--seed", select.seed, "Annealer seed");
  sel->add_option("--p-slots", select.p_slots,
                  "Annealer slot count override");
  sel->add_option("--max-p", select.max_p,
                  "Exhaustive subset-size cap");
  sel->add_option("--trace", select.trace_path,
                  "Write the per-step trace CSV here");
  sel->add_option("--out", select.out_path, "Report CSV path (default stdout)");
  sel->add_flag("--omit-timing", select.omit_timing,
                "Zero the wall_ms column for byte-stable output");
  sel->add_flag("--verbose", select.verbose,
                "Append the dataset fingerprint column");

  BenchOptions bench;
  CLI::App* ben = app.add_subcommand(
      "bench", "Run the seeded trial matrix and emit the comparison table");
  ben->add_option("--population", bench.population, "Source population size")
      ->check(CLI::PositiveNumber);
  ben->add_option("--trials", bench.trials, "Number of trials")
      ->check(CLI::PositiveNumber);
  ben->add_option("--seed", bench.seed, "Master seed (64-bit)");
  ben->add_option("--method", bench.methods,
                  "Methods to run (repeatable; default forward backward asa)")
      ->check(method_names);
  ben->add_option("--config", bench.config_path, "JSON configuration");
  ben->add_option("--p-slots", bench.p_slots, "Annealer slot count override");
  ben->add_option("--max-p", bench.max_p, "Exhaustive subset-size cap");
  ben->add_option("--out", bench.out_path, "Table CSV path (default stdout)");
  ben->add_flag("--omit-timing", bench.omit_timing,
                "Zero the wall_ms column for byte-stable output");
  ben->add_flag("--verbose", bench.verbose,
                "Append the dataset fingerprint column");

  CatalogOptions catalog;
  CLI::App* cat = app.add_subcommand(
      "catalog", "Dump the zipper-ordered variable catalog CSV");
  cat->add_option("--config", catalog.config_path, "JSON configuration");
  cat->add_option("--out", catalog.out_path, "Output CSV path (default stdout)");

  OracleOptions oracle;
  CLI::App* ora = app.add_subcommand(
      "oracle", "Exhaustive best-subset search (reference answers)");
  ora->add_option("--data", oracle.data_path,
                  "Dataset CSV; omit to simulate one");
  ora->add_option("--config", oracle.config_path, "JSON configuration");
  ora->add_option("--population", oracle.population,
                  "Population size when simulating")
      ->check(CLI::PositiveNumber);
  ora->add_option("--seed", oracle.seed, "Master seed when simulating");
  ora->add_option("--p-slots", oracle.p_slots, "Subset-size cap")
      ->check(CLI::PositiveNumber);
  ora->add_option("--out", oracle.out_path, "Report CSV path (default stdout)");
  ora->add_flag("--omit-timing", oracle.omit_timing,
                "Zero the wall_ms column for byte-stable output");
  ora->add_flag("--verbose", oracle.verbose,
                "Append the dataset fingerprint column");

  sim->callback([&] { run_simulate(simulate, out, err); });
  sel->callback([&] { run_select(select, out, err); });
  ben->callback([&] { run_bench_command(bench, out, err); });
  cat->callback([&] { run_catalog(catalog, out, err); });
  ora->callback([&] { run_oracle(oracle, out, err); });

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::CallForHelp& e) {
    const auto parsed = app.get_subcommands();
    out << (parsed.empty() ? app.help() : parsed.front()->help());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n"
        << "Run with --help for usage.\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace modsel
