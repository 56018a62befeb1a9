#include "modsel/simulate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "modsel/errors.hpp"
#include "modsel/linalg.hpp"
#include "modsel/rng.hpp"

namespace modsel {

namespace {

double draw_continuous(const ContinuousSpec& c, Rng& rng) {
  if (c.distribution == Distribution::kUniform)
    return c.lower + (c.upper - c.lower) * rng.next_double();
  if (!c.truncated) return c.mean + c.sd * rng.next_normal();
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    const double x = c.mean + c.sd * rng.next_normal();
    if (x >= c.lower && x <= c.upper) return x;
  }
  throw DataError("draw_continuous: truncation bounds rejected 10^6 draws");
}

int draw_categorical(const CategoricalSpec& c, Rng& rng) {
  const double u = rng.next_double();
  double cum = 0.0;
  for (int i = 0; i < c.category_count; ++i) {
    cum += c.category_probabilities[i];
    if (u < cum) return i;
  }
  return c.category_count - 1;  // floating-point dust
}

// Risk terms resolved to characteristic positions so evaluation is just
// array lookups.
struct CompiledFactor {
  int position = 0;
  int category = 0;  // 0 for continuous
  double offset = 0.0;
};

struct CompiledTerm {
  double coefficient = 0.0;
  std::vector<CompiledFactor> factors;
};

std::vector<CompiledTerm> compile_terms(const CharacteristicSchema& schema,
                                        const std::vector<RiskTerm>& terms) {
  std::vector<CompiledTerm> out;
  out.reserve(terms.size());
  for (const auto& term : terms) {
    CompiledTerm ct;
    ct.coefficient = term.coefficient;
    for (const auto& ref : term.target) {
      CompiledFactor f;
      f.position = schema.index_of(ref.characteristic);
      const auto& ch = schema.characteristics[f.position];
      if (ch.is_continuous()) {
        f.category = 0;
        f.offset = ch.continuous().standardize_offset();
      } else {
        f.category = ref.category == 0 ? 1 : ref.category;
      }
      ct.factors.push_back(f);
    }
    out.push_back(std::move(ct));
  }
  return out;
}

double factor_value(const CompiledFactor& f, const std::vector<double>& values) {
  const double v = values[f.position];
  if (f.category == 0) return v - f.offset;
  return std::lround(v) == f.category ? 1.0 : 0.0;
}

double term_sum(const std::vector<CompiledTerm>& terms,
                const std::vector<double>& values) {
  double sum = 0.0;
  for (const auto& t : terms) {
    double prod = t.coefficient;
    for (const auto& f : t.factors) prod *= factor_value(f, values);
    sum += prod;
  }
  return sum;
}

}  // namespace

double risk_log_odds(const CharacteristicSchema& schema, const RiskModel& risk,
                     const Individual& individual) {
  return risk.intercept +
         term_sum(compile_terms(schema, risk.terms), individual.values);
}

double disease_probability(const CharacteristicSchema& schema,
                           const RiskModel& risk, const Individual& individual) {
  if (risk.intercept == kNeverDiseased) return 0.0;
  return logistic(risk_log_odds(schema, risk, individual));
}

std::vector<double> draw_values(const CharacteristicSchema& schema, Rng& rng) {
  std::vector<double> values(schema.characteristics.size());
  for (std::size_t i = 0; i < schema.characteristics.size(); ++i) {
    const auto& ch = schema.characteristics[i];
    values[i] = ch.is_continuous()
                    ? draw_continuous(ch.continuous(), rng)
                    : static_cast<double>(draw_categorical(ch.categorical(), rng));
  }
  return values;
}

Population generate_population(const CharacteristicSchema& schema,
                               const RiskModel& risk, std::int64_t size,
                               std::uint64_t seed) {
  schema.validate();
  risk.validate(schema);
  if (size < 1) throw ValidationError("generate_population: size must be >= 1");

  const auto terms = compile_terms(schema, risk.terms);
  const bool never = risk.intercept == kNeverDiseased;
  Rng rng(seed);
  Population population;
  population.reserve(static_cast<std::size_t>(size));
  for (std::int64_t i = 0; i < size; ++i) {
    Individual ind;
    ind.values = draw_values(schema, rng);
    const double p =
        never ? 0.0 : logistic(risk.intercept + term_sum(terms, ind.values));
    ind.diseased = rng.next_bernoulli(p);
    population.push_back(std::move(ind));
  }
  return population;
}

double calibrate_intercept(const CharacteristicSchema& schema,
                           const std::vector<RiskTerm>& risk_terms,
                           double target_prevalence, std::uint64_t seed) {
  schema.validate();
  RiskModel probe;
  probe.terms = risk_terms;
  probe.validate(schema);
  if (!(target_prevalence > 1e-7 && target_prevalence < 0.5))
    throw ValidationError(
        "calibrate_intercept: target_prevalence must lie in (1e-7, 0.5)");

  // Fixed covariate sample; only the intercept moves during bisection, so
  // the term sums are computed once.
  const auto terms = compile_terms(schema, risk_terms);
  Rng rng(seed);
  std::vector<double> scores(kCalibrationSampleSize);
  for (auto& s : scores) s = term_sum(terms, draw_values(schema, rng));

  const auto expected_prevalence = [&scores](double intercept) {
    double sum = 0.0;
    for (double s : scores) sum += logistic(intercept + s);
    return sum / static_cast<double>(scores.size());
  };

  const double logit = std::log(target_prevalence / (1.0 - target_prevalence));
  double lo = logit - 1.0, hi = logit + 1.0;
  for (int i = 0; expected_prevalence(lo) > target_prevalence; ++i) {
    if (i >= 60)
      throw CalibrationError("calibrate_intercept: no lower bracket found");
    hi = lo;
    lo -= std::pow(2.0, i);
  }
  for (int i = 0; expected_prevalence(hi) < target_prevalence; ++i) {
    if (i >= 60)
      throw CalibrationError("calibrate_intercept: no upper bracket found");
    lo = hi;
    hi += std::pow(2.0, i);
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (expected_prevalence(mid) < target_prevalence)
      lo = mid;
    else
      hi = mid;
  }
  const double intercept = 0.5 * (lo + hi);
  const double achieved = expected_prevalence(intercept);
  if (std::abs(achieved - target_prevalence) > 0.05 * target_prevalence)
    throw CalibrationError("calibrate_intercept: achieved prevalence " +
                           std::to_string(achieved) + " misses target by >5%");
  return intercept;
}

CaseControlDataset sample_case_control(const Population& population,
                                       std::uint64_t seed) {
  std::vector<std::size_t> cases, healthy;
  for (std::size_t i = 0; i < population.size(); ++i)
    (population[i].diseased ? cases : healthy).push_back(i);
  if (cases.empty())
    throw SamplingError("sample_case_control: population has no diseased individuals");
  if (healthy.size() < cases.size())
    throw SamplingError("sample_case_control: fewer healthy (" +
                        std::to_string(healthy.size()) + ") than diseased (" +
                        std::to_string(cases.size()) + ") individuals");

  // Partial Fisher-Yates over the healthy indices, then population order.
  Rng rng(seed);
  const std::size_t k = cases.size();
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.next_below(healthy.size() - i);
    std::swap(healthy[i], healthy[j]);
  }
  healthy.resize(k);
  std::sort(healthy.begin(), healthy.end());

  CaseControlDataset ds;
  ds.case_count = static_cast<int>(k);
  ds.control_count = static_cast<int>(k);
  ds.source_population_size = static_cast<std::int64_t>(population.size());
  ds.seed = seed;
  ds.rows.reserve(2 * k);
  for (std::size_t i : cases) ds.rows.push_back(population[i]);
  for (std::size_t i : healthy) ds.rows.push_back(population[i]);
  return ds;
}

void write_dataset_csv(std::ostream& out, const CharacteristicSchema& schema,
                       const CaseControlDataset& dataset) {
  for (const auto& ch : schema.characteristics) out << ch.name << ',';
  out << "diseased\n";
  char buf[64];
  for (const auto& row : dataset.rows) {
    if (row.values.size() != schema.characteristics.size())
      throw DataError("write_dataset_csv: row width does not match schema");
    for (std::size_t i = 0; i < row.values.size(); ++i) {
      if (schema.characteristics[i].is_continuous()) {
        std::snprintf(buf, sizeof buf, "%.17g", row.values[i]);
        out << buf;
      } else {
        out << std::lround(row.values[i]);
      }
      out << ',';
    }
    out << (row.diseased ? '1' : '0') << '\n';
  }
  if (!out) throw IoError("write_dataset_csv: write failed");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

CaseControlDataset read_dataset_csv(std::istream& in,
                                    const CharacteristicSchema& schema) {
  schema.validate();
  std::string line;
  if (!std::getline(in, line)) throw IoError("read_dataset_csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  const std::size_t n_chars = schema.characteristics.size();
  if (header.size() != n_chars + 1 || header.back() != "diseased")
    throw ValidationError(
        "read_dataset_csv: header must list every schema characteristic "
        "followed by 'diseased'");
  for (std::size_t i = 0; i < n_chars; ++i)
    if (header[i] != schema.characteristics[i].name)
      throw ValidationError("read_dataset_csv: header column '" + header[i] +
                            "' does not match schema characteristic '" +
                            schema.characteristics[i].name + "'");

  CaseControlDataset ds;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != n_chars + 1)
      throw ValidationError("read_dataset_csv: line " + std::to_string(line_no) +
                            " has " + std::to_string(fields.size()) +
                            " fields, expected " + std::to_string(n_chars + 1));
    Individual row;
    row.values.resize(n_chars);
    for (std::size_t i = 0; i < n_chars; ++i) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(fields[i], &used);
      } catch (const std::exception&) {
        throw ValidationError("read_dataset_csv: line " +
                              std::to_string(line_no) + ": bad number '" +
                              fields[i] + "'");
      }
      if (used != fields[i].size())
        throw ValidationError("read_dataset_csv: line " +
                              std::to_string(line_no) + ": bad number '" +
                              fields[i] + "'");
      if (!schema.characteristics[i].is_continuous()) {
        const long cat = std::lround(v);
        if (v != static_cast<double>(cat) || cat < 0 ||
            cat >= schema.characteristics[i].categorical().category_count)
          throw ValidationError(
              "read_dataset_csv: line " + std::to_string(line_no) +
              ": category out of range for '" +
              schema.characteristics[i].name + "'");
      }
      row.values[i] = v;
    }
    if (fields[n_chars] != "0" && fields[n_chars] != "1")
      throw ValidationError("read_dataset_csv: line " + std::to_string(line_no) +
                            ": diseased must be 0 or 1");
    row.diseased = fields[n_chars] == "1";
    ds.rows.push_back(std::move(row));
  }
  for (const auto& row : ds.rows)
    (row.diseased ? ds.case_count : ds.control_count) += 1;
  if (ds.case_count != ds.control_count)
    throw ValidationError("read_dataset_csv: " + std::to_string(ds.case_count) +
                          " cases vs " + std::to_string(ds.control_count) +
                          " controls; case-control data must be balanced");
  ds.source_population_size = static_cast<std::int64_t>(ds.rows.size());
  return ds;
}

std::uint64_t dataset_fingerprint(const CaseControlDataset& dataset) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  mix(dataset.rows.size());
  for (const auto& row : dataset.rows) {
    for (double v : row.values) mix(std::bit_cast<std::uint64_t>(v));
    mix(row.diseased ? 1 : 0);
  }
  return h;
}

namespace {

Characteristic binary(std::string name, double p_positive) {
  Characteristic ch;
  ch.name = std::move(name);
  ch.kind = CategoricalSpec{2, {1.0 - p_positive, p_positive}};
  return ch;
}

CharacteristicSchema make_default_schema() {
  CharacteristicSchema schema;
  Characteristic age;
  age.name = "age";
  ContinuousSpec spec;
  spec.distribution = Distribution::kNormal;
  spec.mean = 50.0;
  spec.sd = 15.0;
  spec.truncated = true;
  spec.lower = 18.0;
  spec.upper = 90.0;
  age.kind = spec;
  schema.characteristics.push_back(age);
  schema.characteristics.push_back(binary("gender", 0.5));
  schema.characteristics.push_back(binary("hepatitis_b", 0.05));
  schema.characteristics.push_back(binary("hepatitis_c", 0.02));
  schema.characteristics.push_back(binary("aflatoxin", 0.10));
  schema.characteristics.push_back(binary("genetic_marker", 0.15));
  Characteristic alcohol;
  alcohol.name = "alcohol";
  alcohol.kind = CategoricalSpec{5, {0.30, 0.25, 0.25, 0.15, 0.05}};
  schema.characteristics.push_back(alcohol);
  schema.characteristics.push_back(binary("tobacco", 0.30));
  return schema;
}

std::vector<RiskTerm> default_risk_terms() {
  const auto single = [](std::string name, double coeff, int category = 0) {
    RiskTerm t;
    t.target = {WFactorRef{std::move(name), category}};
    t.coefficient = coeff;
    return t;
  };
  std::vector<RiskTerm> terms;
  terms.push_back(single("hepatitis_b", 2.0));
  terms.push_back(single("hepatitis_c", 1.8));
  terms.push_back(single("aflatoxin", 1.2));
  terms.push_back(single("genetic_marker", 0.9));
  terms.push_back(single("tobacco", 0.5));
  terms.push_back(single("alcohol", 1.0, 4));  // heavy
  terms.push_back(single("alcohol", 0.4, 3));  // moderate
  terms.push_back(single("age", 0.03));        // per year above 50
  RiskTerm interaction;
  interaction.target = {WFactorRef{"hepatitis_b", 0}, WFactorRef{"aflatoxin", 0}};
  interaction.coefficient = 0.7;
  terms.push_back(interaction);
  return terms;
}

}  // namespace

const CharacteristicSchema& default_schema() {
  static const CharacteristicSchema schema = make_default_schema();
  return schema;
}

const RiskModel& default_risk_model() {
  static const RiskModel model = [] {
    RiskModel m;
    m.terms = default_risk_terms();
    m.intercept = calibrate_intercept(default_schema(), m.terms,
                                      kDefaultPrevalence, kCalibrationSeed);
    return m;
  }();
  return model;
}

}  // namespace modsel
