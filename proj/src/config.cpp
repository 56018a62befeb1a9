#include "modsel/config.hpp"

#include <algorithm>
#include <fstream>
#include <string_view>

#include <json.hpp>

#include "modsel/errors.hpp"
#include "modsel/simulate.hpp"

namespace modsel {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError("config: " + where + ": " + what);
}

void check_keys(const Json& obj, const std::string& where,
                std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      fail(where, "unknown field \"" + key + "\"");
  }
}

const Json& require(const Json& obj, const std::string& where,
                    const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end())
    fail(where, std::string("missing field \"") + key + "\"");
  return *it;
}

double as_double(const Json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

long long as_integer(const Json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  return v.get<long long>();
}

bool as_bool(const Json& v, const std::string& where) {
  if (!v.is_boolean()) fail(where, "expected true or false");
  return v.get<bool>();
}

std::string as_string(const Json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

Characteristic parse_characteristic(const Json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  Characteristic ch;
  ch.name = as_string(require(j, where, "name"), where + ".name");
  const std::string kind = as_string(require(j, where, "kind"), where + ".kind");

  if (kind == "continuous") {
    check_keys(j, where,
               {"name", "kind", "distribution", "mean", "sd", "lower", "upper",
                "truncated"});
    ContinuousSpec spec;
    const std::string dist = as_string(require(j, where, "distribution"),
                                       where + ".distribution");
    if (dist == "normal") {
      spec.distribution = Distribution::kNormal;
      spec.mean = as_double(require(j, where, "mean"), where + ".mean");
      spec.sd = as_double(require(j, where, "sd"), where + ".sd");
      spec.truncated =
          j.contains("truncated") &&
          as_bool(j["truncated"], where + ".truncated");
      if (spec.truncated) {
        spec.lower = as_double(require(j, where, "lower"), where + ".lower");
        spec.upper = as_double(require(j, where, "upper"), where + ".upper");
      } else if (j.contains("lower") || j.contains("upper")) {
        fail(where, "lower/upper require \"truncated\": true on a normal");
      }
    } else if (dist == "uniform") {
      spec.distribution = Distribution::kUniform;
      spec.lower = as_double(require(j, where, "lower"), where + ".lower");
      spec.upper = as_double(require(j, where, "upper"), where + ".upper");
      if (j.contains("mean") || j.contains("sd") || j.contains("truncated"))
        fail(where, "mean/sd/truncated do not apply to a uniform");
    } else {
      fail(where + ".distribution", "must be \"normal\" or \"uniform\"");
    }
    ch.kind = spec;
  } else if (kind == "categorical") {
    check_keys(j, where,
               {"name", "kind", "category_count", "category_probabilities"});
    CategoricalSpec spec;
    spec.category_count = static_cast<int>(as_integer(
        require(j, where, "category_count"), where + ".category_count"));
    const Json& probs = require(j, where, "category_probabilities");
    if (!probs.is_array())
      fail(where + ".category_probabilities", "expected an array");
    for (const Json& p : probs)
      spec.category_probabilities.push_back(
          as_double(p, where + ".category_probabilities"));
    ch.kind = spec;
  } else {
    fail(where + ".kind", "must be \"continuous\" or \"categorical\"");
  }
  return ch;
}

WFactorRef parse_factor(const Json& j, const std::string& where) {
  WFactorRef ref;
  if (j.is_string()) {
    ref.characteristic = j.get<std::string>();
  } else if (j.is_object()) {
    check_keys(j, where, {"characteristic", "category"});
    ref.characteristic = as_string(require(j, where, "characteristic"),
                                   where + ".characteristic");
    if (j.contains("category"))
      ref.category =
          static_cast<int>(as_integer(j["category"], where + ".category"));
  } else {
    fail(where,
         "target entries are characteristic names or "
         "{characteristic, category} objects");
  }
  return ref;
}

RiskSpec parse_risk(const Json& j) {
  if (!j.is_object()) fail("risk", "expected an object");
  check_keys(j, "risk", {"intercept", "calibrate_to_prevalence", "terms"});
  RiskSpec risk;
  risk.specified = true;
  if (j.contains("intercept"))
    risk.intercept = as_double(j["intercept"], "risk.intercept");
  if (j.contains("calibrate_to_prevalence"))
    risk.calibrate_to_prevalence = as_double(
        j["calibrate_to_prevalence"], "risk.calibrate_to_prevalence");
  if (risk.intercept && risk.calibrate_to_prevalence)
    fail("risk", "give either intercept or calibrate_to_prevalence, not both");
  if (!risk.intercept && !risk.calibrate_to_prevalence)
    fail("risk", "one of intercept / calibrate_to_prevalence is required");
  if (j.contains("terms")) {
    const Json& terms = j["terms"];
    if (!terms.is_array()) fail("risk.terms", "expected an array");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string where = "risk.terms[" + std::to_string(i) + "]";
      const Json& t = terms[i];
      if (!t.is_object()) fail(where, "expected an object");
      check_keys(t, where, {"target", "coefficient"});
      RiskTerm term;
      const Json& target = require(t, where, "target");
      if (!target.is_array()) fail(where + ".target", "expected an array");
      for (const Json& f : target)
        term.target.push_back(parse_factor(f, where + ".target"));
      term.coefficient =
          as_double(require(t, where, "coefficient"), where + ".coefficient");
      risk.terms.push_back(std::move(term));
    }
  }
  return risk;
}

AnnealerConfig parse_annealer(const Json& j) {
  if (!j.is_object()) fail("annealer", "expected an object");
  check_keys(j, "annealer",
             {"p_slots", "initial_param_temp", "initial_cost_temp",
              "temp_ratio_scale", "reanneal_interval", "max_evaluations",
              "stall_limit", "seed"});
  AnnealerConfig a;
  if (j.contains("p_slots"))
    a.p_slots =
        static_cast<int>(as_integer(j["p_slots"], "annealer.p_slots"));
  if (j.contains("initial_param_temp"))
    a.initial_param_temp =
        as_double(j["initial_param_temp"], "annealer.initial_param_temp");
  if (j.contains("initial_cost_temp") && !j["initial_cost_temp"].is_null())
    a.initial_cost_temp =
        as_double(j["initial_cost_temp"], "annealer.initial_cost_temp");
  if (j.contains("temp_ratio_scale"))
    a.temp_ratio_scale =
        as_double(j["temp_ratio_scale"], "annealer.temp_ratio_scale");
  if (j.contains("reanneal_interval"))
    a.reanneal_interval =
        as_integer(j["reanneal_interval"], "annealer.reanneal_interval");
  if (j.contains("max_evaluations"))
    a.max_evaluations =
        as_integer(j["max_evaluations"], "annealer.max_evaluations");
  if (j.contains("stall_limit"))
    a.stall_limit = as_integer(j["stall_limit"], "annealer.stall_limit");
  if (j.contains("seed")) {
    const Json& s = j["seed"];
    if (!s.is_number_unsigned() &&
        !(s.is_number_integer() && s.get<long long>() >= 0))
      fail("annealer.seed", "expected a nonnegative integer");
    a.seed = s.get<std::uint64_t>();
  }
  a.validate();
  return a;
}

Json factor_to_json(const WFactorRef& ref) {
  if (ref.category == 0) return Json(ref.characteristic);
  Json j;
  j["characteristic"] = ref.characteristic;
  j["category"] = ref.category;
  return j;
}

}  // namespace

ProjectConfig default_project_config() {
  ProjectConfig config;
  config.schema = default_schema();
  return config;
}

ProjectConfig load_config(std::istream& in) {
  Json root;
  try {
    root = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config: JSON parse failure: ") +
                          e.what());
  }
  if (!root.is_object()) fail("top level", "expected an object");
  check_keys(root, "top level", {"schema", "risk", "annealer"});

  ProjectConfig config = default_project_config();
  if (root.contains("schema")) {
    const Json& s = root["schema"];
    if (!s.is_object()) fail("schema", "expected an object");
    check_keys(s, "schema", {"characteristics"});
    const Json& list = require(s, "schema", "characteristics");
    if (!list.is_array()) fail("schema.characteristics", "expected an array");
    config.schema.characteristics.clear();
    for (std::size_t i = 0; i < list.size(); ++i)
      config.schema.characteristics.push_back(parse_characteristic(
          list[i], "schema.characteristics[" + std::to_string(i) + "]"));
    config.schema.validate();
  }
  if (root.contains("risk")) {
    config.risk = parse_risk(root["risk"]);
    // Check the targets resolve against the active schema right away; the
    // intercept value plays no part in that.
    RiskModel probe;
    probe.terms = config.risk.terms;
    probe.validate(config.schema);
  }
  if (root.contains("annealer"))
    config.annealer = parse_annealer(root["annealer"]);
  return config;
}

ProjectConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path);
  return load_config(in);
}

void save_config(std::ostream& out, const ProjectConfig& config) {
  Json root;

  Json characteristics = Json::array();
  for (const Characteristic& ch : config.schema.characteristics) {
    Json j;
    j["name"] = ch.name;
    if (ch.is_continuous()) {
      j["kind"] = "continuous";
      const ContinuousSpec& c = ch.continuous();
      if (c.distribution == Distribution::kNormal) {
        j["distribution"] = "normal";
        j["mean"] = c.mean;
        j["sd"] = c.sd;
        if (c.truncated) {
          j["truncated"] = true;
          j["lower"] = c.lower;
          j["upper"] = c.upper;
        }
      } else {
        j["distribution"] = "uniform";
        j["lower"] = c.lower;
        j["upper"] = c.upper;
      }
    } else {
      j["kind"] = "categorical";
      j["category_count"] = ch.categorical().category_count;
      j["category_probabilities"] = ch.categorical().category_probabilities;
    }
    characteristics.push_back(std::move(j));
  }
  root["schema"]["characteristics"] = std::move(characteristics);

  if (config.risk.specified) {
    Json r;
    if (config.risk.intercept) r["intercept"] = *config.risk.intercept;
    if (config.risk.calibrate_to_prevalence)
      r["calibrate_to_prevalence"] = *config.risk.calibrate_to_prevalence;
    Json terms = Json::array();
    for (const RiskTerm& term : config.risk.terms) {
      Json t;
      Json target = Json::array();
      for (const WFactorRef& ref : term.target)
        target.push_back(factor_to_json(ref));
      t["target"] = std::move(target);
      t["coefficient"] = term.coefficient;
      terms.push_back(std::move(t));
    }
    r["terms"] = std::move(terms);
    root["risk"] = std::move(r);
  }

  Json a;
  a["p_slots"] = config.annealer.p_slots;
  a["initial_param_temp"] = config.annealer.initial_param_temp;
  if (config.annealer.initial_cost_temp)
    a["initial_cost_temp"] = *config.annealer.initial_cost_temp;
  a["temp_ratio_scale"] = config.annealer.temp_ratio_scale;
  a["reanneal_interval"] = config.annealer.reanneal_interval;
  a["max_evaluations"] = config.annealer.max_evaluations;
  a["stall_limit"] = config.annealer.stall_limit;
  a["seed"] = config.annealer.seed;
  root["annealer"] = std::move(a);

  out << root.dump(2) << "\n";
}

RiskModel resolve_risk(const CharacteristicSchema& schema,
                       const RiskSpec& risk) {
  RiskModel model;
  if (!risk.specified) {
    model = default_risk_model();
  } else {
    model.terms = risk.terms;
    if (risk.intercept)
      model.intercept = *risk.intercept;
    else
      model.intercept = calibrate_intercept(
          schema, model.terms, *risk.calibrate_to_prevalence, kCalibrationSeed);
  }
  model.validate(schema);
  return model;
}

}  // namespace modsel
