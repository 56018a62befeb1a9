#pragma once

// Declarative description of population characteristics and of the ground
// truth risk model used to afflict simulated individuals.

#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace modsel {

enum class Distribution { kUniform, kNormal };

struct ContinuousSpec {
  Distribution distribution = Distribution::kNormal;
  double mean = 0.0;  // normal location
  double sd = 1.0;    // normal scale
  // Uniform bounds, or truncation range for a truncated normal.
  double lower = 0.0;
  double upper = 1.0;
  bool truncated = false;  // normal only

  // Standardization applied before a continuous value enters a design
  // matrix: (v - offset) / scale. Derived from the declared distribution.
  double standardize_offset() const {
    return distribution == Distribution::kNormal ? mean
                                                 : 0.5 * (lower + upper);
  }
  double standardize_scale() const {
    return distribution == Distribution::kNormal ? sd
                                                 : 0.5 * (upper - lower);
  }
};

struct CategoricalSpec {
  int category_count = 2;
  std::vector<double> category_probabilities;  // simplex, one per category
};

struct Characteristic {
  std::string name;
  std::variant<ContinuousSpec, CategoricalSpec> kind;

  bool is_continuous() const {
    return std::holds_alternative<ContinuousSpec>(kind);
  }
  const ContinuousSpec& continuous() const {
    return std::get<ContinuousSpec>(kind);
  }
  const CategoricalSpec& categorical() const {
    return std::get<CategoricalSpec>(kind);
  }
};

struct CharacteristicSchema {
  std::vector<Characteristic> characteristics;

  // Throws ValidationError naming the offending field.
  void validate() const;

  // Position of a characteristic by name, or -1.
  int index_of(std::string_view name) const;
};

// Reference to one w-factor: a continuous characteristic (category == 0) or
// one indicator of a categorical characteristic (category in 1..count-1).
// For binary characteristics the category may be omitted; it resolves to 1.
struct WFactorRef {
  std::string characteristic;
  int category = 0;
};

// One additive log-odds contribution: coefficient times the product of one
// or two w-factor values. Continuous factors contribute their deviation from
// the declared standardization offset, in natural units (e.g. years).
struct RiskTerm {
  std::vector<WFactorRef> target;  // one or two factors
  double coefficient = 0.0;
};

struct RiskModel {
  // Baseline log-odds. -infinity is an accepted sentinel meaning "nobody
  // gets the disease" (probability clamps to zero).
  double intercept = 0.0;
  std::vector<RiskTerm> terms;

  void validate(const CharacteristicSchema& schema) const;
};

inline constexpr double kNeverDiseased =
    -std::numeric_limits<double>::infinity();

}  // namespace modsel
