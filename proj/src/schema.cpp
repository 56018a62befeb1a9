#include "modsel/schema.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "modsel/errors.hpp"

namespace modsel {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ValidationError(msg); }

void validate_continuous(const std::string& name, const ContinuousSpec& c) {
  if (c.distribution == Distribution::kNormal) {
    if (!std::isfinite(c.mean)) fail("characteristic '" + name + "': mean must be finite");
    if (!(c.sd > 0.0) || !std::isfinite(c.sd))
      fail("characteristic '" + name + "': sd must be positive and finite");
    if (c.truncated && !(c.lower < c.upper))
      fail("characteristic '" + name + "': truncation requires lower < upper");
  } else {
    if (!(c.lower < c.upper) || !std::isfinite(c.lower) || !std::isfinite(c.upper))
      fail("characteristic '" + name + "': uniform requires finite lower < upper");
  }
}

void validate_categorical(const std::string& name, const CategoricalSpec& c) {
  if (c.category_count < 2)
    fail("characteristic '" + name + "': category_count must be >= 2");
  if (static_cast<int>(c.category_probabilities.size()) != c.category_count)
    fail("characteristic '" + name +
         "': category_probabilities length must equal category_count");
  double sum = 0.0;
  for (double p : c.category_probabilities) {
    if (!(p >= 0.0) || !std::isfinite(p))
      fail("characteristic '" + name +
           "': category_probabilities entries must be nonnegative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    fail("characteristic '" + name +
         "': category_probabilities must sum to 1 within 1e-12");
}

}  // namespace

void CharacteristicSchema::validate() const {
  if (characteristics.empty()) fail("schema: characteristics must be nonempty");
  std::set<std::string> seen;
  for (const auto& ch : characteristics) {
    if (ch.name.empty()) fail("schema: characteristic name must be nonempty");
    if (ch.name.find_first_of(",\"\n") != std::string::npos)
      fail("characteristic '" + ch.name + "': name must not contain comma, quote or newline");
    if (!seen.insert(ch.name).second)
      fail("schema: duplicate characteristic name '" + ch.name + "'");
    if (ch.is_continuous())
      validate_continuous(ch.name, ch.continuous());
    else
      validate_categorical(ch.name, ch.categorical());
  }
}

int CharacteristicSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < characteristics.size(); ++i)
    if (characteristics[i].name == name) return static_cast<int>(i);
  return -1;
}

namespace {

// Resolves a factor reference against the schema; returns the characteristic
// position and normalizes the category (binary shortcut: omitted -> 1).
int resolve_factor(const CharacteristicSchema& schema, const WFactorRef& ref,
                   int* category_out) {
  const int pos = schema.index_of(ref.characteristic);
  if (pos < 0)
    fail("risk term: unknown characteristic '" + ref.characteristic + "'");
  const auto& ch = schema.characteristics[pos];
  int category = ref.category;
  if (ch.is_continuous()) {
    if (category != 0)
      fail("risk term: characteristic '" + ref.characteristic +
           "' is continuous; category must be omitted");
  } else {
    const int count = ch.categorical().category_count;
    if (category == 0) {
      if (count != 2)
        fail("risk term: characteristic '" + ref.characteristic +
             "' has " + std::to_string(count) +
             " categories; category must be given explicitly");
      category = 1;
    }
    if (category < 1 || category >= count)
      fail("risk term: characteristic '" + ref.characteristic +
           "': category " + std::to_string(category) +
           " outside 1.." + std::to_string(count - 1));
  }
  if (category_out) *category_out = category;
  return pos;
}

}  // namespace

void RiskModel::validate(const CharacteristicSchema& schema) const {
  if (!std::isfinite(intercept) && intercept != kNeverDiseased)
    fail("risk model: intercept must be finite or the -infinity sentinel");
  for (const auto& term : terms) {
    if (term.target.empty() || term.target.size() > 2)
      fail("risk term: target must name one or two factors");
    if (!std::isfinite(term.coefficient))
      fail("risk term: coefficient must be finite");
    int cat_a = 0;
    const int pos_a = resolve_factor(schema, term.target[0], &cat_a);
    if (term.target.size() == 2) {
      int cat_b = 0;
      const int pos_b = resolve_factor(schema, term.target[1], &cat_b);
      if (pos_a == pos_b && cat_a == cat_b)
        fail("risk term: pair target repeats the same factor");
      if (pos_a == pos_b)
        fail("risk term: pair target uses two indicators of '" +
             term.target[0].characteristic + "'; such a product is always zero");
    }
  }
}

}  // namespace modsel
