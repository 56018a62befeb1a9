#pragma once

// Expansion of schema characteristics into w-variables, the zipper-ordered
// x-variable catalog, and numeric design matrices.
//
// A continuous characteristic contributes one w-variable; a categorical
// characteristic with c categories contributes c-1 indicator w-variables
// (category 0 is the omitted reference). The x-catalog starts with the
// constant and then lists every single w and every admissible pairwise cross
// in the zipper order, which guarantees that consecutive entries share a
// common w-factor. That neighborhood structure is what the annealer's integer
// encoding exploits.

#include <iosfwd>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "modsel/schema.hpp"
#include "modsel/simulate.hpp"

namespace modsel {

enum class WKind { kContinuous, kIndicator };

struct WVariable {
  int index = 0;           // 1-based
  int characteristic = 0;  // position in the schema
  std::string source;      // characteristic name
  int category = 0;        // indicator category; 0 for continuous
  WKind kind = WKind::kContinuous;
  // Standardization for continuous variables; identity for indicators.
  double offset = 0.0;
  double scale = 1.0;
};

struct XVariable {
  enum class Form { kConstant, kSingle, kCross };
  int index = 0;  // 0-based catalog position
  Form form = Form::kConstant;
  int w_a = 0;  // single: the w index; cross: the lower w index
  int w_b = 0;  // cross: the higher w index
};

// Compact display form: "1", "w3", "w3w4". Used in catalog dumps and tests.
std::string x_token(const XVariable& x);

using WPair = std::pair<int, int>;  // unordered, stored with first < second

struct VariableCatalog {
  std::vector<XVariable> entries;  // entries[0] is the constant
  std::vector<WVariable> w_vars;   // w index i lives at w_vars[i-1]
  int w_count = 0;

  int total() const { return static_cast<int>(entries.size()); }
  int n_nonconstant() const { return total() - 1; }
};

// One WVariable per continuous characteristic, c-1 indicators per
// categorical one, in schema order then category order.
std::vector<WVariable> expand_characteristics(const CharacteristicSchema& schema);

// Pairs of indicators arising from the same characteristic; their cross
// products are identically zero and are excluded from the catalog.
std::set<WPair> same_source_pairs(const std::vector<WVariable>& w_vars);

// The zipper ordering over w indices 1..m. Anchors visit 1, m, 2, m-1, ...;
// each anchor emits its single and then its crosses with every not yet
// anchored partner, ascending for low anchors and descending for high ones.
// Excluded crosses are skipped in place with no index gaps. The returned
// catalog has no w metadata attached; use build_catalog for a full one.
VariableCatalog zipper_order(int w_count, const std::set<WPair>& excluded_pairs);

// expand + same-source exclusions + zipper, with w metadata attached.
VariableCatalog build_catalog(const CharacteristicSchema& schema);

// Value of one w-variable for one individual: standardized value for
// continuous, 0/1 for indicators.
double w_value(const WVariable& w, const Individual& individual);

struct DesignMatrix {
  Eigen::MatrixXd matrix;    // rows x |selected|
  Eigen::VectorXd response;  // diseased flags as 0.0/1.0
};

// Column j evaluates catalog entry selected[j] on every dataset row.
// Permuting `selected` permutes the columns identically.
DesignMatrix build_design_matrix(const CaseControlDataset& dataset,
                                 const VariableCatalog& catalog,
                                 const std::vector<int>& selected);

// Catalog documentation dump:
// x_index,form,w_a,w_b,source_a,source_b
void write_catalog_csv(std::ostream& out, const VariableCatalog& catalog);

}  // namespace modsel
