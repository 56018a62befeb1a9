#include "modsel/features.hpp"

#include <cmath>
#include <ostream>

#include "modsel/errors.hpp"

namespace modsel {

std::string x_token(const XVariable& x) {
  switch (x.form) {
    case XVariable::Form::kConstant:
      return "1";
    case XVariable::Form::kSingle:
      return "w" + std::to_string(x.w_a);
    case XVariable::Form::kCross:
      return "w" + std::to_string(x.w_a) + "w" + std::to_string(x.w_b);
  }
  return {};
}

std::vector<WVariable> expand_characteristics(const CharacteristicSchema& schema) {
  schema.validate();
  std::vector<WVariable> w_vars;
  int index = 1;
  for (std::size_t pos = 0; pos < schema.characteristics.size(); ++pos) {
    const auto& ch = schema.characteristics[pos];
    if (ch.is_continuous()) {
      WVariable w;
      w.index = index++;
      w.characteristic = static_cast<int>(pos);
      w.source = ch.name;
      w.kind = WKind::kContinuous;
      w.offset = ch.continuous().standardize_offset();
      w.scale = ch.continuous().standardize_scale();
      w_vars.push_back(std::move(w));
    } else {
      const int count = ch.categorical().category_count;
      for (int cat = 1; cat < count; ++cat) {
        WVariable w;
        w.index = index++;
        w.characteristic = static_cast<int>(pos);
        w.source = ch.name;
        w.category = cat;
        w.kind = WKind::kIndicator;
        w_vars.push_back(std::move(w));
      }
    }
  }
  return w_vars;
}

std::set<WPair> same_source_pairs(const std::vector<WVariable>& w_vars) {
  std::set<WPair> pairs;
  for (std::size_t i = 0; i < w_vars.size(); ++i)
    for (std::size_t j = i + 1; j < w_vars.size(); ++j)
      if (w_vars[i].characteristic == w_vars[j].characteristic)
        pairs.insert({w_vars[i].index, w_vars[j].index});
  return pairs;
}

VariableCatalog zipper_order(int w_count, const std::set<WPair>& excluded_pairs) {
  if (w_count < 1) throw ValidationError("zipper_order: w_count must be >= 1");
  for (const auto& [a, b] : excluded_pairs)
    if (!(1 <= a && a < b && b <= w_count))
      throw ValidationError("zipper_order: excluded pair (" +
                            std::to_string(a) + "," + std::to_string(b) +
                            ") outside 1.." + std::to_string(w_count));

  VariableCatalog catalog;
  catalog.w_count = w_count;
  int next = 0;
  const auto emit = [&catalog, &next](XVariable::Form form, int a, int b) {
    XVariable x;
    x.index = next++;
    x.form = form;
    x.w_a = a;
    x.w_b = b;
    catalog.entries.push_back(x);
  };

  emit(XVariable::Form::kConstant, 0, 0);
  int lo = 1, hi = w_count;
  bool take_low = true;
  while (lo <= hi) {
    const int anchor = take_low ? lo++ : hi--;
    emit(XVariable::Form::kSingle, anchor, 0);
    if (take_low) {
      for (int k = lo; k <= hi; ++k)
        if (!excluded_pairs.count({anchor, k}))
          emit(XVariable::Form::kCross, anchor, k);
    } else {
      for (int k = hi; k >= lo; --k)
        if (!excluded_pairs.count({k, anchor}))
          emit(XVariable::Form::kCross, k, anchor);
    }
    take_low = !take_low;
  }
  return catalog;
}

VariableCatalog build_catalog(const CharacteristicSchema& schema) {
  auto w_vars = expand_characteristics(schema);
  auto catalog = zipper_order(static_cast<int>(w_vars.size()),
                              same_source_pairs(w_vars));
  catalog.w_vars = std::move(w_vars);
  return catalog;
}

double w_value(const WVariable& w, const Individual& individual) {
  const double v = individual.values[w.characteristic];
  if (w.kind == WKind::kContinuous) return (v - w.offset) / w.scale;
  return std::lround(v) == w.category ? 1.0 : 0.0;
}

DesignMatrix build_design_matrix(const CaseControlDataset& dataset,
                                 const VariableCatalog& catalog,
                                 const std::vector<int>& selected) {
  if (dataset.rows.empty())
    throw DataError("build_design_matrix: dataset is empty");
  if (catalog.w_vars.size() != static_cast<std::size_t>(catalog.w_count))
    throw ValidationError(
        "build_design_matrix: catalog carries no w metadata; build it from a "
        "schema");
  for (int s : selected)
    if (s < 0 || s >= catalog.total())
      throw BoundsError("build_design_matrix: x index " + std::to_string(s) +
                        " outside 0.." + std::to_string(catalog.total() - 1));

  const auto rows = static_cast<Eigen::Index>(dataset.rows.size());
  const auto cols = static_cast<Eigen::Index>(selected.size());
  DesignMatrix design;
  design.matrix.resize(rows, cols);
  design.response.resize(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Individual& ind = dataset.rows[r];
    design.response[r] = ind.diseased ? 1.0 : 0.0;
    for (Eigen::Index c = 0; c < cols; ++c) {
      const XVariable& x = catalog.entries[selected[c]];
      switch (x.form) {
        case XVariable::Form::kConstant:
          design.matrix(r, c) = 1.0;
          break;
        case XVariable::Form::kSingle:
          design.matrix(r, c) = w_value(catalog.w_vars[x.w_a - 1], ind);
          break;
        case XVariable::Form::kCross:
          design.matrix(r, c) = w_value(catalog.w_vars[x.w_a - 1], ind) *
                                w_value(catalog.w_vars[x.w_b - 1], ind);
          break;
      }
    }
  }
  return design;
}

void write_catalog_csv(std::ostream& out, const VariableCatalog& catalog) {
  const auto source_of = [&catalog](int w) -> std::string {
    if (w < 1 || w > catalog.w_count ||
        catalog.w_vars.size() != static_cast<std::size_t>(catalog.w_count))
      return {};
    return catalog.w_vars[w - 1].source;
  };
  out << "x_index,form,w_a,w_b,source_a,source_b\n";
  for (const auto& x : catalog.entries) {
    switch (x.form) {
      case XVariable::Form::kConstant:
        out << x.index << ",constant,,,,\n";
        break;
      case XVariable::Form::kSingle:
        out << x.index << ",single," << x.w_a << ",," << source_of(x.w_a)
            << ",\n";
        break;
      case XVariable::Form::kCross:
        out << x.index << ",cross," << x.w_a << ',' << x.w_b << ','
            << source_of(x.w_a) << ',' << source_of(x.w_b) << '\n';
        break;
    }
  }
  if (!out) throw IoError("write_catalog_csv: write failed");
}

}  // namespace modsel
