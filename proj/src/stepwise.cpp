#include "modsel/stepwise.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

#include "modsel/errors.hpp"

namespace modsel {

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string format_fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void insert_sorted(std::vector<int>& selection, int x) {
  selection.insert(std::upper_bound(selection.begin(), selection.end(), x), x);
}

}  // namespace

std::string method_name(Method method) {
  switch (method) {
    case Method::kForward:
      return "forward";
    case Method::kBackward:
      return "backward";
    case Method::kExhaustive:
      return "exhaustive";
    case Method::kAnnealer:
      return "asa";
  }
  throw DomainError("method_name: unknown method");
}

SelectionReport forward_select(const CaseControlDataset& dataset,
                               const VariableCatalog& catalog,
                               const CpContext& ctx) {
  ctx.validate();
  const Stopwatch watch;
  SelectionReport report;
  report.method = Method::kForward;

  const int total = catalog.total();
  std::vector<char> in_model(static_cast<std::size_t>(total), 0);
  std::vector<int> selected;
  // Baseline: the constant-only model. Not counted as an evaluation; the
  // count contract covers candidate sweeps only.
  double current_cp = fit_subset(dataset, catalog, {}, ctx).cp;

  int step = 0;
  while (static_cast<int>(selected.size()) < catalog.n_nonconstant()) {
    int best_x = -1;
    double best_cp = std::numeric_limits<double>::infinity();
    for (int x = 1; x < total; ++x) {
      if (in_model[static_cast<std::size_t>(x)]) continue;
      std::vector<int> candidate = selected;
      insert_sorted(candidate, x);
      const double cp = fit_subset(dataset, catalog, candidate, ctx).cp;
      ++report.evaluations;
      if (cp < best_cp) {  // strict: ties keep the lowest x index
        best_cp = cp;
        best_x = x;
      }
    }
    if (best_x < 0 || !(best_cp < current_cp)) break;
    insert_sorted(selected, best_x);
    in_model[static_cast<std::size_t>(best_x)] = 1;
    current_cp = best_cp;
    report.trace.push_back({++step, TraceStep::Action::kAdd, best_x, best_cp,
                            report.evaluations});
  }

  report.selected = std::move(selected);
  report.cp = current_cp;
  report.trace.push_back(
      {++step, TraceStep::Action::kStop, -1, current_cp, report.evaluations});
  report.wall_ms = watch.elapsed_ms();
  return report;
}

SelectionReport backward_select(const CaseControlDataset& dataset,
                                const VariableCatalog& catalog,
                                const CpContext& ctx) {
  ctx.validate();
  const Stopwatch watch;
  SelectionReport report;
  report.method = Method::kBackward;

  std::vector<int> selected(
      static_cast<std::size_t>(catalog.n_nonconstant()));
  std::iota(selected.begin(), selected.end(), 1);
  // Baseline full model, uncounted; its Cp equals n_total by construction.
  double current_cp = fit_subset(dataset, catalog, selected, ctx).cp;

  int step = 0;
  while (!selected.empty()) {
    std::size_t best_pos = 0;
    double best_cp = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t i = 0; i < selected.size(); ++i) {
      std::vector<int> candidate = selected;
      candidate.erase(candidate.begin() + static_cast<std::ptrdiff_t>(i));
      const double cp = fit_subset(dataset, catalog, candidate, ctx).cp;
      ++report.evaluations;
      if (cp < best_cp) {  // strict: ties delete the lowest x index
        best_cp = cp;
        best_pos = i;
        found = true;
      }
    }
    if (!found || !(best_cp < current_cp)) break;
    const int removed = selected[best_pos];
    selected.erase(selected.begin() + static_cast<std::ptrdiff_t>(best_pos));
    current_cp = best_cp;
    report.trace.push_back({++step, TraceStep::Action::kDelete, removed,
                            best_cp, report.evaluations});
  }

  report.selected = std::move(selected);
  report.cp = current_cp;
  report.trace.push_back(
      {++step, TraceStep::Action::kStop, -1, current_cp, report.evaluations});
  report.wall_ms = watch.elapsed_ms();
  return report;
}

SelectionReport exhaustive_best_subset(const CaseControlDataset& dataset,
                                       const VariableCatalog& catalog,
                                       const CpContext& ctx, int max_p) {
  ctx.validate();
  const int n = catalog.n_nonconstant();
  if (max_p < 0 || max_p > n)
    throw DomainError("exhaustive_best_subset: max_p " +
                      std::to_string(max_p) + " outside 0.." +
                      std::to_string(n));

  // Price the enumeration before doing any of it.
  long double planned = 0.0L;
  {
    long double binom = 1.0L;  // C(n, 0)
    for (int k = 0; k <= max_p; ++k) {
      planned += binom;
      binom = binom * (n - k) / (k + 1);
    }
  }
  if (planned > static_cast<long double>(kExhaustiveBudget))
    throw BudgetError("exhaustive_best_subset: " +
                      std::to_string(static_cast<double>(planned)) +
                      " subsets exceed the budget of " +
                      std::to_string(kExhaustiveBudget));

  const Stopwatch watch;
  SelectionReport report;
  report.method = Method::kExhaustive;

  std::vector<int> best;
  double best_cp = std::numeric_limits<double>::infinity();
  const auto consider = [&](const std::vector<int>& subset) {
    const double cp = fit_subset(dataset, catalog, subset, ctx).cp;
    ++report.evaluations;
    // Strict: size-then-lex enumeration order makes the first minimum the
    // smallest, lexicographically earliest optimum.
    if (cp < best_cp) {
      best_cp = cp;
      best = subset;
    }
  };

  consider({});
  for (int k = 1; k <= max_p; ++k) {
    std::vector<int> comb(static_cast<std::size_t>(k));
    std::iota(comb.begin(), comb.end(), 1);
    for (;;) {
      consider(comb);
      int i = k - 1;
      while (i >= 0 && comb[static_cast<std::size_t>(i)] == n - (k - 1 - i))
        --i;
      if (i < 0) break;
      ++comb[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j)
        comb[static_cast<std::size_t>(j)] =
            comb[static_cast<std::size_t>(j - 1)] + 1;
    }
  }

  report.selected = std::move(best);
  report.cp = best_cp;
  report.trace.push_back(
      {1, TraceStep::Action::kStop, -1, best_cp, report.evaluations});
  report.wall_ms = watch.elapsed_ms();
  return report;
}

void write_trace_csv(std::ostream& out, const SelectionReport& report) {
  out << "step,action,x_index,cp,evaluations\n";
  for (const TraceStep& t : report.trace) {
    const char* action = t.action == TraceStep::Action::kAdd      ? "add"
                         : t.action == TraceStep::Action::kDelete ? "delete"
                                                                  : "stop";
    out << t.step << ',' << action << ',';
    if (t.action != TraceStep::Action::kStop) out << t.x_index;
    out << ',' << format_fixed6(t.cp) << ',' << t.evaluations << '\n';
  }
}

}  // namespace modsel
