#pragma once

// Classical subset-selection strategies driven by the Cp statistic: forward
// stepup, backward elimination, and bounded exhaustive enumeration.
//
// Every strategy reports its cost as the number of least-squares fits it
// performed. The counting rules are part of the interface contract:
//   - forward: a sweep over the n-r remaining candidates costs n-r; the
//     constant-only baseline fit is not counted. Stopping after sweep s
//     from an empty start costs sum_{r=0}^{s-1} (n-r).
//   - backward: a sweep with j variables in the model costs j; the full-model
//     baseline is not counted (its Cp is identically n). Deleting from n
//     down to a final size of f costs sum_{j=f}^{n} j, or sum_{j=1}^{n} j
//     when the model empties completely.
//   - exhaustive: every subset of size 0..max_p costs exactly one fit,
//     the empty subset included: sum_{k=0}^{max_p} C(n,k).

#include <iosfwd>
#include <string>
#include <vector>

#include "modsel/linalg.hpp"

namespace modsel {

enum class Method { kForward, kBackward, kExhaustive, kAnnealer };

std::string method_name(Method method);

struct TraceStep {
  enum class Action { kAdd, kDelete, kStop };
  int step = 0;  // 1-based ordinal within the run
  Action action = Action::kStop;
  int x_index = -1;  // variable added/deleted; -1 for stop
  double cp = 0.0;   // model Cp after the action
  long long evaluations = 0;  // cumulative fits when the action was taken
};

struct SelectionReport {
  Method method = Method::kForward;
  std::vector<int> selected;  // sorted nonconstant x indices
  double cp = 0.0;
  long long evaluations = 0;
  std::vector<TraceStep> trace;
  double wall_ms = 0.0;
};

// Grows from the constant-only model, each sweep adding the candidate with
// the lowest Cp if that strictly improves on the current model; equal-best
// candidates resolve to the lowest x index. Stops on no strict improvement
// or when every variable is in the model.
SelectionReport forward_select(const CaseControlDataset& dataset,
                               const VariableCatalog& catalog,
                               const CpContext& ctx);

// Shrinks from the full model, each sweep deleting the variable whose
// removal gives the lowest Cp if that strictly improves; ties resolve to the
// lowest x index. Stops on no strict improvement or at the empty model.
SelectionReport backward_select(const CaseControlDataset& dataset,
                                const VariableCatalog& catalog,
                                const CpContext& ctx);

// Evaluates every subset of at most max_p variables, in order of size then
// lexicographic rank, keeping the first strict minimum. Throws BudgetError
// before evaluating anything if the subset count exceeds kExhaustiveBudget.
inline constexpr long long kExhaustiveBudget = 10'000'000;

SelectionReport exhaustive_best_subset(const CaseControlDataset& dataset,
                                       const VariableCatalog& catalog,
                                       const CpContext& ctx, int max_p);

// step,action,x_index,cp,evaluations — x_index empty on the stop row.
void write_trace_csv(std::ostream& out, const SelectionReport& report);

}  // namespace modsel
