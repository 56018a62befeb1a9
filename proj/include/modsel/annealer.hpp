#pragma once

// Adaptive simulated annealing over integer index vectors z in {1..n}^p.
// Each z names a multiset of nonconstant catalog variables; duplicates
// collapse to a set, so the effective model can be smaller than p. The
// objective is the Cp of the induced model, memoized by collapsed subset:
// the evaluation count reported everywhere is the number of cache misses,
// i.e. of genuine least-squares fits.

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "modsel/rng.hpp"
#include "modsel/stepwise.hpp"

namespace modsel {

struct AnnealerConfig {
  int p_slots = 7;
  double initial_param_temp = 1.0;
  // Unset: derived at run start as |Cp of the initial point| + 1.
  std::optional<double> initial_cost_temp;
  double temp_ratio_scale = 1e-5;  // decay c = -ln(scale); must be in (0,1)
  long long reanneal_interval = 100;  // accepted moves between reanneals
  long long max_evaluations = 5000;
  long long stall_limit = 1000;  // generated moves without a new best
  std::uint64_t seed = 0;

  void validate() const;
};

// Memoized duplicate-collapsing Cp objective. Not copyable cheaply; one
// instance per run keeps the cache (and therefore the miss count) per-run.
class SubsetObjective {
 public:
  SubsetObjective(const CaseControlDataset& dataset,
                  const VariableCatalog& catalog, const CpContext& ctx);

  // Collapses z, fits on a cache miss, returns Cp. BoundsError if any
  // component is outside [1, n].
  double operator()(const std::vector<int>& z);

  // Cache peek: the Cp if this subset was already fitted, without fitting
  // or counting anything.
  std::optional<double> known(const std::vector<int>& z) const;

  long long evaluations() const { return evaluations_; }
  int n() const { return catalog_->n_nonconstant(); }

  static std::vector<int> collapse(const std::vector<int>& z);

 private:
  const CaseControlDataset* dataset_;
  const VariableCatalog* catalog_;
  CpContext ctx_;
  std::map<std::vector<int>, double> cache_;
  long long evaluations_ = 0;
};

// Generating step at temperature t for a uniform draw u in (0,1):
//   y = sign(u - 1/2) * t * ((1 + 1/t)^|2u-1| - 1),   |y| < 1.
double asa_step(double u, double t);

// T(k) = t0 * exp(-c * k^(1/d)) with c = -ln(temp_ratio_scale).
double anneal_schedule(double k, double t0, int d, double temp_ratio_scale);

// Inverse of the above in k; anneal_schedule(schedule_inverse(t)) == t to
// high accuracy for t in (0, t0].
double schedule_inverse(double t, double t0, int d, double temp_ratio_scale);

struct AnnealerState {
  std::vector<int> current_z;
  double current_cost = 0.0;
  std::vector<int> best_z;
  double best_cost = 0.0;
  std::vector<double> param_temps;
  std::vector<double> k_steps;  // annealing time per dimension, fractional
                                // after reannealing
  double cost_temp = 0.0;
  double cost_temp0 = 0.0;  // schedule origin for cost_temp
  double k_cost = 0.0;
  long long accepted = 0;
  long long generated = 0;
};

// One proposal: per dimension, draw u on (0,1), step y = asa_step(u, T_i),
// z_i' = round(z_i + y * (n - 1)); out-of-range components are redrawn up
// to 100 times, then clamped into [1, n].
std::vector<int> generate_candidate(const AnnealerState& state, int n,
                                    Rng& rng);

// Metropolis rule: always accept improvements; otherwise accept with
// probability exp(-delta_cost / cost_temp). Draws from rng only on the
// probabilistic branch.
bool accept_move(double delta_cost, double cost_temp, Rng& rng);

// Cost lookup used by reannealing; the run loop passes the memoized
// objective, tests can pass anything.
using CostFn = std::function<double(const std::vector<int>&)>;

// Sensitivity-based temperature rescaling. Probes the incumbent one unit up
// and down per dimension (clamped into [1, n]), sets s_i to the larger cost
// deviation, rescales T_i by s_max / max(s_i, 1e-12) capped at t0,
// re-derives k_i through the schedule inverse, and restarts the cost
// schedule from max(|best - current|, 1e-12).
void reanneal(AnnealerState& state, const CostFn& cost, int n,
              const AnnealerConfig& config);

// evaluation,best_cp,cost_temp — one point for the initial evaluation, one
// per fresh (cache-missing) proposal, and one after each reanneal.
struct AnnealTracePoint {
  long long evaluation = 0;
  double best_cp = 0.0;
  double cost_temp = 0.0;
};

struct AnnealerResult {
  SelectionReport report;  // method kAnnealer; evaluations = cache misses
  std::vector<AnnealTracePoint> anneal_trace;
  long long generated = 0;
  long long accepted = 0;
};

AnnealerResult run_annealer_full(const CaseControlDataset& dataset,
                                 const VariableCatalog& catalog,
                                 const CpContext& ctx,
                                 const AnnealerConfig& config);

SelectionReport run_annealer(const CaseControlDataset& dataset,
                             const VariableCatalog& catalog,
                             const CpContext& ctx,
                             const AnnealerConfig& config);

void write_anneal_trace_csv(std::ostream& out,
                            const std::vector<AnnealTracePoint>& trace);

namespace detail {

// Test seam: inject a proposal source in place of generate_candidate.
using ProposalFn =
    std::function<std::vector<int>(const AnnealerState&, int, Rng&)>;

AnnealerResult run_annealer_impl(SubsetObjective& objective,
                                 const AnnealerConfig& config,
                                 const ProposalFn& propose);

}  // namespace detail

}  // namespace modsel
