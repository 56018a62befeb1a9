#include "modsel/annealer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <string>

#include "modsel/errors.hpp"

namespace modsel {

namespace {

constexpr double kEpsilon = 1e-12;  // sensitivity / cost-temperature floor

double now_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

void AnnealerConfig::validate() const {
  if (p_slots < 1)
    throw ValidationError("annealer: p_slots must be >= 1, got " +
                          std::to_string(p_slots));
  if (!std::isfinite(initial_param_temp) || initial_param_temp <= 0.0)
    throw ValidationError("annealer: initial_param_temp must be positive");
  if (initial_cost_temp &&
      (!std::isfinite(*initial_cost_temp) || *initial_cost_temp <= 0.0))
    throw ValidationError("annealer: initial_cost_temp must be positive");
  if (!(temp_ratio_scale > 0.0) || !(temp_ratio_scale < 1.0))
    throw ValidationError(
        "annealer: temp_ratio_scale must lie strictly between 0 and 1");
  if (reanneal_interval < 1)
    throw ValidationError("annealer: reanneal_interval must be >= 1");
  if (max_evaluations < 1)
    throw ValidationError("annealer: max_evaluations must be >= 1");
  if (stall_limit < 0)
    throw ValidationError("annealer: stall_limit must be >= 0");
}

SubsetObjective::SubsetObjective(const CaseControlDataset& dataset,
                                 const VariableCatalog& catalog,
                                 const CpContext& ctx)
    : dataset_(&dataset), catalog_(&catalog), ctx_(ctx) {
  ctx_.validate();
}

std::vector<int> SubsetObjective::collapse(const std::vector<int>& z) {
  std::vector<int> s = z;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

double SubsetObjective::operator()(const std::vector<int>& z) {
  for (int zi : z)
    if (zi < 1 || zi > n())
      throw BoundsError("subset objective: z component " + std::to_string(zi) +
                        " outside 1.." + std::to_string(n()));
  std::vector<int> key = collapse(z);
  if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
  const double cp = fit_subset(*dataset_, *catalog_, key, ctx_).cp;
  ++evaluations_;
  cache_.emplace(std::move(key), cp);
  return cp;
}

std::optional<double> SubsetObjective::known(const std::vector<int>& z) const {
  for (int zi : z)
    if (zi < 1 || zi > n())
      throw BoundsError("subset objective: z component " + std::to_string(zi) +
                        " outside 1.." + std::to_string(n()));
  const auto it = cache_.find(collapse(z));
  if (it == cache_.end()) return std::nullopt;
  return it->second;
}

double asa_step(double u, double t) {
  if (!(u > 0.0) || !(u < 1.0))
    throw DomainError("asa_step: u must lie strictly inside (0,1)");
  if (!(t >= 0.0)) throw DomainError("asa_step: negative temperature");
  if (t < 1e-300) return 0.0;  // frozen; 1/t would overflow
  const double sign = u < 0.5 ? -1.0 : 1.0;
  return sign * t * (std::pow(1.0 + 1.0 / t, std::abs(2.0 * u - 1.0)) - 1.0);
}

double anneal_schedule(double k, double t0, int d, double temp_ratio_scale) {
  if (!(k >= 0.0)) throw DomainError("anneal_schedule: k must be >= 0");
  if (!(t0 > 0.0)) throw DomainError("anneal_schedule: t0 must be positive");
  if (d < 1) throw DomainError("anneal_schedule: d must be >= 1");
  if (!(temp_ratio_scale > 0.0) || !(temp_ratio_scale < 1.0))
    throw DomainError("anneal_schedule: temp_ratio_scale outside (0,1)");
  const double c = -std::log(temp_ratio_scale);
  return t0 * std::exp(-c * std::pow(k, 1.0 / d));
}

double schedule_inverse(double t, double t0, int d, double temp_ratio_scale) {
  if (!(t0 > 0.0)) throw DomainError("schedule_inverse: t0 must be positive");
  if (d < 1) throw DomainError("schedule_inverse: d must be >= 1");
  if (!(temp_ratio_scale > 0.0) || !(temp_ratio_scale < 1.0))
    throw DomainError("schedule_inverse: temp_ratio_scale outside (0,1)");
  if (!(t > 0.0) || t > t0)
    throw DomainError("schedule_inverse: t must lie in (0, t0]");
  const double c = -std::log(temp_ratio_scale);
  return std::pow(std::log(t0 / t) / c, static_cast<double>(d));
}

std::vector<int> generate_candidate(const AnnealerState& state, int n,
                                    Rng& rng) {
  const std::size_t d = state.current_z.size();
  std::vector<int> proposal(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double t = state.param_temps[i];
    int z = 0;
    for (int attempt = 0; attempt <= 100; ++attempt) {
      const double y = asa_step(rng.next_open(), t);
      z = static_cast<int>(
          std::nearbyint(state.current_z[i] + y * (n - 1)));
      if (1 <= z && z <= n) break;
      if (attempt == 100) z = std::clamp(z, 1, n);
    }
    proposal[i] = z;
  }
  return proposal;
}

bool accept_move(double delta_cost, double cost_temp, Rng& rng) {
  if (!(cost_temp > 0.0))
    throw DomainError("accept_move: cost_temp must be positive");
  if (delta_cost <= 0.0) return true;
  // exp underflow to 0 at huge delta/temperature ratios rejects naturally.
  return rng.next_double() < std::exp(-delta_cost / cost_temp);
}

void reanneal(AnnealerState& state, const CostFn& cost, int n,
              const AnnealerConfig& config) {
  const int d = static_cast<int>(state.current_z.size());
  const double t0 = config.initial_param_temp;
  const double baseline = state.best_cost;

  // Probe one unit either side of the incumbent along each dimension; the
  // sensitivity is the larger cost deviation. Probes share the run cache,
  // so repeat visits cost nothing.
  std::vector<double> sensitivity(static_cast<std::size_t>(d), 0.0);
  double probe_best = baseline;
  std::vector<int> probe_best_z;
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (const int direction : {1, -1}) {
      std::vector<int> probe = state.best_z;
      const int moved =
          std::clamp(probe[static_cast<std::size_t>(i)] + direction, 1, n);
      if (moved == probe[static_cast<std::size_t>(i)]) continue;
      probe[static_cast<std::size_t>(i)] = moved;
      const double probe_cost = cost(probe);
      s = std::max(s, std::abs(probe_cost - baseline));
      if (probe_cost < probe_best) {
        probe_best = probe_cost;
        probe_best_z = probe;
      }
    }
    sensitivity[static_cast<std::size_t>(i)] = s;
  }

  const double s_max =
      *std::max_element(sensitivity.begin(), sensitivity.end());
  if (s_max > 0.0) {
    for (int i = 0; i < d; ++i) {
      const double factor =
          s_max / std::max(sensitivity[static_cast<std::size_t>(i)], kEpsilon);
      double& temp = state.param_temps[static_cast<std::size_t>(i)];
      temp = std::min(temp * factor, t0);
      state.k_steps[static_cast<std::size_t>(i)] =
          schedule_inverse(temp, t0, d, config.temp_ratio_scale);
    }
  }

  // Restart the acceptance schedule around the incumbent-to-current spread.
  state.cost_temp0 = std::max(std::abs(baseline - state.current_cost), kEpsilon);
  state.k_cost = 0.0;
  state.cost_temp = state.cost_temp0;

  if (!probe_best_z.empty()) {
    state.best_z = std::move(probe_best_z);
    state.best_cost = probe_best;
  }
}

namespace detail {

AnnealerResult run_annealer_impl(SubsetObjective& objective,
                                 const AnnealerConfig& config,
                                 const ProposalFn& propose) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const int n = objective.n();
  const int d = config.p_slots;
  Rng rng(config.seed);

  AnnealerResult out;
  AnnealerState st;
  st.current_z.resize(static_cast<std::size_t>(d));
  for (auto& z : st.current_z)
    z = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
  st.current_cost = objective(st.current_z);
  st.best_z = st.current_z;
  st.best_cost = st.current_cost;
  st.param_temps.assign(static_cast<std::size_t>(d),
                        config.initial_param_temp);
  st.k_steps.assign(static_cast<std::size_t>(d), 0.0);
  st.cost_temp0 = config.initial_cost_temp
                      ? *config.initial_cost_temp
                      : std::abs(st.current_cost) + 1.0;
  st.cost_temp = st.cost_temp0;
  st.k_cost = 0.0;
  out.anneal_trace.push_back(
      {objective.evaluations(), st.best_cost, st.cost_temp});

  long long stall = 0;
  long long since_reanneal = 0;
  while (stall < config.stall_limit &&
         objective.evaluations() < config.max_evaluations) {
    std::vector<int> candidate = propose(st, n, rng);
    ++st.generated;

    const long long before = objective.evaluations();
    const double candidate_cost = objective(candidate);
    const bool fresh = objective.evaluations() != before;
    bool improved = false;
    if (candidate_cost < st.best_cost) {
      st.best_cost = candidate_cost;
      st.best_z = candidate;
      improved = true;
    }
    if (fresh)
      out.anneal_trace.push_back(
          {objective.evaluations(), st.best_cost, st.cost_temp});
    stall = improved ? 0 : stall + 1;

    if (accept_move(candidate_cost - st.current_cost, st.cost_temp, rng)) {
      st.current_z = std::move(candidate);
      st.current_cost = candidate_cost;
      ++st.accepted;
      ++since_reanneal;
      st.k_cost += 1.0;
      st.cost_temp =
          anneal_schedule(st.k_cost, st.cost_temp0, d, config.temp_ratio_scale);
    }

    for (int i = 0; i < d; ++i) {
      double& k = st.k_steps[static_cast<std::size_t>(i)];
      k += 1.0;
      st.param_temps[static_cast<std::size_t>(i)] = anneal_schedule(
          k, config.initial_param_temp, d, config.temp_ratio_scale);
    }

    if (since_reanneal >= config.reanneal_interval) {
      since_reanneal = 0;
      // Worst case the probes all miss: 2 per dimension. Skip if the budget
      // cannot absorb that.
      if (config.max_evaluations - objective.evaluations() >= 2LL * d + 1) {
        const double before_best = st.best_cost;
        reanneal(
            st, [&objective](const std::vector<int>& z) { return objective(z); },
            n, config);
        if (st.best_cost < before_best) stall = 0;
        out.anneal_trace.push_back(
            {objective.evaluations(), st.best_cost, st.cost_temp});
      }
    }
  }

  out.generated = st.generated;
  out.accepted = st.accepted;
  out.report.method = Method::kAnnealer;
  out.report.selected = SubsetObjective::collapse(st.best_z);
  out.report.cp = st.best_cost;
  out.report.evaluations = objective.evaluations();
  out.report.trace.push_back({1, TraceStep::Action::kStop, -1, st.best_cost,
                              out.report.evaluations});
  out.report.wall_ms = now_ms(start);
  return out;
}

}  // namespace detail

AnnealerResult run_annealer_full(const CaseControlDataset& dataset,
                                 const VariableCatalog& catalog,
                                 const CpContext& ctx,
                                 const AnnealerConfig& config) {
  SubsetObjective objective(dataset, catalog, ctx);
  return detail::run_annealer_impl(
      objective, config,
      [](const AnnealerState& state, int n, Rng& rng) {
        return generate_candidate(state, n, rng);
      });
}

SelectionReport run_annealer(const CaseControlDataset& dataset,
                             const VariableCatalog& catalog,
                             const CpContext& ctx,
                             const AnnealerConfig& config) {
  return run_annealer_full(dataset, catalog, ctx, config).report;
}

void write_anneal_trace_csv(std::ostream& out,
                            const std::vector<AnnealTracePoint>& trace) {
  out << "evaluation,best_cp,cost_temp\n";
  char buf[128];
  for (const AnnealTracePoint& point : trace) {
    std::snprintf(buf, sizeof buf, "%lld,%.6f,%.9g\n", point.evaluation,
                  point.best_cp, point.cost_temp);
    out << buf;
  }
}

}  // namespace modsel
