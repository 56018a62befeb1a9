// Tests for forward stepup, backward elimination, and exhaustive search.
// Evaluation counts are checked against the closed-form sweep sums, and the
// search results are cross-checked with an independent mask enumeration.
// A parity-labeled factorial dataset exercises both stopping edges exactly:
// every subset there has identical SSE, so forward stops at once while
// backward strips the model to nothing.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "modsel/errors.hpp"
#include "modsel/features.hpp"
#include "modsel/linalg.hpp"
#include "modsel/stepwise.hpp"
#include "test_util.hpp"

using namespace modsel;

namespace {

long long forward_cost(int n, int added) {
  const int sweeps = added == n ? n : added + 1;
  long long cost = 0;
  for (int r = 0; r < sweeps; ++r) cost += n - r;
  return cost;
}

long long backward_cost(int n, int final_size) {
  long long cost = 0;
  for (int j = std::max(final_size, 1); j <= n; ++j) cost += j;
  return cost;
}

int count_action(const SelectionReport& report, TraceStep::Action action) {
  int count = 0;
  for (const auto& t : report.trace)
    if (t.action == action) ++count;
  return count;
}

// 16 rows over three binary characteristics: both copies of the full 2^3
// factorial, labeled by parity. Every column of every admissible model is
// uncorrelated with the parity response, so all subset SSEs coincide.
CaseControlDataset parity_dataset() {
  CaseControlDataset dataset;
  for (int copy = 0; copy < 2; ++copy) {
    for (int bits = 0; bits < 8; ++bits) {
      Individual ind;
      const int a = bits & 1, b = (bits >> 1) & 1, c = (bits >> 2) & 1;
      ind.values = {static_cast<double>(a), static_cast<double>(b),
                    static_cast<double>(c)};
      ind.diseased = ((a + b + c) % 2) == 1;
      dataset.rows.push_back(ind);
    }
  }
  dataset.case_count = 8;
  dataset.control_count = 8;
  return dataset;
}

}  // namespace

TEST_CASE("method names") {
  CHECK(method_name(Method::kForward) == "forward");
  CHECK(method_name(Method::kBackward) == "backward");
  CHECK(method_name(Method::kExhaustive) == "exhaustive");
  CHECK(method_name(Method::kAnnealer) == "asa");
}

TEST_CASE("evaluation counts follow the sweep sums on sampled datasets") {
  const auto schema = testutil::binary_schema(4);
  const auto catalog = build_catalog(schema);
  const int n = catalog.n_nonconstant();
  REQUIRE(n == 10);

  for (std::uint64_t seed : {11u, 23u, 37u, 58u, 71u}) {
    CAPTURE(seed);
    const auto risk =
        testutil::toy_risk(-3.5, {{"c1", 2.5}, {"c2", 2.0}, {"c3", 0.7}});
    const auto dataset = testutil::toy_dataset(schema, risk, 600, seed);
    REQUIRE(static_cast<int>(dataset.rows.size()) > n + 1);
    const auto ctx = make_cp_context(dataset, catalog);

    const auto forward = forward_select(dataset, catalog, ctx);
    const int added = count_action(forward, TraceStep::Action::kAdd);
    CHECK(static_cast<int>(forward.selected.size()) == added);
    CHECK(forward.evaluations == forward_cost(n, added));
    CHECK(std::is_sorted(forward.selected.begin(), forward.selected.end()));
    CHECK(forward.cp ==
          doctest::Approx(fit_subset(dataset, catalog, forward.selected, ctx).cp)
              .epsilon(1e-12));
    REQUIRE_FALSE(forward.trace.empty());
    CHECK(forward.trace.back().action == TraceStep::Action::kStop);
    CHECK(forward.trace.back().evaluations == forward.evaluations);
    for (std::size_t i = 1; i + 1 < forward.trace.size(); ++i)
      CHECK(forward.trace[i].cp < forward.trace[i - 1].cp);

    const auto backward = backward_select(dataset, catalog, ctx);
    const int deleted = count_action(backward, TraceStep::Action::kDelete);
    const int final_size = static_cast<int>(backward.selected.size());
    CHECK(final_size == n - deleted);
    CHECK(backward.evaluations == backward_cost(n, final_size));
    CHECK(std::is_sorted(backward.selected.begin(), backward.selected.end()));
    CHECK(backward.cp ==
          doctest::Approx(
              fit_subset(dataset, catalog, backward.selected, ctx).cp)
              .epsilon(1e-12));
    CHECK(backward.trace.back().action == TraceStep::Action::kStop);

    // The full enumeration is the optimality oracle for both.
    const auto best = exhaustive_best_subset(dataset, catalog, ctx, n);
    CHECK(best.evaluations == 1024);  // sum of C(10,k) over all k
    CHECK(best.cp <= forward.cp + 1e-12);
    CHECK(best.cp <= backward.cp + 1e-12);
    CHECK(best.cp ==
          doctest::Approx(fit_subset(dataset, catalog, best.selected, ctx).cp)
              .epsilon(1e-12));
  }
}

TEST_CASE("exhaustive search agrees with a direct mask sweep") {
  const auto schema = testutil::binary_schema(3);
  const auto catalog = build_catalog(schema);
  const int n = catalog.n_nonconstant();
  REQUIRE(n == 6);
  const auto risk = testutil::toy_risk(-2.5, {{"c1", 2.0}, {"c3", 1.0}});
  const auto dataset = testutil::toy_dataset(schema, risk, 500, 99);
  const auto ctx = make_cp_context(dataset, catalog);

  double best_cp = std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<int> subset;
    for (int v = 1; v <= n; ++v)
      if (mask & (1 << (v - 1))) subset.push_back(v);
    best_cp =
        std::min(best_cp, fit_subset(dataset, catalog, subset, ctx).cp);
  }

  const auto report = exhaustive_best_subset(dataset, catalog, ctx, n);
  CHECK(report.evaluations == 64);
  CHECK(report.cp == doctest::Approx(best_cp).epsilon(1e-12));

  // Restricting the size can only keep or worsen the optimum.
  const auto small = exhaustive_best_subset(dataset, catalog, ctx, 2);
  CHECK(small.evaluations == 1 + 6 + 15);
  CHECK(small.cp >= report.cp - 1e-12);
  CHECK(static_cast<int>(small.selected.size()) <= 2);
}

TEST_CASE("exhaustive subset counting matches the binomial sum") {
  const auto schema = testutil::binary_schema(4);
  const auto catalog = build_catalog(schema);
  const auto risk = testutil::toy_risk(-2.0, {{"c1", 2.0}});
  const auto dataset = testutil::toy_dataset(schema, risk, 600, 5);
  const auto ctx = make_cp_context(dataset, catalog);

  // n = 10, max_p = 3: 1 + 10 + 45 + 120.
  const auto capped = exhaustive_best_subset(dataset, catalog, ctx, 3);
  CHECK(capped.evaluations == 176);

  const auto constant_only = exhaustive_best_subset(dataset, catalog, ctx, 0);
  CHECK(constant_only.evaluations == 1);
  CHECK(constant_only.selected.empty());
  CHECK(constant_only.cp ==
        doctest::Approx(fit_subset(dataset, catalog, {}, ctx).cp)
            .epsilon(1e-12));
}

TEST_CASE("exhaustive search prices the budget before evaluating") {
  // A huge ordering (60 w-variables expand to 1830 catalog entries) with no
  // w metadata attached: any attempted fit would throw a different error, so
  // seeing BudgetError proves nothing was evaluated.
  const auto catalog = zipper_order(60, {});
  CaseControlDataset dataset;
  Individual ind;
  ind.values = {0.0};
  dataset.rows.push_back(ind);
  dataset.case_count = 1;
  CpContext ctx;
  ctx.n_total = catalog.n_nonconstant();
  ctx.m_obs = 2000;
  ctx.sigma2_hat = 1.0;

  CHECK_THROWS_AS(exhaustive_best_subset(dataset, catalog, ctx, 6),
                  BudgetError);
  CHECK_THROWS_AS(exhaustive_best_subset(dataset, catalog, ctx, 60),
                  BudgetError);
  CHECK_THROWS_AS(exhaustive_best_subset(dataset, catalog, ctx, -1),
                  DomainError);
  CHECK_THROWS_AS(
      exhaustive_best_subset(dataset, catalog, ctx, catalog.total()),
      DomainError);
}

TEST_CASE("parity data stops forward at once and empties backward") {
  const auto schema = testutil::binary_schema(3);
  const auto catalog = build_catalog(schema);
  const int n = catalog.n_nonconstant();
  const auto dataset = parity_dataset();
  const auto ctx = make_cp_context(dataset, catalog);

  // All subset SSEs equal the total sum of squares, so the constant-only
  // model is the Cp optimum and additions only pay the size penalty.
  const auto forward = forward_select(dataset, catalog, ctx);
  CHECK(forward.selected.empty());
  CHECK(forward.evaluations == n);  // one full sweep, nothing improved
  CHECK(forward.trace.size() == 1);
  CHECK(forward.trace[0].action == TraceStep::Action::kStop);

  // sigma2_hat = 4/9 and SST = 4: Cp(empty) = (4/15 - 4/9) * 6 / (4/9).
  CHECK(forward.cp == doctest::Approx(-2.4).epsilon(1e-9));

  const auto backward = backward_select(dataset, catalog, ctx);
  CHECK(backward.selected.empty());
  CHECK(backward.evaluations == backward_cost(n, 0));  // 21 for n = 6
  CHECK(backward.cp == doctest::Approx(-2.4).epsilon(1e-9));
  CHECK(count_action(backward, TraceStep::Action::kDelete) == n);
}

TEST_CASE("ties resolve to the lowest x index") {
  const auto schema = testutil::binary_schema(3);
  const auto catalog = build_catalog(schema);

  // c1 and c2 agree on every row, so the w1 and w2 columns are identical and
  // their single-variable fits tie bit for bit. The signal rides on them.
  CaseControlDataset dataset;
  for (int i = 0; i < 24; ++i) {
    Individual ind;
    const int a = i % 2;
    const int c = (i / 2) % 2;
    ind.values = {static_cast<double>(a), static_cast<double>(a),
                  static_cast<double>(c)};
    ind.diseased = (i < 20) ? a == 1 : a == 0;  // four label flips
    dataset.rows.push_back(ind);
  }
  dataset.case_count = 12;
  dataset.control_count = 12;

  const auto ctx = make_cp_context(dataset, catalog);
  const auto forward = forward_select(dataset, catalog, ctx);
  REQUIRE_FALSE(forward.trace.empty());
  REQUIRE(forward.trace[0].action == TraceStep::Action::kAdd);
  // w1 sits at x=1; its duplicates w1w2 and w2 tie and must lose.
  CHECK(forward.trace[0].x_index == 1);

  const auto best = exhaustive_best_subset(dataset, catalog, ctx,
                                           catalog.n_nonconstant());
  REQUIRE_FALSE(best.selected.empty());
  CHECK(best.selected[0] == 1);
}

TEST_CASE("trace CSV golden bytes") {
  SelectionReport report;
  report.trace.push_back({1, TraceStep::Action::kAdd, 5, 1.25, 60});
  report.trace.push_back({2, TraceStep::Action::kDelete, 3, -0.5, 120});
  report.trace.push_back({3, TraceStep::Action::kStop, -1, -0.5, 120});

  std::ostringstream out;
  write_trace_csv(out, report);
  CHECK(out.str() ==
        "step,action,x_index,cp,evaluations\n"
        "1,add,5,1.250000,60\n"
        "2,delete,3,-0.500000,120\n"
        "3,stop,,-0.500000,120\n");
}
