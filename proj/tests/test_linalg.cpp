// Tests for least squares, the Cp statistic, and the subset-fitting path.
// The fitting oracle is an independent modified-Gram-Schmidt projection:
// the SSE of a subset fit equals the squared norm of the response after
// projecting out the selected columns, which never touches QR code.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "modsel/errors.hpp"
#include "modsel/features.hpp"
#include "modsel/linalg.hpp"
#include "modsel/rng.hpp"
#include "test_util.hpp"

using namespace modsel;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.next_normal();
  return m;
}

Eigen::VectorXd random_vector(Rng& rng, int rows) {
  Eigen::VectorXd v(rows);
  for (int r = 0; r < rows; ++r) v[r] = rng.next_normal();
  return v;
}

// SSE by projection: orthonormalize the chosen columns (two passes of
// modified Gram-Schmidt, dropping columns that are already in the span),
// subtract every component of y along the basis, return the leftover norm.
double projection_sse(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& y,
                      const std::vector<int>& cols) {
  std::vector<Eigen::VectorXd> basis;
  for (int c : cols) {
    Eigen::VectorXd v = matrix.col(c);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) v -= q.dot(v) * q;
    const double norm = v.norm();
    if (norm > 1e-10 * (1.0 + matrix.col(c).norm()))
      basis.push_back(v / norm);
  }
  Eigen::VectorXd r = y;
  for (const auto& q : basis) r -= q.dot(r) * q;
  return r.squaredNorm();
}

// max |A^T (A b - y)|, the quantity the orthogonality invariant bounds.
double residual_orthogonality(const Eigen::MatrixXd& matrix,
                              const Eigen::VectorXd& y,
                              const Eigen::VectorXd& coefficients) {
  return (matrix.transpose() * (matrix * coefficients - y))
      .cwiseAbs()
      .maxCoeff();
}

double orthogonality_bound(const Eigen::MatrixXd& matrix,
                           const Eigen::VectorXd& y) {
  return 1e-8 *
         (1.0 + matrix.cwiseAbs().maxCoeff() * y.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("least squares on exactly solvable systems") {
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
  Eigen::VectorXd y(3);
  y << 1.0, 2.0, 3.0;
  const auto solved = least_squares(eye, y);
  CHECK(solved.numerical_rank == 3);
  CHECK(solved.sse <= 1e-20);
  for (int i = 0; i < 3; ++i)
    CHECK(solved.coefficients[i] == doctest::Approx(y[i]));
}

TEST_CASE("least squares against the mean of a ones-column fit") {
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(3, 1);
  Eigen::VectorXd y(3);
  y << 0.0, 1.0, 1.0;
  const auto fit = least_squares(ones, y);
  CHECK(fit.numerical_rank == 1);
  CHECK(fit.coefficients[0] == doctest::Approx(2.0 / 3.0));
  CHECK(fit.sse == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("duplicate columns reduce the rank, not the fit") {
  Rng rng(41);
  const Eigen::VectorXd base = random_vector(rng, 12);
  const Eigen::VectorXd y = random_vector(rng, 12);

  Eigen::MatrixXd one_col(12, 1);
  one_col.col(0) = base;
  Eigen::MatrixXd two_cols(12, 2);
  two_cols.col(0) = base;
  two_cols.col(1) = base;

  const auto single = least_squares(one_col, y);
  const auto doubled = least_squares(two_cols, y);
  CHECK(single.numerical_rank == 1);
  CHECK(doubled.numerical_rank == 1);
  CHECK(doubled.sse == doctest::Approx(single.sse).epsilon(1e-12));
  CHECK(doubled.coefficients.allFinite());
  CHECK(residual_orthogonality(two_cols, y, doubled.coefficients) <=
        orthogonality_bound(two_cols, y));
}

TEST_CASE("residuals are orthogonal to the columns on random systems") {
  Rng rng(0xa11ce);
  for (int trial = 0; trial < 30; ++trial) {
    const int rows = 10 + static_cast<int>(rng.next_below(31));
    const int cols = 1 + static_cast<int>(rng.next_below(8));
    Eigen::MatrixXd a = random_matrix(rng, rows, cols);
    // Every third system gets a forced linear dependence.
    if (trial % 3 == 0 && cols >= 2) a.col(cols - 1) = 2.0 * a.col(0);
    const Eigen::VectorXd y = random_vector(rng, rows);

    const auto fit = least_squares(a, y);
    CAPTURE(trial);
    CHECK(residual_orthogonality(a, y, fit.coefficients) <=
          orthogonality_bound(a, y));
    if (trial % 3 == 0 && cols >= 2) CHECK(fit.numerical_rank < cols);
  }
}

TEST_CASE("adding columns never increases the SSE") {
  Rng rng(7);
  const Eigen::MatrixXd a = random_matrix(rng, 25, 6);
  const Eigen::VectorXd y = random_vector(rng, 25);
  double previous = y.squaredNorm();
  for (int k = 1; k <= 6; ++k) {
    const auto fit = least_squares(a.leftCols(k), y);
    CHECK(fit.sse <= previous + 1e-9 * (1.0 + previous));
    previous = fit.sse;
  }
}

TEST_CASE("column scaling within the rank threshold leaves the SSE unchanged") {
  Rng rng(99);
  Eigen::MatrixXd a = random_matrix(rng, 20, 4);
  const Eigen::VectorXd y = random_vector(rng, 20);
  const auto before = least_squares(a, y);
  // Keep every relative pivot far above kRankThreshold; a rescaling that
  // crosses it would legitimately change the effective rank.
  a.col(2) *= 1e3;
  a.col(0) *= 1e-2;
  const auto after = least_squares(a, y);
  CHECK(after.numerical_rank == before.numerical_rank);
  CHECK(after.sse == doctest::Approx(before.sse).epsilon(1e-8));
}

TEST_CASE("a column scaled below the rank threshold is dropped from the fit") {
  Rng rng(1234);
  Eigen::MatrixXd a = random_matrix(rng, 20, 4);
  const Eigen::VectorXd y = random_vector(rng, 20);
  a.col(3) *= 1e-13;
  const auto fit = least_squares(a, y);
  CHECK(fit.numerical_rank == 3);
  CHECK(fit.coefficients[3] == 0.0);
  const auto reduced = least_squares(a.leftCols(3), y);
  CHECK(fit.sse == doctest::Approx(reduced.sse).epsilon(1e-10));
}

TEST_CASE("every subset SSE and Cp agrees with the projection oracle") {
  Rng rng(0x515e);
  const int m_obs = 20;
  const int n_total = 5;
  Eigen::MatrixXd design(m_obs, n_total + 1);
  design.col(0).setOnes();
  design.rightCols(n_total) = random_matrix(rng, m_obs, n_total);
  const Eigen::VectorXd y = random_vector(rng, m_obs);

  const double sse_full = projection_sse(design, y, {0, 1, 2, 3, 4, 5});
  CpContext ctx;
  ctx.n_total = n_total;
  ctx.m_obs = m_obs;
  ctx.sigma2_hat = sse_full / (m_obs - n_total - 1);
  REQUIRE(ctx.sigma2_hat > 0.0);

  for (int mask = 0; mask < (1 << n_total); ++mask) {
    std::vector<int> cols = {0};
    for (int v = 1; v <= n_total; ++v)
      if (mask & (1 << (v - 1))) cols.push_back(v);
    const int p = static_cast<int>(cols.size()) - 1;

    Eigen::MatrixXd sub(m_obs, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
      sub.col(static_cast<Eigen::Index>(j)) = design.col(cols[j]);

    const auto fit = least_squares(sub, y);
    const double oracle_sse = projection_sse(design, y, cols);
    CAPTURE(mask);
    CHECK(fit.sse == doctest::Approx(oracle_sse).epsilon(1e-9));

    const double s2 = oracle_sse / (m_obs - p - 1);
    const double oracle_cp =
        p + (s2 - ctx.sigma2_hat) * (n_total - p) / ctx.sigma2_hat;
    CHECK(cp_statistic(fit.sse, p, ctx) ==
          doctest::Approx(oracle_cp).epsilon(1e-9));
  }

  // The saturated model lands exactly on p: the correction term vanishes.
  const auto full = least_squares(design, y);
  CHECK(cp_statistic(full.sse, n_total, ctx) ==
        doctest::Approx(static_cast<double>(n_total)).epsilon(1e-12));
}

TEST_CASE("Cp statistic worked example and exact identities") {
  CpContext ctx;
  ctx.n_total = 60;
  ctx.m_obs = 100;
  ctx.sigma2_hat = 2.0;

  // p = 7 with s^2 = 0.9 sigma2_hat: 7 + (-0.2)(53)/2 = 1.7.
  const int dof = ctx.m_obs - 7 - 1;
  CHECK(cp_statistic(0.9 * ctx.sigma2_hat * dof, 7, ctx) ==
        doctest::Approx(1.7).epsilon(1e-12));

  // s^2 equal to sigma2_hat collapses Cp to p for any size.
  for (int p : {0, 1, 7, 30, 60}) {
    const int d = ctx.m_obs - p - 1;
    CHECK(cp_statistic(ctx.sigma2_hat * d, p, ctx) ==
          doctest::Approx(static_cast<double>(p)).epsilon(1e-12));
  }

  // Inflated residual variance pushes Cp above p, deflated below.
  CHECK(cp_statistic(1.5 * ctx.sigma2_hat * (ctx.m_obs - 4), 3, ctx) > 3.0);
  CHECK(cp_statistic(0.5 * ctx.sigma2_hat * (ctx.m_obs - 4), 3, ctx) < 3.0);
}

TEST_CASE("Cp statistic and context validation") {
  CpContext ctx;
  ctx.n_total = 5;
  ctx.m_obs = 20;
  ctx.sigma2_hat = 1.0;
  CHECK_NOTHROW(ctx.validate());

  CHECK_THROWS_AS(cp_statistic(1.0, -1, ctx), DomainError);
  CHECK_THROWS_AS(cp_statistic(1.0, 6, ctx), DomainError);
  CHECK_THROWS_AS(cp_statistic(-0.5, 2, ctx), DataError);
  CHECK_THROWS_AS(cp_statistic(std::nan(""), 2, ctx), DataError);

  CpContext tight = ctx;
  tight.m_obs = 6;  // needs strictly more than n_total + 1 rows
  CHECK_THROWS_AS(tight.validate(), DomainError);

  CpContext bad_sigma = ctx;
  bad_sigma.sigma2_hat = 0.0;
  CHECK_THROWS_AS(bad_sigma.validate(), DataError);
  bad_sigma.sigma2_hat = -1.0;
  CHECK_THROWS_AS(bad_sigma.validate(), DataError);

  CpContext no_vars = ctx;
  no_vars.n_total = 0;
  CHECK_THROWS_AS(no_vars.validate(), DomainError);
}

TEST_CASE("least squares input validation") {
  Eigen::MatrixXd a(2, 2);
  a << 1, 0, 0, 1;
  Eigen::VectorXd y(2);
  y << 1, 1;

  CHECK_THROWS_AS(least_squares(Eigen::MatrixXd(), y), DataError);
  CHECK_THROWS_AS(least_squares(a, Eigen::VectorXd(3)), DataError);
  Eigen::MatrixXd bad = a;
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(least_squares(bad, y), DataError);
}

TEST_CASE("logistic transform") {
  CHECK(logistic(0.0) == doctest::Approx(0.5));
  CHECK(logistic(std::log(3.0)) == doctest::Approx(0.75));
  CHECK(logistic(1000.0) == doctest::Approx(1.0));
  CHECK(logistic(-1000.0) <= 1e-300);
  CHECK(std::isfinite(logistic(709.0)));
  CHECK(std::isfinite(logistic(-709.0)));
  for (double f : {-5.0, -0.3, 0.0, 0.7, 4.2})
    CHECK(logistic(-f) == doctest::Approx(1.0 - logistic(f)).epsilon(1e-12));
}

TEST_CASE("subset fits match direct least squares on a sampled dataset") {
  const auto schema = testutil::binary_schema(3, 0.4);
  const auto risk = testutil::toy_risk(-1.2, {{"c1", 1.5}, {"c2", 0.8}});
  const auto dataset = testutil::toy_dataset(schema, risk, 400, 20260823);
  const auto catalog = build_catalog(schema);
  REQUIRE(static_cast<int>(dataset.rows.size()) > catalog.total());

  const auto ctx = make_cp_context(dataset, catalog);
  CHECK(ctx.n_total == catalog.n_nonconstant());
  CHECK(ctx.m_obs == static_cast<int>(dataset.rows.size()));
  CHECK(ctx.sigma2_hat > 0.0);

  const std::vector<int> selection = {1, 3, 5};
  const auto fit = fit_subset(dataset, catalog, selection, ctx);
  CHECK(fit.p_effective == 3);
  CHECK(fit.numerical_rank <= 4);
  CHECK(fit.coefficients.size() == 4);

  std::vector<int> columns = {0};
  columns.insert(columns.end(), selection.begin(), selection.end());
  const auto design = build_design_matrix(dataset, catalog, columns);
  const auto direct = least_squares(design.matrix, design.response);
  CHECK(fit.sse == doctest::Approx(direct.sse).epsilon(1e-12));
  CHECK(fit.cp ==
        doctest::Approx(cp_statistic(direct.sse, 3, ctx)).epsilon(1e-12));

  // The saturated subset reproduces the context fit bit for bit, so its Cp
  // is exactly the variable count.
  std::vector<int> all;
  for (int i = 1; i < catalog.total(); ++i) all.push_back(i);
  const auto saturated = fit_subset(dataset, catalog, all, ctx);
  CHECK(saturated.cp == static_cast<double>(catalog.n_nonconstant()));
}

TEST_CASE("subset fits tolerate engineered collinearity") {
  const auto schema = testutil::binary_schema(3);
  const auto catalog = build_catalog(schema);

  // c1 and c2 always agree, so their single columns coincide.
  CaseControlDataset dataset;
  Rng rng(6);
  for (int i = 0; i < 16; ++i) {
    Individual ind;
    const double a = static_cast<double>(rng.next_below(2));
    const double c = static_cast<double>(rng.next_below(2));
    ind.values = {a, a, c};
    ind.diseased = i < 8;
    dataset.rows.push_back(ind);
  }
  dataset.case_count = 8;
  dataset.control_count = 8;

  CpContext ctx;
  ctx.n_total = catalog.n_nonconstant();
  ctx.m_obs = 16;
  ctx.sigma2_hat = 0.5;

  const auto find = [&catalog](const std::string& token) {
    for (const auto& x : catalog.entries)
      if (x_token(x) == token) return x.index;
    FAIL("token not in catalog: ", token);
    return -1;
  };
  std::vector<int> pair = {find("w1"), find("w2")};
  std::sort(pair.begin(), pair.end());
  const auto both = fit_subset(dataset, catalog, pair, ctx);
  const auto lone = fit_subset(dataset, catalog, {find("w1")}, ctx);
  CHECK(both.numerical_rank == 2);  // constant + one informative column
  CHECK(both.sse == doctest::Approx(lone.sse).epsilon(1e-10));
  CHECK(both.p_effective == 2);
  CHECK(std::isfinite(both.cp));
}

TEST_CASE("subset fit input validation") {
  const auto schema = testutil::binary_schema(2);
  const auto risk = testutil::toy_risk(-1.0, {{"c1", 1.0}});
  const auto dataset = testutil::toy_dataset(schema, risk, 200, 7);
  const auto catalog = build_catalog(schema);
  const auto ctx = make_cp_context(dataset, catalog);

  CHECK_THROWS_AS(fit_subset(dataset, catalog, {2, 1}, ctx), ValidationError);
  CHECK_THROWS_AS(fit_subset(dataset, catalog, {1, 1}, ctx), ValidationError);
  CHECK_THROWS_AS(fit_subset(dataset, catalog, {0}, ctx), BoundsError);
  CHECK_THROWS_AS(fit_subset(dataset, catalog, {catalog.total()}, ctx),
                  BoundsError);

  CaseControlDataset tiny;
  tiny.rows.assign(3, dataset.rows.front());
  tiny.case_count = 3;
  CHECK_THROWS_AS(make_cp_context(tiny, catalog), DomainError);
}
