#include "modsel/linalg.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "modsel/errors.hpp"

namespace modsel {

void CpContext::validate() const {
  if (n_total < 1)
    throw DomainError("CpContext: n_total must be positive, got " +
                      std::to_string(n_total));
  if (m_obs <= n_total + 1)
    throw DomainError("CpContext: need m_obs > n_total + 1 (" +
                      std::to_string(m_obs) + " rows for " +
                      std::to_string(n_total) + " variables)");
  if (!std::isfinite(sigma2_hat) || sigma2_hat <= 0.0)
    throw DataError("CpContext: sigma2_hat must be finite and positive, got " +
                    std::to_string(sigma2_hat));
}

LeastSquaresResult least_squares(const Eigen::MatrixXd& matrix,
                                 const Eigen::VectorXd& response) {
  if (matrix.rows() == 0 || matrix.cols() == 0)
    throw DataError("least_squares: empty system (" +
                    std::to_string(matrix.rows()) + "x" +
                    std::to_string(matrix.cols()) + ")");
  if (matrix.rows() != response.size())
    throw DataError("least_squares: " + std::to_string(matrix.rows()) +
                    " rows vs " + std::to_string(response.size()) +
                    " responses");
  if (!matrix.allFinite() || !response.allFinite())
    throw DataError("least_squares: non-finite entries in the system");

  // The threshold must be installed before compute(): rank() counts pivots
  // against it during the factorization sweep.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
  qr.setThreshold(kRankThreshold);
  qr.compute(matrix);
  const Eigen::Index rank = qr.rank();

  // qr.solve() truncates at Eigen's internal epsilon-based pivot count, which
  // can keep a ~1e-15 pivot that rank() rejects; back-substituting through it
  // turns exactly collinear columns into huge cancelling coefficient pairs.
  // Solve by hand instead, dropping every pivot past the threshold rank.
  Eigen::VectorXd coefficients = Eigen::VectorXd::Zero(matrix.cols());
  if (rank > 0) {
    Eigen::VectorXd c = response;
    c.applyOnTheLeft(qr.householderQ().setLength(rank).adjoint());
    qr.matrixQR()
        .topLeftCorner(rank, rank)
        .triangularView<Eigen::Upper>()
        .solveInPlace(c.head(rank));
    for (Eigen::Index i = 0; i < rank; ++i)
      coefficients[qr.colsPermutation().indices()[i]] = c[i];
  }

  LeastSquaresResult out;
  out.coefficients = std::move(coefficients);
  out.numerical_rank = static_cast<int>(rank);
  // Recompute the residual directly rather than trusting factorization
  // byproducts; this is the quantity every Cp comparison rests on.
  out.sse = (matrix * out.coefficients - response).squaredNorm();
  return out;
}

double cp_statistic(double sse_p, int p_effective, const CpContext& ctx) {
  ctx.validate();
  if (p_effective < 0 || p_effective > ctx.n_total)
    throw DomainError("cp_statistic: p_effective " +
                      std::to_string(p_effective) + " outside 0.." +
                      std::to_string(ctx.n_total));
  if (!std::isfinite(sse_p) || sse_p < 0.0)
    throw DataError("cp_statistic: sse must be finite and nonnegative, got " +
                    std::to_string(sse_p));
  const int dof = ctx.m_obs - p_effective - 1;
  if (dof <= 0)
    throw DomainError("cp_statistic: nonpositive residual dof " +
                      std::to_string(dof));
  const double s2 = sse_p / dof;
  const double p = p_effective;
  return p + (s2 - ctx.sigma2_hat) * (ctx.n_total - p) / ctx.sigma2_hat;
}

double logistic(double f) {
  if (f >= 0.0) return 1.0 / (1.0 + std::exp(-f));
  const double e = std::exp(f);
  return e / (1.0 + e);
}

CpContext make_cp_context(const CaseControlDataset& dataset,
                          const VariableCatalog& catalog) {
  CpContext ctx;
  ctx.n_total = catalog.n_nonconstant();
  ctx.m_obs = static_cast<int>(dataset.rows.size());
  if (ctx.n_total < 1)
    throw DomainError("make_cp_context: catalog has no nonconstant variables");
  if (ctx.m_obs <= ctx.n_total + 1)
    throw DomainError(
        "make_cp_context: dataset too small for the full model: " +
        std::to_string(ctx.m_obs) + " rows, need more than " +
        std::to_string(ctx.n_total + 1));

  std::vector<int> all(static_cast<std::size_t>(catalog.total()));
  for (int i = 0; i < catalog.total(); ++i) all[static_cast<std::size_t>(i)] = i;
  const DesignMatrix full = build_design_matrix(dataset, catalog, all);
  const LeastSquaresResult fit = least_squares(full.matrix, full.response);
  ctx.sigma2_hat = fit.sse / (ctx.m_obs - ctx.n_total - 1);
  if (!std::isfinite(ctx.sigma2_hat) || ctx.sigma2_hat <= 0.0)
    throw DataError(
        "make_cp_context: full-model residual variance is not positive (" +
        std::to_string(ctx.sigma2_hat) +
        "); responses are exactly interpolated");
  return ctx;
}

FitResult fit_subset(const CaseControlDataset& dataset,
                     const VariableCatalog& catalog,
                     const std::vector<int>& nonconstant,
                     const CpContext& ctx) {
  for (std::size_t i = 0; i < nonconstant.size(); ++i) {
    const int x = nonconstant[i];
    if (x < 1 || x >= catalog.total())
      throw BoundsError("fit_subset: x index " + std::to_string(x) +
                        " outside 1.." + std::to_string(catalog.total() - 1));
    if (i > 0 && nonconstant[i - 1] >= x)
      throw ValidationError(
          "fit_subset: selection must be sorted and duplicate-free");
  }

  std::vector<int> columns;
  columns.reserve(nonconstant.size() + 1);
  columns.push_back(0);
  columns.insert(columns.end(), nonconstant.begin(), nonconstant.end());

  const DesignMatrix design = build_design_matrix(dataset, catalog, columns);
  const LeastSquaresResult ls = least_squares(design.matrix, design.response);

  FitResult out;
  out.coefficients = ls.coefficients;
  out.sse = ls.sse;
  out.numerical_rank = ls.numerical_rank;
  out.p_effective = static_cast<int>(nonconstant.size());
  out.cp = cp_statistic(out.sse, out.p_effective, ctx);
  return out;
}

}  // namespace modsel
