#pragma once

// Least-squares fitting, the Cp statistic, and the logistic transform.
//
// Fits go through a single rank-revealing path: a column-pivoted Householder
// QR factorization. The normal-equations matrix is never formed or inverted;
// large row counts and near-duplicate columns make that route numerically
// treacherous. Rank-deficient systems are not errors, they return a valid
// minimizer with the trailing pivots dropped.

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "modsel/features.hpp"
#include "modsel/simulate.hpp"

namespace modsel {

// Relative pivot threshold for numerical rank decisions.
inline constexpr double kRankThreshold = 1e-10;

// The one factorization used by every fit; asserted by the stability suite.
inline constexpr std::string_view kSolverFactorization =
    "column-pivoted-householder-qr";

struct LeastSquaresResult {
  Eigen::VectorXd coefficients;
  double sse = 0.0;  // minimized ||A b - y||^2; unique even when b is not
  int numerical_rank = 0;
};

struct FitResult {
  Eigen::VectorXd coefficients;  // one per column, constant first
  double sse = 0.0;
  int numerical_rank = 0;
  int p_effective = 0;  // distinct nonconstant variables in the model
  double cp = 0.0;
};

// Per-dataset context for the Cp statistic. sigma2_hat is the residual mean
// square of the most complete model (all n_total nonconstant variables plus
// the constant), computed once and reused by every evaluation.
struct CpContext {
  int n_total = 0;
  int m_obs = 0;
  double sigma2_hat = 0.0;

  void validate() const;
};

LeastSquaresResult least_squares(const Eigen::MatrixXd& matrix,
                                 const Eigen::VectorXd& response);

// Cp = p + (s^2 - sigma2_hat) * (n_total - p) / sigma2_hat, with
// s^2 = sse_p / (m_obs - p - 1); the -1 accounts for the constant, which is
// part of every model and never counted in p. Can be negative.
double cp_statistic(double sse_p, int p_effective, const CpContext& ctx);

// 1 / (1 + exp(-f)), branch form, no overflow for any finite f.
double logistic(double f);

// Fits the full catalog once to obtain sigma2_hat. Requires
// m_obs > n_total + 1 so the residual degrees of freedom are positive.
CpContext make_cp_context(const CaseControlDataset& dataset,
                          const VariableCatalog& catalog);

// Fits {constant} plus the given distinct nonconstant x indices and attaches
// the Cp value. `nonconstant` must be sorted and duplicate-free.
FitResult fit_subset(const CaseControlDataset& dataset,
                     const VariableCatalog& catalog,
                     const std::vector<int>& nonconstant, const CpContext& ctx);

}  // namespace modsel
