#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "error.hpp"
#include "graph.hpp"
#include "mixing.hpp"
#include "weights.hpp"

namespace wgt {

// ---------------------------------------------------------------------------
// L2(lambda; R^d) geometry. Rows of an n x d array are node states.

inline double weighted_inner(const Matrix& x, const Matrix& y, const WeightVector& w) {
  if (x.rows() != y.rows() || x.cols() != y.cols() ||
      static_cast<std::size_t>(x.rows()) != w.size()) {
    fail(ErrorCode::DimensionMismatch, "weighted_inner shape mismatch");
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    acc += w[static_cast<std::size_t>(i)] * x.row(i).dot(y.row(i));
  }
  return acc;
}

inline double weighted_frobenius_norm(const Matrix& x, const WeightVector& w) {
  return std::sqrt(weighted_inner(x, x, w));
}

/// ||M||_lambda = ||D^{1/2} M D^{-1/2}||_2 for any positive diagonal weights
/// whose length matches M (block operators pass the weights repeated).
inline double weighted_spectral_norm(const Matrix& m, std::span<const double> weights) {
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != weights.size()) {
    fail(ErrorCode::DimensionMismatch, "weighted_spectral_norm shape mismatch");
  }
  Vector root(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) root(i) = std::sqrt(weights[static_cast<std::size_t>(i)]);
  const Matrix scaled = root.asDiagonal() * m * root.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Matrix> svd(scaled);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

inline double weighted_spectral_norm(const Matrix& m, const WeightVector& w) {
  return weighted_spectral_norm(m, w.values());
}

// ---------------------------------------------------------------------------

/// D^{1/2} W D^{-1/2}; symmetric whenever W satisfies detailed balance for w.
inline Matrix similarity_transform(const Matrix& m, const WeightVector& w) {
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != w.size()) {
    fail(ErrorCode::DimensionMismatch, "similarity_transform shape mismatch");
  }
  const Vector lam = to_eigen(w);
  const Matrix flux = lam.asDiagonal() * m;
  const double residual = (flux - flux.transpose()).cwiseAbs().maxCoeff();
  if (residual > 1e-8) {
    fail(ErrorCode::DetailedBalanceViolation, "matrix is not reversible for the given weights");
  }
  const Vector root = lam.cwiseSqrt();
  return root.asDiagonal() * m * root.cwiseInverse().asDiagonal();
}

inline Matrix similarity_transform(const MixingMatrix& m) {
  return similarity_transform(m.entries(), m.stationary());
}

/// Eigenvalues of a symmetric matrix in descending order.
inline std::vector<double> symmetric_eigenvalues(const Matrix& s) {
  const Matrix sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) fail(ErrorCode::EigensolverFailure, "eigensolver did not converge");
  std::vector<double> ev(solver.eigenvalues().data(),
                         solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

struct SpectralReport {
  std::vector<double> eigenvalues;  ///< descending
  double rho = 0.0;                 ///< max(|sigma_2|, |sigma_n|)
  double gap = 1.0;
  double kappa = 1.0;               ///< of the matrix's stationary weights
};

/// Spectrum via the symmetric transform (RowStochasticLambda) or directly
/// (DoublyStochastic). Both are similar to W, so the eigenvalues are W's.
inline SpectralReport spectrum(const MixingMatrix& m) {
  const Matrix sym = m.kind() == MixingKind::DoublyStochastic ? m.entries() : similarity_transform(m);
  SpectralReport r;
  r.eigenvalues = symmetric_eigenvalues(sym);
  if (r.eigenvalues.size() >= 2) {
    r.rho = std::max(std::abs(r.eigenvalues[1]), std::abs(r.eigenvalues.back()));
  }
  r.gap = 1.0 - r.rho;
  r.kappa = m.stationary().kappa();
  return r;
}

/// W - 1 lambda^T / n (W_Lambda) or W_ds - 11^T / n (W_J).
inline Matrix deviation_operator(const MixingMatrix& m) {
  const int n = m.size();
  const Vector lam = to_eigen(m.stationary());
  return m.entries() - Vector::Ones(n) * lam.transpose() / static_cast<double>(n);
}

/// Squared lambda-norm of the t-th power of the consensus block operator:
///   ||A^t||^2 = (t^2 + 2 + t sqrt(t^2 + 4)) / 2 * kappa * rho^{2t}.
/// kappa = 1 gives the exact value for the self-adjoint case; kappa = kappa_lambda
/// gives the upper bound for the doubly stochastic operator.
inline double block_power_norm_closed_form(int t, double rho, double kappa = 1.0) {
  const double tt = t;
  const double coeff = (tt * tt + 2.0 + tt * std::sqrt(tt * tt + 4.0)) / 2.0;
  return coeff * kappa * std::pow(rho, 2.0 * tt);
}

/// [[W*^t, -t W*^t], [0, W*^t]]: the t-th power of [[W*, -W*], [0, W*]].
inline Matrix assemble_block_A(const Matrix& w_star, int t) {
  if (t < 1) fail(ErrorCode::BadRange, "block power needs t >= 1");
  const Eigen::Index n = w_star.rows();
  Matrix p = Matrix::Identity(n, n);
  for (int k = 0; k < t; ++k) p = p * w_star;
  Matrix a = Matrix::Zero(2 * n, 2 * n);
  a.topLeftCorner(n, n) = p;
  a.topRightCorner(n, n) = -static_cast<double>(t) * p;
  a.bottomRightCorner(n, n) = p;
  return a;
}

// ---------------------------------------------------------------------------
// Head-to-head conditions.

inline constexpr double kPenaltyEta = 1.8e-3;

/// R = max{(1 + eta) kappa^{-1/3}, lambda_max^{-1/2}}. Exceeds 1 (1.0018) for
/// uniform weights.
inline double penalty_factor_R(const WeightVector& w) {
  return std::max((1.0 + kPenaltyEta) * std::pow(w.kappa(), -1.0 / 3.0), 1.0 / std::sqrt(w.max()));
}

inline bool theorem2_condition(double gap_lambda, double gap_j, const WeightVector& w) {
  return gap_lambda >= penalty_factor_R(w) * gap_j;
}

/// L(lambda) = I - D^{1/2} W D^{-1/2}, symmetrized.
inline Matrix weighted_laplacian(const Graph& g, const WeightVector& w, double eps = kDefaultLaziness) {
  const Matrix s = similarity_transform(metropolis(g, w, eps));
  return Matrix::Identity(g.size(), g.size()) - 0.5 * (s + s.transpose());
}

/// inf z^T L z / ||z||^2 over z orthogonal to null_vector, evaluated as the
/// smallest eigenvalue of L compressed onto the orthogonal complement.
inline double rayleigh_second_smallest(const Matrix& l, const Vector& null_vector) {
  const Eigen::Index n = l.rows();
  if (l.cols() != n || null_vector.size() != n || n < 2) {
    fail(ErrorCode::DimensionMismatch, "rayleigh_second_smallest shape mismatch");
  }
  Eigen::HouseholderQR<Matrix> qr(null_vector);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix basis = q.rightCols(n - 1);
  const auto ev = symmetric_eigenvalues(basis.transpose() * l * basis);
  return ev.back();
}

struct CorollaryCheck {
  bool pairwise = false;          ///< R min{d_i/d_j,1} <= sqrt(l_i/l_j) <= R^-1 max{d_i/d_j,1}
  double R = 1.0;
  double loewner_min_eig = 0.0;   ///< min eig(L(lambda) - R L(1))
  bool loewner_holds = false;     ///< loewner_min_eig >= -1e-10
};

inline CorollaryCheck corollary_check(const Graph& g, const WeightVector& w, double eps = kDefaultLaziness) {
  if (static_cast<std::size_t>(g.size()) != w.size()) {
    fail(ErrorCode::DimensionMismatch, "graph and weight vector sizes differ");
  }
  if (!is_connected(g)) fail(ErrorCode::Disconnected, "corollary check requires a connected graph");
  CorollaryCheck c;
  c.R = penalty_factor_R(w);
  const auto d = g.degrees();
  const int n = g.size();
  constexpr double slack = 1e-12;
  c.pairwise = true;
  for (int i = 0; i < n && c.pairwise; ++i) {
    for (int j = 0; j < n; ++j) {
      const double ratio = static_cast<double>(d[i]) / d[j];
      const double root = std::sqrt(w[i] / w[j]);
      if (root < c.R * std::min(ratio, 1.0) * (1.0 - slack) ||
          root > std::max(ratio, 1.0) / c.R * (1.0 + slack)) {
        c.pairwise = false;
        break;
      }
    }
  }
  const Matrix diff = weighted_laplacian(g, w, eps) -
                      c.R * weighted_laplacian(g, uniform_weights(w.size()), eps);
  c.loewner_min_eig = symmetric_eigenvalues(diff).back();
  c.loewner_holds = c.loewner_min_eig >= -1e-10;
  return c;
}

inline bool corollary_condition(const Graph& g, const WeightVector& w) {
  return corollary_check(g, w).pairwise;
}

/// Everything needed to compare the weighted and doubly stochastic designs
/// on one graph.
struct ComparisonReport {
  SpectralReport weighted;   ///< W(lambda)
  SpectralReport uniform;    ///< W_ds
  double kappa = 1.0;
  double lambda_max = 1.0;
  double R = 1.0;
  bool theorem2_holds = false;
  bool corollary_holds = false;
  bool uniform_weights = false;   ///< R > 1 degenerate case
  double fiedler_lambda = 0.0;    ///< sigma_{n-1}(L(lambda))
  double fiedler_one = 0.0;       ///< sigma_{n-1}(L(1))
  double loewner_min_eig = 0.0;
};

inline ComparisonReport compare_designs(const Graph& g, const WeightVector& w, double eps = kDefaultLaziness) {
  ComparisonReport r;
  r.weighted = spectrum(metropolis(g, w, eps));
  r.uniform = spectrum(doubly_stochastic(g, eps));
  r.kappa = w.kappa();
  r.lambda_max = w.max();
  r.R = penalty_factor_R(w);
  r.theorem2_holds = theorem2_condition(r.weighted.gap, r.uniform.gap, w);
  const auto cc = corollary_check(g, w, eps);
  r.corollary_holds = cc.pairwise;
  r.loewner_min_eig = cc.loewner_min_eig;
  r.uniform_weights = w.is_uniform();
  r.fiedler_lambda = rayleigh_second_smallest(weighted_laplacian(g, w, eps), to_eigen(w).cwiseSqrt());
  r.fiedler_one = rayleigh_second_smallest(weighted_laplacian(g, uniform_weights(w.size()), eps),
                                           Vector::Ones(g.size()));
  return r;
}

}  // namespace wgt
