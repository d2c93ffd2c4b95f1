#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "graph.hpp"
#include "weights.hpp"

namespace wgt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultLaziness = 0.3;

enum class MixingKind { RowStochasticLambda, DoublyStochastic };

constexpr std::string_view to_string(MixingKind k) {
  return k == MixingKind::RowStochasticLambda ? "W_lambda" : "W_ds";
}

/// Row-stochastic mixing matrix together with the weight vector it is
/// reversible for. For DoublyStochastic the stationary weights are uniform.
///
/// The constructor does not check the stochastic invariants; validate() does.
class MixingMatrix {
 public:
  MixingMatrix(Matrix entries, WeightVector stationary, double laziness, MixingKind kind)
      : entries_(std::move(entries)), stationary_(std::move(stationary)),
        laziness_(laziness), kind_(kind) {
    if (entries_.rows() != entries_.cols() ||
        static_cast<std::size_t>(entries_.rows()) != stationary_.size()) {
      fail(ErrorCode::DimensionMismatch, "mixing matrix shape does not match weights");
    }
  }

  const Matrix& entries() const noexcept { return entries_; }
  const WeightVector& stationary() const noexcept { return stationary_; }
  double laziness() const noexcept { return laziness_; }
  MixingKind kind() const noexcept { return kind_; }
  int size() const noexcept { return static_cast<int>(entries_.rows()); }
  double operator()(int i, int j) const { return entries_(i, j); }

 private:
  Matrix entries_;
  WeightVector stationary_;
  double laziness_;
  MixingKind kind_;
};

inline Vector to_eigen(const WeightVector& w) {
  Vector v(static_cast<Eigen::Index>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) v(static_cast<Eigen::Index>(i)) = w[i];
  return v;
}

namespace detail {

inline void check_mixing_inputs(const Graph& g, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) fail(ErrorCode::BadLaziness, "laziness must lie in (0, 1)");
  if (!is_connected(g)) fail(ErrorCode::Disconnected, "mixing requires a connected graph");
}

inline Matrix lazy_metropolis_entries(const Graph& g, const WeightVector& w, double eps) {
  const int n = g.size();
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double di = g.degree(i);
    double off = 0.0;
    for (int j : g.neighbors(i)) {
      const double dj = g.degree(j);
      const double accept = std::min(1.0, (w[j] * di) / (w[i] * dj));
      m(i, j) = (1.0 - eps) / di * accept;
      off += m(i, j);
    }
    m(i, i) = 1.0 - off;
  }
  return m;
}

}  // namespace detail

/// Lazy Metropolis-Hastings matrix whose stationary distribution is w / n:
///   W_ij = (1 - eps) / d_i * min(1, w_j d_i / (w_i d_j))   for j in N(i)
///   W_ii = 1 - sum_{k in N(i)} W_ik
inline MixingMatrix metropolis(const Graph& g, const WeightVector& w, double eps = kDefaultLaziness) {
  if (static_cast<std::size_t>(g.size()) != w.size()) {
    fail(ErrorCode::DimensionMismatch, "graph and weight vector sizes differ");
  }
  detail::check_mixing_inputs(g, eps);
  return MixingMatrix(detail::lazy_metropolis_entries(g, w, eps), w, eps,
                      MixingKind::RowStochasticLambda);
}

/// The uniform-weight specialization: symmetric and doubly stochastic.
inline MixingMatrix doubly_stochastic(const Graph& g, double eps = kDefaultLaziness) {
  detail::check_mixing_inputs(g, eps);
  const auto ones = uniform_weights(static_cast<std::size_t>(g.size()));
  return MixingMatrix(detail::lazy_metropolis_entries(g, ones, eps), ones, eps,
                      MixingKind::DoublyStochastic);
}

struct ValidationReport {
  double negative_entry = 0.0;      ///< magnitude of the most negative entry
  double row_sum = 0.0;             ///< max_i |sum_j W_ij - 1|
  int worst_row = -1;
  double column_sum = 0.0;          ///< only filled for DoublyStochastic
  double stationarity = 0.0;        ///< || lambda^T W / n - lambda^T / n ||_inf
  double detailed_balance = 0.0;    ///< max |lambda_i W_ij - lambda_j W_ji|
  double diagonal_floor = 0.0;      ///< max(eps - W_ii, 0)
  bool pass = false;

  static constexpr double kTolerance = 1e-10;
};

inline ValidationReport validate(const MixingMatrix& m) {
  const int n = m.size();
  const Matrix& w = m.entries();
  const Vector lam = to_eigen(m.stationary());
  ValidationReport r;
  r.negative_entry = std::max(0.0, -w.minCoeff());

  for (int i = 0; i < n; ++i) {
    const double err = std::abs(w.row(i).sum() - 1.0);
    if (r.worst_row < 0 || err > r.row_sum) {
      r.row_sum = err;
      r.worst_row = i;
    }
    r.diagonal_floor = std::max(r.diagonal_floor, m.laziness() - w(i, i));
  }
  if (m.kind() == MixingKind::DoublyStochastic) {
    r.column_sum = (w.colwise().sum().array() - 1.0).abs().maxCoeff();
  }
  const double nn = static_cast<double>(n);
  r.stationarity = ((lam.transpose() * w) / nn - lam.transpose() / nn).cwiseAbs().maxCoeff();
  const Matrix flux = lam.asDiagonal() * w;
  r.detailed_balance = (flux - flux.transpose()).cwiseAbs().maxCoeff();

  const double tol = ValidationReport::kTolerance;
  r.pass = r.negative_entry <= tol && r.row_sum <= tol && r.column_sum <= tol &&
           r.stationarity <= tol && r.detailed_balance <= tol && r.diagonal_floor <= tol;
  return r;
}

// CSV dump: n rows of n values at 17 significant digits (round-trip exact).
inline void write_matrix_csv(std::ostream& out, const Matrix& m) {
  char buf[40];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

inline Matrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n) fail(ErrorCode::Parse, "matrix CSV is not square");
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace wgt
