#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <future>
#include <ostream>
#include <vector>

#include "bounds.hpp"
#include "error.hpp"
#include "mixing.hpp"
#include "rng.hpp"
#include "weights.hpp"

namespace wgt {

struct ProblemConfig {
  int n = 16;
  int d = 10;
  double zeta_min = 5.5;
  double zeta_max = 12.5;
  double mu0 = 3.0;
  double reg = 0.01;
  double sigma = 1.0;
  std::uint64_t seed = 0;
  bool shared_init = true;  ///< false: every node draws its own initial state
};

/// Synthetic least squares with A_i = zeta_i I. Node i's effective loss is
///   F_i(x) = zeta_i / 2 ||x - c_i||^2 + reg / 2 ||x||^2.
struct QuadraticProblem {
  int n = 0;
  int d = 0;
  std::vector<double> zeta;
  Vector c_base;
  Matrix centers;   ///< n x d, row i is c_i
  Matrix initial;   ///< n x d starting states
  double reg = 0.0;
  double noise_sigma = 0.0;
  double mu0 = 0.0;
  std::uint64_t base_seed = 0;

  /// Gradient-Lipschitz constant max_i (zeta_i + reg).
  double smoothness() const { return *std::max_element(zeta.begin(), zeta.end()) + reg; }
  /// Gradient-noise variance sigma^2 d.
  double noise_variance() const { return noise_sigma * noise_sigma * d; }
};

/// Draw order from Rng(seed): zeta_1..zeta_n, c_base (d normals), then per
/// node a d-normal direction, then the initial state(s).
inline QuadraticProblem generate_problem(const ProblemConfig& cfg) {
  if (cfg.n < 2) fail(ErrorCode::TooFewNodes, "problem needs n >= 2");
  if (cfg.d < 1) fail(ErrorCode::BadRange, "dimension must be >= 1");
  if (!(cfg.zeta_min > 0.0) || !(cfg.zeta_min <= cfg.zeta_max)) {
    fail(ErrorCode::BadRange, "curvature range must satisfy 0 < zeta_min <= zeta_max");
  }
  if (cfg.mu0 < 0.0 || cfg.reg < 0.0 || cfg.sigma < 0.0) {
    fail(ErrorCode::BadRange, "mu0, reg and sigma must be non-negative");
  }
  Rng rng(cfg.seed);
  QuadraticProblem p;
  p.n = cfg.n;
  p.d = cfg.d;
  p.reg = cfg.reg;
  p.noise_sigma = cfg.sigma;
  p.mu0 = cfg.mu0;
  p.base_seed = cfg.seed;
  p.zeta.resize(static_cast<std::size_t>(cfg.n));
  for (auto& z : p.zeta) z = rng.uniform(cfg.zeta_min, cfg.zeta_max);

  p.c_base.resize(cfg.d);
  for (int k = 0; k < cfg.d; ++k) p.c_base(k) = rng.normal();
  p.centers.resize(cfg.n, cfg.d);
  for (int i = 0; i < cfg.n; ++i) {
    Vector v(cfg.d);
    for (int k = 0; k < cfg.d; ++k) v(k) = rng.normal();
    p.centers.row(i) = (p.c_base + cfg.mu0 * v / v.norm()).transpose();
  }

  p.initial.resize(cfg.n, cfg.d);
  if (cfg.shared_init) {
    Vector theta0(cfg.d);
    for (int k = 0; k < cfg.d; ++k) theta0(k) = rng.normal();
    p.initial.rowwise() = theta0.transpose();
  } else {
    for (int i = 0; i < cfg.n; ++i) {
      for (int k = 0; k < cfg.d; ++k) p.initial(i, k) = rng.normal();
    }
  }
  return p;
}

inline void check_weights(const QuadraticProblem& p, const WeightVector& w) {
  if (w.size() != static_cast<std::size_t>(p.n)) {
    fail(ErrorCode::DimensionMismatch, "weight vector size differs from problem size");
  }
}

/// Minimizer of F = sum_i (lambda_i / n) F_i:
///   theta* = (sum lambda_i zeta_i + reg sum lambda_i)^-1 sum lambda_i zeta_i c_i.
inline Vector closed_form_optimum(const QuadraticProblem& p, const WeightVector& w) {
  check_weights(p, w);
  double curvature = 0.0;
  Vector rhs = Vector::Zero(p.d);
  for (int i = 0; i < p.n; ++i) {
    curvature += w[i] * (p.zeta[i] + p.reg);
    rhs += w[i] * p.zeta[i] * p.centers.row(i).transpose();
  }
  if (!(curvature > 0.0)) fail(ErrorCode::SingularSystem, "weighted curvature is not positive");
  return rhs / curvature;
}

inline double local_loss(const QuadraticProblem& p, int i, const Vector& theta) {
  return 0.5 * p.zeta[i] * (theta - p.centers.row(i).transpose()).squaredNorm() +
         0.5 * p.reg * theta.squaredNorm();
}

inline Vector local_gradient(const QuadraticProblem& p, int i, const Vector& theta) {
  return p.zeta[i] * (theta - p.centers.row(i).transpose()) + p.reg * theta;
}

/// F(theta) = sum_i (lambda_i / n) F_i(theta)
inline double global_loss(const QuadraticProblem& p, const WeightVector& w, const Vector& theta) {
  check_weights(p, w);
  double acc = 0.0;
  for (int i = 0; i < p.n; ++i) acc += w[i] * local_loss(p, i, theta);
  return acc / p.n;
}

inline Vector global_gradient(const QuadraticProblem& p, const WeightVector& w, const Vector& theta) {
  check_weights(p, w);
  Vector g = Vector::Zero(p.d);
  for (int i = 0; i < p.n; ++i) g += w[i] * local_gradient(p, i, theta);
  return g / p.n;
}

/// Seed of the noise draw for node i (0-based) at iteration t.
inline std::uint64_t composite_seed(std::uint64_t s0, int i, long t) {
  return s0 + 1000ULL * static_cast<std::uint64_t>(i) + 10ULL * static_cast<std::uint64_t>(t);
}

/// zeta_i (theta - c_i) + reg theta + sigma xi, xi ~ N(0, I_d) drawn from a
/// fresh Rng(s0 + 1000 i + 10 t). Note the composite seed repeats across
/// (i, t) pairs once t spans 100 iterations (1000 i + 10 t = 1000 (i+1) + 10 (t-100)).
inline Vector stochastic_gradient(const QuadraticProblem& p, int i, long t, const Vector& theta,
                                  std::uint64_t s0) {
  Vector g = local_gradient(p, i, theta);
  if (p.noise_sigma != 0.0) {
    Rng rng(composite_seed(s0, i, t));
    for (int k = 0; k < p.d; ++k) g(k) += p.noise_sigma * rng.normal();
  }
  return g;
}

/// (1/n) sum lambda_i theta_i for Strategy II, (1/n) sum theta_i for Strategy I.
inline Vector weighted_mean_iterate(const Matrix& theta, const WeightVector& w, Strategy s) {
  if (static_cast<std::size_t>(theta.rows()) != w.size()) {
    fail(ErrorCode::DimensionMismatch, "state rows differ from weight count");
  }
  const double n = static_cast<double>(theta.rows());
  if (s == Strategy::I) return theta.colwise().sum().transpose() / n;
  return (to_eigen(w).transpose() * theta).transpose() / n;
}

struct TrajectoryRow {
  long t = 0;
  double weighted_grad_norm = 0.0;   ///< || (1/n) sum lambda_i grad F_i(theta_i) ||
  double consensus_param = 0.0;      ///< || (I - M) Theta ||^2_{F,lambda}
  double consensus_tracker = 0.0;    ///< alpha^2 || (I - M) Y ||^2_{F,lambda}
  double dist_to_opt = 0.0;          ///< || mean iterate - theta* ||
  double tracking_residual = 0.0;    ///< || avg(Y) - (1/n) sum lambda_i g_i || / (1 + ||Y||_F)
  double grad_norm_at_mean = 0.0;    ///< || grad F(mean iterate) ||
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;
  long T = 0;
  double alpha = 0.0;
  Strategy strategy = Strategy::II;
  double F0_gap = 0.0;                 ///< F(mean iterate at t=0) - F(theta*)
  double E0_norm2 = 0.0;               ///< ||E^(0)||^2_{F,lambda}
  double sum_grad_norm2 = 0.0;         ///< sum_{t<T} ||grad F(mean iterate)||^2
  double sum_consensus = 0.0;          ///< sum_{t<T} ||E^(t)||^2_{F,lambda}
  double max_tracking_residual = 0.0;
  double max_mean_recursion_residual = 0.0;
};

namespace detail {

// Strategy-matched projection complement (I - M) applied to X.
inline Matrix deviation(const Matrix& x, const Vector& lam, Strategy s) {
  const double n = static_cast<double>(x.rows());
  const Eigen::RowVectorXd mean =
      s == Strategy::I ? Eigen::RowVectorXd(x.colwise().sum() / n) : Eigen::RowVectorXd(lam.transpose() * x / n);
  return x.rowwise() - mean;
}

inline double weighted_sq_norm(const Matrix& x, const Vector& lam) {
  return (lam.asDiagonal() * x.cwiseAbs2()).sum();
}

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace detail

/// Weighted decentralized gradient tracking:
///   Theta+ = M (Theta - alpha Y),   Y+ = M Y + G (g+ - g)
/// with (M, G) = (W_ds, diag(lambda)) for Strategy I and (W, I) for Strategy II.
/// Rows are recorded at t = 0, k, 2k, ... and at t = T.
inline Trajectory run(const QuadraticProblem& p, const WeightVector& w, Strategy strategy,
                      const MixingMatrix& w_row, const MixingMatrix& w_ds, double alpha, long T,
                      std::uint64_t s0, long record_every) {
  check_weights(p, w);
  if (!(alpha > 0.0)) fail(ErrorCode::BadRange, "alpha must be positive");
  if (T < 0) fail(ErrorCode::BadRange, "T must be non-negative");
  if (record_every < 1) fail(ErrorCode::BadRange, "record_every must be >= 1");
  const MixingMatrix& mix = strategy == Strategy::I ? w_ds : w_row;
  if (mix.size() != p.n) fail(ErrorCode::DimensionMismatch, "mixing matrix size differs from problem size");

  const Matrix& m = mix.entries();
  const Vector lam = to_eigen(w);
  const Vector gain = strategy == Strategy::I ? lam : Vector::Ones(p.n);
  const double n = static_cast<double>(p.n);
  const Vector theta_star = closed_form_optimum(p, w);

  auto gradients = [&](const Matrix& theta, long t) {
    Matrix g(p.n, p.d);
    for (int i = 0; i < p.n; ++i) {
      g.row(i) = stochastic_gradient(p, i, t, theta.row(i).transpose(), s0).transpose();
    }
    return g;
  };
  auto tracker_mean = [&](const Matrix& y) -> Vector {
    if (strategy == Strategy::I) return y.colwise().sum().transpose() / n;
    return (lam.transpose() * y).transpose() / n;
  };

  Matrix theta = p.initial;
  Matrix g = gradients(theta, 0);
  Matrix y = gain.asDiagonal() * g;

  Trajectory traj;
  traj.T = T;
  traj.alpha = alpha;
  traj.strategy = strategy;
  {
    const Vector mean0 = weighted_mean_iterate(theta, w, strategy);
    traj.F0_gap = global_loss(p, w, mean0) - global_loss(p, w, theta_star);
    traj.E0_norm2 = detail::weighted_sq_norm(detail::deviation(theta, lam, strategy), lam) +
                    alpha * alpha * detail::weighted_sq_norm(detail::deviation(y, lam, strategy), lam);
  }

  auto observe = [&](long t, bool record) {
    const Vector mean = weighted_mean_iterate(theta, w, strategy);
    const Vector grad_mean = global_gradient(p, w, mean);
    const double cons_p = detail::weighted_sq_norm(detail::deviation(theta, lam, strategy), lam);
    const double cons_y = alpha * alpha * detail::weighted_sq_norm(detail::deviation(y, lam, strategy), lam);
    const Vector target = (lam.transpose() * g).transpose() / n;
    const double residual = (tracker_mean(y) - target).norm() / (1.0 + y.norm());
    if (!std::isfinite(grad_mean.squaredNorm()) || !std::isfinite(cons_p) || !std::isfinite(cons_y)) {
      fail(ErrorCode::NonFinite, "metrics overflowed at t = " + std::to_string(t) +
                                     " (alpha = " + std::to_string(alpha) + ")");
    }
    traj.max_tracking_residual = std::max(traj.max_tracking_residual, residual);
    if (t < T) {
      traj.sum_grad_norm2 += grad_mean.squaredNorm();
      traj.sum_consensus += cons_p + cons_y;
    }
    if (!record) return;
    Vector full = Vector::Zero(p.d);
    for (int i = 0; i < p.n; ++i) full += lam(i) * local_gradient(p, i, theta.row(i).transpose());
    TrajectoryRow row;
    row.t = t;
    row.weighted_grad_norm = full.norm() / n;
    row.consensus_param = cons_p;
    row.consensus_tracker = cons_y;
    row.dist_to_opt = (mean - theta_star).norm();
    row.tracking_residual = residual;
    row.grad_norm_at_mean = grad_mean.norm();
    traj.rows.push_back(row);
  };

  for (long t = 0; t < T; ++t) {
    observe(t, t % record_every == 0);
    const Vector mean_before = weighted_mean_iterate(theta, w, strategy);
    const Vector step = (lam.transpose() * g).transpose() / n;

    Matrix theta_next = m * (theta - alpha * y);
    Matrix g_next = gradients(theta_next, t + 1);
    y = m * y + gain.asDiagonal() * (g_next - g);
    theta = std::move(theta_next);
    g = std::move(g_next);
    if (!detail::all_finite(theta) || !detail::all_finite(y)) {
      fail(ErrorCode::NonFinite, "state became non-finite at t = " + std::to_string(t + 1) +
                                     " (alpha = " + std::to_string(alpha) + ")");
    }
    const Vector mean_after = weighted_mean_iterate(theta, w, strategy);
    const double drift = (mean_after - mean_before + alpha * step).norm() /
                         (1.0 + mean_before.norm() + alpha * step.norm());
    traj.max_mean_recursion_residual = std::max(traj.max_mean_recursion_residual, drift);
  }
  observe(T, true);
  return traj;
}

struct MultiSeedResult {
  Trajectory averaged;
  std::vector<Trajectory> per_seed;
  std::vector<std::uint64_t> seeds;
};

/// Pointwise mean of every metric at matching t.
inline Trajectory average_trajectories(const std::vector<Trajectory>& runs) {
  if (runs.empty()) fail(ErrorCode::BadRange, "nothing to average");
  Trajectory avg = runs.front();
  const double k = static_cast<double>(runs.size());
  auto mean_of = [&](auto field) {
    double acc = 0.0;
    for (const auto& r : runs) acc += field(r);
    return acc / k;
  };
  for (std::size_t j = 0; j < avg.rows.size(); ++j) {
    for (const auto& r : runs) {
      if (r.rows.size() != avg.rows.size() || r.rows[j].t != avg.rows[j].t) {
        fail(ErrorCode::DimensionMismatch, "trajectories record different iterations");
      }
    }
    auto& row = avg.rows[j];
    row.weighted_grad_norm = mean_of([&](const Trajectory& r) { return r.rows[j].weighted_grad_norm; });
    row.consensus_param = mean_of([&](const Trajectory& r) { return r.rows[j].consensus_param; });
    row.consensus_tracker = mean_of([&](const Trajectory& r) { return r.rows[j].consensus_tracker; });
    row.dist_to_opt = mean_of([&](const Trajectory& r) { return r.rows[j].dist_to_opt; });
    row.tracking_residual = mean_of([&](const Trajectory& r) { return r.rows[j].tracking_residual; });
    row.grad_norm_at_mean = mean_of([&](const Trajectory& r) { return r.rows[j].grad_norm_at_mean; });
  }
  avg.F0_gap = mean_of([](const Trajectory& r) { return r.F0_gap; });
  avg.E0_norm2 = mean_of([](const Trajectory& r) { return r.E0_norm2; });
  avg.sum_grad_norm2 = mean_of([](const Trajectory& r) { return r.sum_grad_norm2; });
  avg.sum_consensus = mean_of([](const Trajectory& r) { return r.sum_consensus; });
  for (const auto& r : runs) {
    avg.max_tracking_residual = std::max(avg.max_tracking_residual, r.max_tracking_residual);
    avg.max_mean_recursion_residual = std::max(avg.max_mean_recursion_residual, r.max_mean_recursion_residual);
  }
  return avg;
}

/// One run per seed: the seed generates the problem instance and is the base
/// noise seed s0. Runs are spread over `jobs` worker threads; results are
/// independent of scheduling.
inline MultiSeedResult multi_seed(const ProblemConfig& base, const WeightVector& w, Strategy strategy,
                                  const MixingMatrix& w_row, const MixingMatrix& w_ds, double alpha,
                                  long T, long record_every, const std::vector<std::uint64_t>& seeds,
                                  int jobs = 1) {
  if (seeds.empty()) fail(ErrorCode::BadRange, "need at least one seed");
  MultiSeedResult out;
  out.seeds = seeds;
  out.per_seed.resize(seeds.size());
  auto one = [&](std::size_t k) {
    ProblemConfig cfg = base;
    cfg.seed = seeds[k];
    const auto problem = generate_problem(cfg);
    out.per_seed[k] = run(problem, w, strategy, w_row, w_ds, alpha, T, seeds[k], record_every);
  };
  const std::size_t workers = static_cast<std::size_t>(std::max(1, jobs));
  for (std::size_t start = 0; start < seeds.size(); start += workers) {
    std::vector<std::future<void>> batch;
    for (std::size_t k = start; k < std::min(seeds.size(), start + workers); ++k) {
      batch.push_back(std::async(workers == 1 ? std::launch::deferred : std::launch::async, one, k));
    }
    for (auto& f : batch) f.get();
  }
  out.averaged = average_trajectories(out.per_seed);
  return out;
}

inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,weighted_grad_norm,consensus_param,consensus_tracker,dist_to_opt,tracking_residual,"
         "grad_norm_at_mean\n";
  char buf[256];
  for (const auto& r : traj.rows) {
    std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t,
                  r.weighted_grad_norm, r.consensus_param, r.consensus_tracker, r.dist_to_opt,
                  r.tracking_residual, r.grad_norm_at_mean);
    out << buf;
  }
}

}  // namespace wgt
