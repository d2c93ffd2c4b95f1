#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "error.hpp"

namespace wgt {

/// Strategy I: weighted local losses with W_ds. Strategy II: uniform losses
/// with the lambda-stationary W.
enum class Strategy { I, II };

constexpr std::string_view to_string(Strategy s) { return s == Strategy::I ? "I" : "II"; }

inline Strategy parse_strategy(std::string_view s) {
  if (s == "I" || s == "1") return Strategy::I;
  if (s == "II" || s == "2") return Strategy::II;
  fail(ErrorCode::Parse, "unknown strategy '" + std::string(s) + "'");
}

/// Inputs shared by every closed-form bound. rho is rho_J for Strategy I and
/// rho_Lambda for Strategy II; kappa and lambda_max only enter Strategy I.
struct BoundInputs {
  double beta = 1.0;
  double upsilon2 = 0.0;
  double alpha = 0.0;
  long T = 1;
  int n = 1;
  double rho = 0.0;
  double c_lambda = 1.0;
  double kappa = 1.0;
  double lambda_max = 1.0;
  double F0_gap = 0.0;
  double E0_norm2 = 0.0;

  void validate() const {
    if (!(beta > 0.0)) fail(ErrorCode::BadRange, "beta must be positive");
    if (!(upsilon2 >= 0.0)) fail(ErrorCode::BadRange, "upsilon2 must be non-negative");
    if (!(alpha > 0.0)) fail(ErrorCode::BadRange, "alpha must be positive");
    if (T < 0) fail(ErrorCode::BadRange, "T must be non-negative");
    if (n < 1) fail(ErrorCode::BadRange, "n must be positive");
    if (!(rho >= 0.0 && rho < 1.0)) fail(ErrorCode::RhoOutOfRange, "rho must lie in [0, 1)");
    if (!(F0_gap >= 0.0) || !(E0_norm2 >= 0.0)) fail(ErrorCode::BadRange, "initial gaps must be non-negative");
  }
};

/// A(rho) = (1 + rho^2) / (1 - rho^2)^3
inline double A_of(double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) fail(ErrorCode::RhoOutOfRange, "rho must lie in [0, 1)");
  const double q = 1.0 - rho * rho;
  return (1.0 + rho * rho) / (q * q * q);
}

/// B(rho) = 2 (1 + 3 rho^4) / ((1 - rho^2)^3 (1 - rho))
inline double B_of(double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) fail(ErrorCode::RhoOutOfRange, "rho must lie in [0, 1)");
  const double q = 1.0 - rho * rho;
  const double r4 = rho * rho * rho * rho;
  return 2.0 * (1.0 + 3.0 * r4) / (q * q * q * (1.0 - rho));
}

namespace detail {
inline double lambda_penalty(Strategy s, double lambda_max) { return s == Strategy::I ? lambda_max : 1.0; }
}  // namespace detail

/// Strict step-size ceiling of the rate theorem: sqrt(1 / (62 B)) / (lambda_max beta)
/// for Strategy I, without lambda_max for Strategy II.
inline double step_size_max(Strategy s, double beta, double rho, double lambda_max) {
  if (!(beta > 0.0)) fail(ErrorCode::BadRange, "beta must be positive");
  return std::sqrt(1.0 / (62.0 * B_of(rho))) / (detail::lambda_penalty(s, lambda_max) * beta);
}

/// Step-size ceiling of the accumulated consensus bound: sqrt(1 / (15 B)) / (2 lambda_max beta).
inline double consensus_step_size_max(Strategy s, double beta, double rho, double lambda_max) {
  if (!(beta > 0.0)) fail(ErrorCode::BadRange, "beta must be positive");
  return std::sqrt(1.0 / (15.0 * B_of(rho))) / (2.0 * detail::lambda_penalty(s, lambda_max) * beta);
}

struct CConstants {
  double C1 = 1.0;
  double C2 = 1.0;
};

/// C1 = 1 - 60 L^2 a^2 b^2 B, C2 = 1 - 2 L^2 a^2 b^2 B / C1 with L = lambda_max
/// for Strategy I (the primed constants) and L = 1 for Strategy II.
/// The raw values, which may be non-positive when alpha is too large.
inline CConstants C_constants_unchecked(Strategy s, const BoundInputs& in) {
  in.validate();
  const double l = detail::lambda_penalty(s, in.lambda_max);
  const double x = l * l * in.alpha * in.alpha * in.beta * in.beta * B_of(in.rho);
  CConstants c;
  c.C1 = 1.0 - 60.0 * x;
  c.C2 = 1.0 - 2.0 * x / c.C1;
  return c;
}

inline CConstants C_constants(Strategy s, const BoundInputs& in) {
  const auto c = C_constants_unchecked(s, in);
  if (!(c.C1 > 0.0)) fail(ErrorCode::StepTooLarge, "C1 <= 0: step size too large");
  if (!(c.C2 > 0.0)) fail(ErrorCode::StepTooLarge, "C2 <= 0: step size too large");
  return c;
}

namespace detail {

// 6 [3 (1 - rho^2)^2 + rho^2] / (1 - rho^2)^3
inline double init_coefficient(double rho) {
  const double q = 1.0 - rho * rho;
  return 6.0 * (3.0 * q * q + rho * rho) / (q * q * q);
}

// A + 1.5 c_lambda a^2 b^2 B, with the higher-order part scaled by `inflate`.
inline double noise_bracket(const BoundInputs& in, double inflate) {
  const double ab2 = in.alpha * in.alpha * in.beta * in.beta;
  return A_of(in.rho) + inflate * 1.5 * in.c_lambda * ab2 * B_of(in.rho);
}

}  // namespace detail

/// Upper bound on (1/T) sum_t E||grad F(mean iterate)||^2.
inline double rate_bound(Strategy s, const BoundInputs& in) {
  const auto c = C_constants(s, in);
  const double T = static_cast<double>(in.T);
  if (T <= 0.0) fail(ErrorCode::BadRange, "rate bound needs T >= 1");
  const double ab2 = in.alpha * in.alpha * in.beta * in.beta;
  const double kappa_pen = s == Strategy::I ? in.kappa : 1.0;
  const double lmax2_pen = s == Strategy::I ? in.lambda_max * in.lambda_max : 1.0;

  const double optimality = 2.0 * in.F0_gap / (in.alpha * c.C2 * T);
  const double noise = in.alpha * in.c_lambda * in.beta * in.upsilon2 / c.C2;
  const double init = kappa_pen / (c.C1 * c.C2) * detail::init_coefficient(in.rho) * in.beta * in.beta /
                      (in.n * T) * in.E0_norm2;
  const double consensus_noise =
      lmax2_pen / (c.C1 * c.C2) * 18.0 * ab2 * in.upsilon2 * detail::noise_bracket(in, 1.0);
  return optimality + noise + init + consensus_noise;
}

/// Strategy I bound obtained by rescaling smoothness and noise constants by
/// lambda_max in a plain Euclidean analysis.
inline double euclidean_rate_bound(const BoundInputs& in) {
  const auto c = C_constants(Strategy::I, in);
  const double T = static_cast<double>(in.T);
  if (T <= 0.0) fail(ErrorCode::BadRange, "rate bound needs T >= 1");
  const double ab2 = in.alpha * in.alpha * in.beta * in.beta;
  const double lm = in.lambda_max;
  const double lm2 = lm * lm;

  const double optimality = 2.0 * in.F0_gap / (in.alpha * c.C2 * T);
  const double noise = lm2 * lm / (in.n * c.C2) * in.alpha * in.beta * in.upsilon2;
  const double init = lm2 / (c.C1 * c.C2) * detail::init_coefficient(in.rho) * in.beta * in.beta /
                      (in.n * T) * in.E0_norm2;
  const double consensus_noise =
      lm2 * lm2 / (c.C1 * c.C2) * 18.0 * ab2 * in.upsilon2 * detail::noise_bracket(in, lm2);
  return optimality + noise + init + consensus_noise;
}

/// Upper bound on sum_{t<T} E||E^(t)||^2_{F,lambda}; `sum_grad_norms` is
/// sum_{t<T} E||grad F(mean iterate)||^2 from the same run.
inline double consensus_bound(Strategy s, const BoundInputs& in, double sum_grad_norms) {
  if (in.T == 0) return 0.0;
  in.validate();
  const double l = detail::lambda_penalty(s, in.lambda_max);
  const double x = l * l * in.alpha * in.alpha * in.beta * in.beta * B_of(in.rho);
  const double C1 = 1.0 - 60.0 * x;
  if (!(C1 > 0.0)) fail(ErrorCode::StepTooLarge, "C1 <= 0: step size too large");

  const double q = 1.0 - in.rho * in.rho;
  const double init_coeff = (18.0 * q * q + 6.0 * in.rho * in.rho) / (q * q * q);
  const double kappa_pen = s == Strategy::I ? in.kappa : 1.0;
  const double lmax2_pen = l * l;
  const double a2 = in.alpha * in.alpha;
  const double T = static_cast<double>(in.T);

  return kappa_pen / C1 * init_coeff * in.E0_norm2 +
         lmax2_pen / C1 * 2.0 * in.n * a2 * B_of(in.rho) * sum_grad_norms +
         lmax2_pen / C1 * 18.0 * in.n * a2 * in.upsilon2 * T * detail::noise_bracket(in, 1.0);
}

}  // namespace wgt
