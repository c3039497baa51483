// Copyright (c) the ordo authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ordo/error.hpp"

namespace ordo {

/// One (model size, trained tokens, test loss) observation.
struct ScalingObservation {
  double n_params = 0.0;
  double tokens = 0.0;
  double loss = 0.0;
};

/// Fitted constants of L(N, D) = E + A / N^alpha + B / D^beta.
struct ScalingConstants {
  double A = 0.0;
  double B = 0.0;
  double E = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

/// Per-model-size data fit L(D) = e_prime + b0 / D^beta0.
struct DataScalingFit {
  double e_prime = 0.0;
  double b0 = 0.0;
  double beta0 = 0.0;
  double n_params = 0.0;
};

/// Model-size fit E' = e0 + a0 / N^alpha0 over the per-size loss floors.
struct ModelScalingFit {
  double e0 = 0.0;
  double a0 = 0.0;
  double alpha0 = 0.0;
};

struct FitConfig {
  double huber_delta = 1e-3;
  double step_size = 0.05;
  std::size_t max_iterations = 50000;
  double convergence_tol = 1e-10;
};

/// Internal optimizer parameters (a, b, e, alpha, beta); A = exp(a),
/// B = exp(b), E = exp(e).
struct FitParams {
  double a = 0.0;
  double b = 0.0;
  double e = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

struct FitResult {
  ScalingConstants constants;
  FitParams init;
  FitParams final_params;
  std::size_t iterations = 0;
  double objective = 0.0;
  bool converged = false;
  std::vector<double> objective_trace;  // objective after each accepted step, starting at init
};

/// Thrown when the joint fit exhausts max_iterations; carries the best
/// parameters found so far.
class ScalingConvergenceError : public Error {
 public:
  ScalingConvergenceError(const std::string& message, FitResult best)
      : Error(ErrorCode::ConvergenceFailure, message), best_(std::move(best)) {}

  const FitResult& best() const noexcept { return best_; }

 private:
  FitResult best_;
};

/// Huber loss: r^2 / 2 inside |r| <= delta, delta * (|r| - delta / 2) outside.
double huber(double residual, double delta);

double predict_loss(const ScalingConstants& c, double n_params, double tokens);

/// Stage-1 fit of the token-scaling curve at one fixed model size.
DataScalingFit fit_data_scaling(std::span<const ScalingObservation> obs);

/// Stage-2 fit of the loss floor against model size; points are (N, E').
ModelScalingFit fit_model_scaling(std::span<const std::pair<double, double>> points);

/// Initialization for the joint fit from the two stage fits: a = ln a0,
/// b = ln(mean b0), alpha = alpha0, beta = mean beta0, e = ln e0.
FitParams init_from_stages(std::span<const DataScalingFit> data_fits,
                           const ModelScalingFit& model_fit);

/// Huber objective over log-sum-exp residuals
/// sum_i Huber_delta(LSE(a - alpha ln N_i, b - beta ln D_i, e) - ln L_i).
double joint_objective(std::span<const ScalingObservation> obs, const FitParams& p, double delta);

/// Analytic gradient of joint_objective in the order (a, b, e, alpha, beta).
std::array<double, 5> joint_gradient(std::span<const ScalingObservation> obs, const FitParams& p,
                                     double delta);

/// L-BFGS minimization of the joint objective from the given initialization.
FitResult fit_joint(std::span<const ScalingObservation> obs, const FitParams& init,
                    const FitConfig& cfg = {});

/// R^2 of log(l_i - E - A/N^alpha) against log B - beta log D_i over
/// observations sharing one model size.
double r_squared_data(std::span<const ScalingObservation> obs, const ScalingConstants& c);

/// R^2 of log(l_i - E - B/D^beta) against log A - alpha log N_i over
/// observations sharing one token count.
double r_squared_model(std::span<const ScalingObservation> obs, const ScalingConstants& c);

/// Full pipeline: per-size data fits, model-size fit, staged initialization,
/// joint Huber/LSE minimization.
FitResult fit_scaling_pipeline(std::span<const ScalingObservation> obs, const FitConfig& cfg = {});

/// Observations grouped by model size, ascending; preserves input order
/// within each group.
std::vector<std::vector<ScalingObservation>> group_by_model_size(
    std::span<const ScalingObservation> obs);

}  // namespace ordo
