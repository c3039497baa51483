// Copyright (c) the ordo authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#include "ordo/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace ordo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_observations(std::span<const ScalingObservation> obs) {
  for (const auto& o : obs) {
    if (!(o.n_params > 0.0) || !std::isfinite(o.n_params) || !(o.tokens > 0.0) ||
        !std::isfinite(o.tokens) || !(o.loss > 0.0) || !std::isfinite(o.loss)) {
      throw Error(ErrorCode::InvalidScale, "observations must have positive finite N, D, loss");
    }
  }
}

std::size_t count_distinct(std::span<const ScalingObservation> obs, double ScalingObservation::*field) {
  std::set<double> values;
  for (const auto& o : obs) values.insert(o.*field);
  return values.size();
}

struct OffsetPowerFit {
  double offset = 0.0;    // c0
  double coefficient = 0.0;  // c1
  double exponent = 0.0;  // e in y = c0 + c1 * x^-e
  double sse = kInf;
};

// Least squares of y = c0 + c1 * x^-e for a fixed exponent, with x already
// normalized to a geometric mean of one. Linear in (c0, c1), so the 2x2
// normal equations solve it exactly.
OffsetPowerFit solve_linear_part(std::span<const double> x_norm, std::span<const double> y,
                                 double e) {
  const std::size_t n = x_norm.size();
  double s_phi = 0.0, s_phi2 = 0.0, s_y = 0.0, s_phiy = 0.0;
  std::vector<double> phi(n);
  for (std::size_t i = 0; i < n; ++i) {
    phi[i] = std::pow(x_norm[i], -e);
    s_phi += phi[i];
    s_phi2 += phi[i] * phi[i];
    s_y += y[i];
    s_phiy += phi[i] * y[i];
  }
  const double nn = static_cast<double>(n);
  const double det = nn * s_phi2 - s_phi * s_phi;
  OffsetPowerFit fit;
  fit.exponent = e;
  if (!(det > 1e-300) || !std::isfinite(det)) return fit;  // degenerate basis, sse stays +inf
  fit.offset = (s_phi2 * s_y - s_phi * s_phiy) / det;
  fit.coefficient = (nn * s_phiy - s_phi * s_y) / det;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.offset - fit.coefficient * phi[i];
    sse += r * r;
  }
  fit.sse = std::isfinite(sse) ? sse : kInf;
  return fit;
}

// Profiled nonlinear least squares for y = c0 + c1 * x^-e: exhaustive grid
// over the exponent, then golden-section refinement of the bracketing
// interval. x is rescaled to a unit geometric mean so the linear solves stay
// conditioned for token- and parameter-count magnitudes. The exponent is
// searched over (0, 2], the standard bracket for loss scaling curves.
OffsetPowerFit fit_offset_power(std::span<const double> x, std::span<const double> y) {
  constexpr double kExpLo = 1e-4;
  constexpr double kExpHi = 2.0;
  constexpr int kGridPoints = 320;

  double log_gm = 0.0;
  for (double v : x) log_gm += std::log(v);
  log_gm /= static_cast<double>(x.size());
  const double gm = std::exp(log_gm);
  std::vector<double> x_norm(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) x_norm[i] = x[i] / gm;

  std::vector<double> grid(kGridPoints);
  const double log_lo = std::log(kExpLo);
  const double log_hi = std::log(kExpHi);
  for (int i = 0; i < kGridPoints; ++i) {
    grid[static_cast<std::size_t>(i)] =
        std::exp(log_lo + (log_hi - log_lo) * i / (kGridPoints - 1));
  }

  int best = 0;
  OffsetPowerFit best_fit;
  for (int i = 0; i < kGridPoints; ++i) {
    const auto fit = solve_linear_part(x_norm, y, grid[static_cast<std::size_t>(i)]);
    if (fit.sse < best_fit.sse) {
      best_fit = fit;
      best = i;
    }
  }
  if (!std::isfinite(best_fit.sse)) {
    throw Error(ErrorCode::SingularFit, "no exponent yields a solvable least-squares system");
  }

  double lo = grid[static_cast<std::size_t>(std::max(best - 1, 0))];
  double hi = grid[static_cast<std::size_t>(std::min(best + 1, kGridPoints - 1))];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double m1 = hi - inv_phi * (hi - lo);
  double m2 = lo + inv_phi * (hi - lo);
  auto f1 = solve_linear_part(x_norm, y, m1);
  auto f2 = solve_linear_part(x_norm, y, m2);
  for (int it = 0; it < 120 && hi - lo > 1e-13 * hi; ++it) {
    if (f1.sse <= f2.sse) {
      hi = m2;
      m2 = m1;
      f2 = f1;
      m1 = hi - inv_phi * (hi - lo);
      f1 = solve_linear_part(x_norm, y, m1);
    } else {
      lo = m1;
      m1 = m2;
      f1 = f2;
      m2 = lo + inv_phi * (hi - lo);
      f2 = solve_linear_part(x_norm, y, m2);
    }
    if (f1.sse < best_fit.sse) best_fit = f1;
    if (f2.sse < best_fit.sse) best_fit = f2;
  }

  // Reject fits with no decaying power-law signal (flat data) and fits whose
  // optimum violates positivity of the offset or coefficient.
  double mean_y = 0.0;
  for (double v : y) mean_y += v;
  mean_y /= static_cast<double>(y.size());
  double sse_const = 0.0;
  for (double v : y) sse_const += (v - mean_y) * (v - mean_y);
  if (best_fit.sse >= sse_const * (1.0 - 1e-9)) {
    throw Error(ErrorCode::SingularFit, "data carries no power-law trend; exponent unidentifiable");
  }
  if (!(best_fit.coefficient > 0.0) || !(best_fit.offset > 0.0)) {
    throw Error(ErrorCode::SingularFit, "fitted curve is not a positive decaying power law");
  }
  // Undo the normalization: c1 * (x/gm)^-e == (c1 * gm^e) * x^-e.
  best_fit.coefficient = std::exp(std::log(best_fit.coefficient) + best_fit.exponent * log_gm);
  return best_fit;
}

double safe_log(double v, const char* what) {
  if (!(v > 0.0)) throw Error(ErrorCode::DomainError, std::string(what) + " must be positive");
  return std::log(v);
}

struct LsePoint {
  double lse = 0.0;
  double s1 = 0.0;  // softmax weight of the model-size term
  double s2 = 0.0;  // softmax weight of the token term
  double s3 = 0.0;  // softmax weight of the floor term
};

LsePoint lse3(double u1, double u2, double u3) {
  const double m = std::max({u1, u2, u3});
  const double e1 = std::exp(u1 - m);
  const double e2 = std::exp(u2 - m);
  const double e3 = std::exp(u3 - m);
  const double sum = e1 + e2 + e3;
  return {m + std::log(sum), e1 / sum, e2 / sum, e3 / sum};
}

double huber_derivative(double r, double delta) {
  if (std::abs(r) <= delta) return r;
  return r > 0.0 ? delta : -delta;
}

std::array<double, 5> to_array(const FitParams& p) { return {p.a, p.b, p.e, p.alpha, p.beta}; }

FitParams from_array(const std::array<double, 5>& v) { return {v[0], v[1], v[2], v[3], v[4]}; }

}  // namespace

double huber(double residual, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidDelta, "huber delta must be positive");
  const double r = std::abs(residual);
  if (r <= delta) return 0.5 * r * r;
  return delta * (r - 0.5 * delta);
}

double predict_loss(const ScalingConstants& c, double n_params, double tokens) {
  if (!(n_params > 0.0) || !(tokens > 0.0)) {
    throw Error(ErrorCode::InvalidScale, "model size and token count must be positive");
  }
  return c.E + c.A / std::pow(n_params, c.alpha) + c.B / std::pow(tokens, c.beta);
}

DataScalingFit fit_data_scaling(std::span<const ScalingObservation> obs) {
  check_observations(obs);
  if (obs.size() < 4) {
    throw Error(ErrorCode::InsufficientData, "data-scaling fit needs at least 4 observations");
  }
  const double n_params = obs.front().n_params;
  for (const auto& o : obs) {
    if (o.n_params != n_params) {
      throw Error(ErrorCode::DimensionError, "data-scaling fit requires a single model size");
    }
  }
  if (count_distinct(obs, &ScalingObservation::tokens) < 3) {
    throw Error(ErrorCode::SingularFit, "need at least 3 distinct token counts");
  }
  std::vector<double> d, l;
  d.reserve(obs.size());
  l.reserve(obs.size());
  for (const auto& o : obs) {
    d.push_back(o.tokens);
    l.push_back(o.loss);
  }
  const auto fit = fit_offset_power(d, l);
  return {fit.offset, fit.coefficient, fit.exponent, n_params};
}

ModelScalingFit fit_model_scaling(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) {
    throw Error(ErrorCode::InsufficientData, "model-scaling fit needs at least 3 model sizes");
  }
  std::set<double> distinct;
  for (const auto& [n, e_prime] : points) {
    if (!(n > 0.0) || !std::isfinite(e_prime)) {
      throw Error(ErrorCode::InvalidScale, "model sizes must be positive and floors finite");
    }
    distinct.insert(n);
  }
  if (distinct.size() < 3) {
    throw Error(ErrorCode::SingularFit, "need at least 3 distinct model sizes");
  }
  std::vector<double> n, e_prime;
  n.reserve(points.size());
  e_prime.reserve(points.size());
  for (const auto& [nv, ev] : points) {
    n.push_back(nv);
    e_prime.push_back(ev);
  }
  const auto fit = fit_offset_power(n, e_prime);
  return {fit.offset, fit.coefficient, fit.exponent};
}

FitParams init_from_stages(std::span<const DataScalingFit> data_fits,
                           const ModelScalingFit& model_fit) {
  if (data_fits.empty()) {
    throw Error(ErrorCode::InsufficientData, "at least one data-scaling fit required");
  }
  double b0_mean = 0.0;
  double beta0_mean = 0.0;
  for (const auto& f : data_fits) {
    b0_mean += f.b0;
    beta0_mean += f.beta0;
  }
  b0_mean /= static_cast<double>(data_fits.size());
  beta0_mean /= static_cast<double>(data_fits.size());

  FitParams init;
  init.a = safe_log(model_fit.a0, "model-scaling coefficient");
  init.b = safe_log(b0_mean, "mean data-scaling coefficient");
  init.e = safe_log(model_fit.e0, "model-scaling floor");
  init.alpha = model_fit.alpha0;
  init.beta = beta0_mean;
  return init;
}

double joint_objective(std::span<const ScalingObservation> obs, const FitParams& p, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidDelta, "huber delta must be positive");
  double total = 0.0;
  for (const auto& o : obs) {
    const auto point = lse3(p.a - p.alpha * std::log(o.n_params),
                            p.b - p.beta * std::log(o.tokens), p.e);
    total += huber(point.lse - std::log(o.loss), delta);
  }
  return total;
}

std::array<double, 5> joint_gradient(std::span<const ScalingObservation> obs, const FitParams& p,
                                     double delta) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidDelta, "huber delta must be positive");
  std::array<double, 5> grad{};
  for (const auto& o : obs) {
    const double ln_n = std::log(o.n_params);
    const double ln_d = std::log(o.tokens);
    const auto point = lse3(p.a - p.alpha * ln_n, p.b - p.beta * ln_d, p.e);
    const double dh = huber_derivative(point.lse - std::log(o.loss), delta);
    grad[0] += dh * point.s1;
    grad[1] += dh * point.s2;
    grad[2] += dh * point.s3;
    grad[3] += dh * (-point.s1 * ln_n);
    grad[4] += dh * (-point.s2 * ln_d);
  }
  return grad;
}

FitResult fit_joint(std::span<const ScalingObservation> obs, const FitParams& init,
                    const FitConfig& cfg) {
  check_observations(obs);
  if (obs.size() < 6 || count_distinct(obs, &ScalingObservation::n_params) < 2 ||
      count_distinct(obs, &ScalingObservation::tokens) < 3) {
    throw Error(ErrorCode::InsufficientData,
                "joint fit needs >= 6 observations over >= 2 model sizes and >= 3 token counts");
  }
  if (!(cfg.huber_delta > 0.0)) throw Error(ErrorCode::InvalidDelta, "huber delta must be positive");

  constexpr std::size_t kHistory = 10;
  auto theta = to_array(init);
  auto eval_f = [&](const std::array<double, 5>& t) {
    return joint_objective(obs, from_array(t), cfg.huber_delta);
  };
  auto eval_g = [&](const std::array<double, 5>& t) {
    return joint_gradient(obs, from_array(t), cfg.huber_delta);
  };

  double f = eval_f(theta);
  auto g = eval_g(theta);
  std::array<double, 5> best_theta = theta;
  double best_f = f;
  std::vector<double> trace{f};

  std::vector<std::array<double, 5>> s_hist, y_hist;
  std::vector<double> rho_hist;
  auto dot = [](const std::array<double, 5>& u, const std::array<double, 5>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < 5; ++i) s += u[i] * v[i];
    return s;
  };

  // Armijo backtracking from unit step.
  auto line_search = [&](const std::array<double, 5>& from, double f0,
                         const std::array<double, 5>& direction, double slope,
                         std::array<double, 5>& theta_out, double& f_out) {
    double step = 1.0;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t k = 0; k < 5; ++k) theta_out[k] = from[k] + step * direction[k];
      f_out = eval_f(theta_out);
      if (std::isfinite(f_out) && f_out <= f0 + 1e-4 * step * slope) return true;
      step *= 0.5;
    }
    return false;
  };

  auto reset_history = [&] {
    s_hist.clear();
    y_hist.clear();
    rho_hist.clear();
  };

  std::size_t iterations = 0;
  bool converged = false;
  for (; iterations < cfg.max_iterations; ++iterations) {
    double g_norm = std::sqrt(dot(g, g));
    if (g_norm < 1e-13) {
      converged = true;
      break;
    }

    // Two-loop recursion; before any curvature pairs exist, scale the
    // steepest-descent direction by the configured step size.
    std::array<double, 5> direction = g;
    if (s_hist.empty()) {
      for (double& v : direction) v *= -cfg.step_size;
    } else {
      std::vector<double> alpha_coeffs(s_hist.size());
      for (std::size_t i = s_hist.size(); i-- > 0;) {
        alpha_coeffs[i] = rho_hist[i] * dot(s_hist[i], direction);
        for (std::size_t k = 0; k < 5; ++k) direction[k] -= alpha_coeffs[i] * y_hist[i][k];
      }
      const double gamma =
          dot(s_hist.back(), y_hist.back()) / std::max(dot(y_hist.back(), y_hist.back()), 1e-300);
      for (double& v : direction) v *= gamma;
      for (std::size_t i = 0; i < s_hist.size(); ++i) {
        const double beta_coeff = rho_hist[i] * dot(y_hist[i], direction);
        for (std::size_t k = 0; k < 5; ++k) {
          direction[k] += s_hist[i][k] * (alpha_coeffs[i] - beta_coeff);
        }
      }
      for (double& v : direction) v = -v;
    }

    double slope = dot(g, direction);
    if (slope >= 0.0) {  // not a descent direction
      reset_history();
      for (std::size_t k = 0; k < 5; ++k) direction[k] = -cfg.step_size * g[k];
      slope = dot(g, direction);
    }

    std::array<double, 5> theta_new = theta;
    double f_new = f;
    bool accepted = line_search(theta, f, direction, slope, theta_new, f_new);

    // Quasi-Newton step made no measurable progress: retry once along the
    // normalized gradient before declaring convergence.
    if ((!accepted || f - f_new < cfg.convergence_tol) && !s_hist.empty()) {
      reset_history();
      const double scale = cfg.step_size / std::max(1.0, g_norm);
      for (std::size_t k = 0; k < 5; ++k) direction[k] = -scale * g[k];
      slope = dot(g, direction);
      accepted = line_search(theta, f, direction, slope, theta_new, f_new);
    }
    if (!accepted) {
      converged = true;  // no descent representable at this precision
      break;
    }

    const auto g_new = eval_g(theta_new);
    std::array<double, 5> s{}, y{};
    for (std::size_t k = 0; k < 5; ++k) {
      s[k] = theta_new[k] - theta[k];
      y[k] = g_new[k] - g[k];
    }
    const double sy = dot(s, y);
    if (sy > 1e-12 * std::sqrt(dot(s, s)) * std::sqrt(dot(y, y))) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (s_hist.size() > kHistory) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
      }
    }

    const double improvement = f - f_new;
    theta = theta_new;
    f = f_new;
    g = g_new;
    trace.push_back(f);
    if (f < best_f) {
      best_f = f;
      best_theta = theta;
    }
    if (improvement < cfg.convergence_tol) {
      ++iterations;
      converged = true;
      break;
    }
  }

  FitResult result;
  result.init = init;
  result.final_params = from_array(best_theta);
  result.iterations = iterations;
  result.objective = best_f;
  result.converged = converged;
  result.objective_trace = std::move(trace);
  result.constants = {std::exp(result.final_params.a), std::exp(result.final_params.b),
                      std::exp(result.final_params.e), result.final_params.alpha,
                      result.final_params.beta};
  if (!converged) {
    throw ScalingConvergenceError(
        "joint fit did not converge within " + std::to_string(cfg.max_iterations) + " iterations",
        result);
  }
  if (!(result.constants.alpha > 0.0) || !(result.constants.beta > 0.0)) {
    result.converged = false;
    throw ScalingConvergenceError("joint fit converged to non-positive exponents", result);
  }
  return result;
}

namespace {

double r_squared_impl(std::span<const double> truth, std::span<const double> prediction) {
  double mean = 0.0;
  for (double v : truth) mean += v;
  mean /= static_cast<double>(truth.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_res += (truth[i] - prediction[i]) * (truth[i] - prediction[i]);
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  if (!(ss_tot > 0.0)) {
    throw Error(ErrorCode::InsufficientData, "degenerate regression: ground truth is constant");
  }
  return 1.0 - ss_res / ss_tot;
}

}  // namespace

double r_squared_data(std::span<const ScalingObservation> obs, const ScalingConstants& c) {
  check_observations(obs);
  if (obs.size() < 2 || count_distinct(obs, &ScalingObservation::tokens) < 2) {
    throw Error(ErrorCode::InsufficientData, "need >= 2 distinct token counts");
  }
  const double n_params = obs.front().n_params;
  for (const auto& o : obs) {
    if (o.n_params != n_params) {
      throw Error(ErrorCode::DimensionError, "r_squared_data expects a single model size");
    }
  }
  const double model_term = c.A / std::pow(n_params, c.alpha);
  std::vector<double> truth, pred;
  truth.reserve(obs.size());
  pred.reserve(obs.size());
  for (const auto& o : obs) {
    const double residual = o.loss - c.E - model_term;
    if (!(residual > 0.0)) {
      throw Error(ErrorCode::DomainError,
                  "loss minus floor and model term must stay positive for the log transform");
    }
    truth.push_back(std::log(residual));
    pred.push_back(std::log(c.B) - c.beta * std::log(o.tokens));
  }
  return r_squared_impl(truth, pred);
}

double r_squared_model(std::span<const ScalingObservation> obs, const ScalingConstants& c) {
  check_observations(obs);
  if (obs.size() < 2 || count_distinct(obs, &ScalingObservation::n_params) < 2) {
    throw Error(ErrorCode::InsufficientData, "need >= 2 distinct model sizes");
  }
  const double tokens = obs.front().tokens;
  for (const auto& o : obs) {
    if (o.tokens != tokens) {
      throw Error(ErrorCode::DimensionError, "r_squared_model expects a single token count");
    }
  }
  const double token_term = c.B / std::pow(tokens, c.beta);
  std::vector<double> truth, pred;
  truth.reserve(obs.size());
  pred.reserve(obs.size());
  for (const auto& o : obs) {
    const double residual = o.loss - c.E - token_term;
    if (!(residual > 0.0)) {
      throw Error(ErrorCode::DomainError,
                  "loss minus floor and token term must stay positive for the log transform");
    }
    truth.push_back(std::log(residual));
    pred.push_back(std::log(c.A) - c.alpha * std::log(o.n_params));
  }
  return r_squared_impl(truth, pred);
}

std::vector<std::vector<ScalingObservation>> group_by_model_size(
    std::span<const ScalingObservation> obs) {
  std::map<double, std::vector<ScalingObservation>> groups;
  for (const auto& o : obs) groups[o.n_params].push_back(o);
  std::vector<std::vector<ScalingObservation>> out;
  out.reserve(groups.size());
  for (auto& [_, group] : groups) out.push_back(std::move(group));
  return out;
}

FitResult fit_scaling_pipeline(std::span<const ScalingObservation> obs, const FitConfig& cfg) {
  check_observations(obs);
  const auto groups = group_by_model_size(obs);

  std::vector<DataScalingFit> data_fits;
  for (const auto& group : groups) {
    if (group.size() < 4) continue;  // too short a token series for stage 1
    std::set<double> distinct;
    for (const auto& o : group) distinct.insert(o.tokens);
    if (distinct.size() < 3) continue;
    try {
      data_fits.push_back(fit_data_scaling(group));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularFit) throw;  // skip degenerate series
    }
  }
  if (data_fits.size() < 3) {
    throw Error(ErrorCode::InsufficientData,
                "stage fits need >= 3 model sizes with >= 4 usable checkpoints each");
  }

  std::vector<std::pair<double, double>> floors;
  floors.reserve(data_fits.size());
  for (const auto& f : data_fits) floors.emplace_back(f.n_params, f.e_prime);
  const auto model_fit = fit_model_scaling(floors);

  const auto init = init_from_stages(data_fits, model_fit);
  return fit_joint(obs, init, cfg);
}

}  // namespace ordo
