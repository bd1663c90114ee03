#include "reluforge/rates.hpp"

#include <cmath>
#include <stdexcept>

namespace reluforge {

double covering_bound(double L, double W, double P, double B, double delta) {
  if (L <= 0.0 || W <= 0.0 || P <= 0.0 || B <= 0.0)
    throw std::invalid_argument("covering_bound: dimensions must be positive");
  if (!(delta > 0.0 && delta <= 1.0))
    throw std::invalid_argument("covering_bound: delta must lie in (0,1]");
  const double b = std::max(B, 1.0);
  return 2.0 * P * L * std::log(b * (W + 1.0)) + P * std::log(L / delta);
}

Schedule schedule(ModelFamily model, TaskKind task, double N, double alpha,
                  double d, double D, std::optional<double> beta) {
  if (N < 2.0) throw std::invalid_argument("schedule: N must be >= 2");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("schedule: alpha must lie in (0,1]");
  if (d < 0.0 || D < 1.0) throw std::invalid_argument("schedule: bad dimensions");
  if (task == TaskKind::classification && !beta.has_value())
    throw std::invalid_argument("schedule: classification requires beta");
  if (beta.has_value() && *beta <= 0.0)
    throw std::invalid_argument("schedule: beta must be positive");

  Schedule s;
  s.model = model;
  s.task = task;
  s.N = N;
  s.alpha = alpha;
  s.d = d;
  s.D = D;
  s.beta = beta.value_or(0.0);

  const double logN = std::log(N);
  const double eff = (model == ModelFamily::model1)
                         ? d
                         : std::max(1.0, alpha * d);  // 1 v alpha*d
  const double log_power = (model == ModelFamily::model1) ? 5.0 : 3.0;

  double denom = 0.0;
  if (task == TaskKind::regression) {
    denom = 2.0 * alpha + eff;
  } else {
    denom = alpha * (*beta + 2.0) + eff;
  }
  s.eps_exponent = 1.0 / denom;
  s.eps_N = std::pow(logN, log_power / denom) * std::pow(N, -1.0 / denom);

  const double inv_eps = 1.0 / s.eps_N;
  const double log_inv_eps = std::log(std::max(inv_eps, std::exp(1.0)));
  if (model == ModelFamily::model1) {
    s.L_N = std::log(D) * log_inv_eps * log_inv_eps;
    s.P_N = D * std::log(D) * log_inv_eps * log_inv_eps * std::pow(inv_eps, d);
    s.W_N = D * std::pow(inv_eps, d);
    s.B_N = inv_eps * inv_eps;
  } else {
    s.L_N = std::log(D * inv_eps);
    s.P_N = D * std::log(D * inv_eps) * std::pow(inv_eps, eff);
    s.W_N = D * std::pow(inv_eps, eff);
    s.B_N = (task == TaskKind::classification) ? inv_eps : 1.0;
  }

  if (task == TaskKind::regression) {
    s.risk_exponent = 2.0 * alpha / denom;
    s.predicted_risk = D * std::pow(std::log(D), 3.0) *
                       std::pow(logN, 2.0 * alpha * log_power / denom) *
                       std::pow(N, -s.risk_exponent);
  } else {
    s.risk_exponent = alpha * (*beta + 1.0) / denom;
    s.predicted_risk = D * std::pow(std::log(D), 3.0) *
                       std::pow(logN, log_power * alpha * (*beta + 1.0) / denom) *
                       std::pow(N, -s.risk_exponent);
  }
  return s;
}

}  // namespace reluforge
