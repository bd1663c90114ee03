#ifndef RELUFORGE_RATES_HPP
#define RELUFORGE_RATES_HPP

#include <optional>

namespace reluforge {

enum class ModelFamily { model1, model2 };
enum class TaskKind { regression, classification };

/// Sample-size schedule for the sparsely constrained ReLU function space:
/// target accuracy eps_N and the matching depth/width/parameter/coefficient
/// caps, plus the predicted risk including its log and dimension factors.
/// Proportionality constants are unit; callers rescale.
struct Schedule {
  ModelFamily model = ModelFamily::model1;
  TaskKind task = TaskKind::regression;
  double N = 0.0;
  double alpha = 0.0;
  double d = 0.0;
  double D = 0.0;
  double beta = 0.0;  // margin exponent, classification only

  double eps_N = 0.0;
  double L_N = 0.0;
  double W_N = 0.0;
  double P_N = 0.0;
  double B_N = 0.0;
  double predicted_risk = 0.0;
  double risk_exponent = 0.0;  // N^{-risk_exponent}, log factors aside
  double eps_exponent = 0.0;   // eps_N ~ N^{-eps_exponent}, log factors aside
};

/// log-covering-number bound for the network class F(L, W, P, B):
/// 2 P L log((B v 1)(W + 1)) + P log(L / delta), natural logarithm.
/// The source formula's parenthesization is ambiguous and leaves its
/// sparsity symbol undeclared; this evaluation reads it as above with the
/// sparsity set to P.
double covering_bound(double L, double W, double P, double B, double delta);

/// Schedules of Theorems 4.1-4.4. beta is required for classification.
Schedule schedule(ModelFamily model, TaskKind task, double N, double alpha,
                  double d, double D, std::optional<double> beta = std::nullopt);

}  // namespace reluforge

#endif
