#ifndef RELUFORGE_POU_HPP
#define RELUFORGE_POU_HPP

#include <optional>
#include <vector>

#include "reluforge/geometry.hpp"
#include "reluforge/net.hpp"
#include "reluforge/verify.hpp"

namespace reluforge {

struct SpecViolationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bandwidths p = (1+q)/2 and h = 6/(1 - q/p).
std::pair<double, double> bandwidths(double q);

/// Partition-of-unity data over a maximal delta-separated net: centers,
/// bandwidths, per-center local reaches and tangent bases. Valid only when
/// delta < separation_constant * (1-q)^2 * reach.
struct PouSpec {
  Manifold manifold;
  SeparatedNet net;
  double q = 0.0;
  double p = 0.0;
  double h = 0.0;
  Vector reaches;                // tau(z_i)
  std::vector<Matrix> tangents;  // A(z_i), D x d
  double separation_constant = 1.0 / 288.0;

  Eigen::Index center_count() const { return net.centers.cols(); }
};

/// Builds the separated net and per-center data; validates the PouSpec
/// invariants. separation_constant defaults to the proof constant 1/288
/// and is exposed for configuration.
PouSpec make_pou_spec(const Manifold& m, double q, double delta,
                      double separation_constant = 1.0 / 288.0,
                      double probe_density = 100.0);

struct EtaReference {
  Vector eta_tilde;
  Vector eta;
};

/// Exact reference partition of unity:
/// eta~_i(x) = relu(1 - (|x-z_i| / (p tau_i))^2 - (|A_i^T (x-z_i)| / (h delta))^2),
/// eta = eta~ / ||eta~||_1. Throws SpecViolationError when the total mass
/// vanishes (delta too large for the tube).
EtaReference eta_reference(const PouSpec& spec, const Vector& x);

struct EtaBuildInfo {
  double eps_tilde = 0.0;    // squared-norm subnet accuracy
  double mass_lo = 0.0;      // measured min of ||eta~net||_1 on cert samples
  double mass_hi = 0.0;      // measured max
  double rescale = 1.0;      // applied before l1-normalization
  double annulus_bound = 0.0;
  double measured_l1_error = 0.0;  // on the certification samples
};

/// ReLU net approximating eta: per-center squared-norm gates followed by
/// l1-normalization on the certified annulus. Guarantees
/// ||net(x) - eta(x)||_1 <= eps on the certification samples and fails
/// loudly otherwise. budget_c overrides the accuracy-split constant.
ReluNetwork eta_net(const PouSpec& spec, double eps, EtaBuildInfo* info = nullptr,
                    std::optional<double> budget_c = std::nullopt);

struct Model1Spec {
  PouSpec pou;
  Vector g_values;  // g(z_i) in [0,1]
  double alpha = 1.0;
  double holder_const = 1.0;
};

/// <g(Z), eta-net(x)>: the target-function network of Model 1.
ReluNetwork model1_net(const Model1Spec& spec, double eps,
                       EtaBuildInfo* info = nullptr);

/// Z * eta-net(x): coordinatewise approximation of the projection onto the
/// manifold. delta defaults to min(eps (1-q)^2 / 72, 0.9 C (1-q)^2 tau).
ReluNetwork projection_net(const Manifold& m, double q, double eps,
                           std::optional<double> delta = std::nullopt,
                           double separation_constant = 1.0 / 288.0,
                           EtaBuildInfo* info = nullptr);

/// Sign thresholding of a probability net: output in [-1,1], equal to
/// sign(2 f(x) - 1) wherever |2 f(x) - 1| > 4 eps. Adds two layers.
ReluNetwork classifier_wrap(const ReluNetwork& prob_net, double eps);

/// Sampled Proposition-level checks of the partition of unity: sum-to-one,
/// localization radius 72 delta / (1-q)^2, and the (1-q)/8 mass lower bound.
PropertyResult pou_check(const PouSpec& spec, int n, unsigned seed);

}  // namespace reluforge

#endif
