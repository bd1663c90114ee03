#include "reluforge/pou.hpp"

#include <cmath>
#include <sstream>

#include "reluforge/calculus.hpp"
#include "reluforge/primitives.hpp"

namespace reluforge {

namespace {

// relu(1 + t) followed by an identity readout; exact since the gated value
// is nonnegative.
ReluNetwork shifted_relu_gate() {
  Matrix first(1, 1), second(1, 1);
  first << 1.0;
  second << 1.0;
  Vector b1(1);
  b1 << 1.0;
  std::vector<Layer> layers;
  layers.emplace_back(first, b1, Activation::relu);
  layers.emplace_back(second, Vector::Zero(1), Activation::linear);
  return ReluNetwork(std::move(layers));
}

}  // namespace

std::pair<double, double> bandwidths(double q) {
  if (q < 0.0 || q >= 1.0) throw std::invalid_argument("bandwidths: q must lie in [0,1)");
  const double p = 0.5 * (1.0 + q);
  const double h = 6.0 / (1.0 - q / p);
  return {p, h};
}

PouSpec make_pou_spec(const Manifold& m, double q, double delta,
                      double separation_constant, double probe_density) {
  if (q < 0.0 || q >= 1.0) throw std::invalid_argument("make_pou_spec: q must lie in [0,1)");
  const double tau = m.global_reach();
  if (!(delta > 0.0 && delta < separation_constant * (1.0 - q) * (1.0 - q) * tau))
    throw SpecViolationError(
        "make_pou_spec: delta must be below C (1-q)^2 reach with C = " +
        std::to_string(separation_constant));
  PouSpec spec;
  spec.manifold = m;
  spec.net = separated_net(m, delta, probe_density);
  spec.q = q;
  std::tie(spec.p, spec.h) = bandwidths(q);
  spec.separation_constant = separation_constant;
  const Eigen::Index K = spec.net.centers.cols();
  spec.reaches.resize(K);
  spec.tangents.reserve(static_cast<size_t>(K));
  for (Eigen::Index i = 0; i < K; ++i) {
    const Vector z = spec.net.centers.col(i);
    spec.reaches[i] = m.local_reach(z);
    spec.tangents.push_back(m.tangent_basis(z));
  }
  return spec;
}

EtaReference eta_reference(const PouSpec& spec, const Vector& x) {
  const Eigen::Index K = spec.center_count();
  EtaReference out;
  out.eta_tilde.resize(K);
  const double hd = spec.h * spec.net.delta;
  for (Eigen::Index i = 0; i < K; ++i) {
    const Vector diff = x - spec.net.centers.col(i);
    const double ball = diff.norm() / (spec.p * spec.reaches[i]);
    const double tang = (spec.tangents[static_cast<size_t>(i)].transpose() * diff).norm() / hd;
    out.eta_tilde[i] = relu(1.0 - ball * ball - tang * tang);
  }
  const double mass = out.eta_tilde.sum();
  if (mass <= 0.0)
    throw SpecViolationError("eta_reference: vanishing mass (delta too large for the tube)");
  out.eta = out.eta_tilde / mass;
  return out;
}

ReluNetwork eta_net(const PouSpec& spec, double eps, EtaBuildInfo* info,
                    std::optional<double> budget_c) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eta_net: eps must lie in (0,1)");
  const Manifold& m = spec.manifold;
  if (!m.tube_fits_unit_cube(spec.q))
    throw SpecViolationError("eta_net: manifold tube does not fit inside [0,1]^D");

  const Eigen::Index K = spec.center_count();
  const int D = m.ambient_dim();
  const int d = m.intrinsic_dim();
  const double delta = spec.net.delta;
  const double hd = spec.h * delta;
  const double tau_min = spec.reaches.minCoeff();
  const double q = spec.q;

  // Accuracy split: squared-norm subnets at eps~ = c delta^2 eps / K, with
  // the conservative default c tightened until the per-center error chain
  // clears (1-q) eps / (32 K).
  const double c_default = std::min(1.0 / (spec.h * spec.h),
                                    1.0 / (spec.p * tau_min * spec.p * tau_min)) *
                           (1.0 - q) / 32.0;
  double eps_tilde = budget_c.value_or(c_default) * delta * delta * eps / double(K);
  const double per_center_target = (1.0 - q) / 8.0 * eps / (4.0 * double(K));
  const double chain = 1.0 / (spec.p * tau_min * spec.p * tau_min) + 1.0 / (hd * hd);
  if (eps_tilde * chain > per_center_target) eps_tilde = per_center_target / chain;

  const double radius = std::sqrt(double(D));
  const ReluNetwork theta_amb = sq_norm_net(D, radius, eps_tilde);
  const ReluNetwork theta_tan = sq_norm_net(d, radius, eps_tilde);
  const ReluNetwork gate = shifted_relu_gate();

  std::vector<ReluNetwork> gates;
  gates.reserve(static_cast<size_t>(K));
  for (Eigen::Index i = 0; i < K; ++i) {
    const Vector z = spec.net.centers.col(i);
    const Matrix& A = spec.tangents[static_cast<size_t>(i)];
    ReluNetwork shifted = concatenate(theta_amb, affine_net(Matrix::Identity(D, D), -z));
    ReluNetwork tangential =
        concatenate(theta_tan, affine_net(A.transpose(), -(A.transpose() * z)));
    const double ball_scale = -1.0 / (spec.p * spec.reaches[i] * spec.p * spec.reaches[i]);
    const double tang_scale = -1.0 / (hd * hd);
    ReluNetwork penalty = linear_combine({shifted, tangential}, {ball_scale, tang_scale});
    gates.push_back(concatenate(gate, penalty));
  }
  ReluNetwork tilde = parallelize(gates, std::vector<double>(static_cast<size_t>(K), 1.0));

  // Certify the mass annulus of the built gates on tube samples plus a
  // center subsample (every center is a construction seam; a stride keeps
  // certification affordable at large K).
  SamplerSpec cert_sampler = SamplerSpec::tube_domain(m, q);
  const Eigen::Index stride = std::max<Eigen::Index>(1, K / 256);
  Matrix center_probe(m.ambient_dim(), (K + stride - 1) / stride);
  for (Eigen::Index i = 0, c = 0; i < K; i += stride, ++c)
    center_probe.col(c) = spec.net.centers.col(i);
  cert_sampler.special_points = std::move(center_probe);
  const Matrix cert = cert_sampler.draw(256, 20250810u);
  const Matrix tilde_out = tilde.evaluate_batch(cert);
  const Vector masses = tilde_out.colwise().sum().transpose();
  const double lo = masses.minCoeff();
  const double hi = masses.maxCoeff();
  if (lo < 0.5 * (1.0 - q) / 8.0)
    throw SpecViolationError("eta_net: certified mass fell below the (1-q)/8 regime");

  // The normalization is scale invariant; recentering the annulus around 1
  // keeps the division net shallow.
  const double rescale = 1.0 / std::sqrt(lo * hi);
  const double annulus = std::max(1.5, 2.0 * std::sqrt(hi / lo));
  ReluNetwork scaled = [&]() {
    std::vector<Layer> layers = tilde.layers();
    layers.back().weights = layers.back().weights * rescale;
    layers.back().bias *= rescale;
    return ReluNetwork(std::move(layers));
  }();

  // l1 budget: K entrywise product errors at eps/(2K) plus the reciprocal
  // term bounded by the annulus radius.
  ReluNetwork normalizer = [&]() {
    const double e_mult = eps / (2.0 * double(K));
    const double e_recip = eps / (2.0 * annulus);
    ReluNetwork norm_recip =
        concatenate(reciprocal_net(annulus, e_recip), l1_norm_net(static_cast<int>(K)));
    ReluNetwork carry = [&]() {
      SparseMatrix eye(K, K);
      eye.setIdentity();
      std::vector<Layer> layers;
      for (int l = 0; l < norm_recip.depth() - 1; ++l)
        layers.emplace_back(eye, Vector::Zero(K), Activation::relu);
      layers.emplace_back(eye, Vector::Zero(K), Activation::linear);
      return ReluNetwork(std::move(layers));
    }();
    ReluNetwork joined = parallelize({carry, norm_recip}, {1.0, 1.0});
    ReluNetwork prod = mult_net(static_cast<int>(K), 2.0 * annulus, e_mult);
    return concatenate(prod, joined);
  }();

  ReluNetwork result = concatenate(normalizer, scaled);

  // Loud final check against the exact reference.
  double worst = 0.0;
  const Matrix net_out = result.evaluate_batch(cert);
  for (Eigen::Index j = 0; j < cert.cols(); ++j) {
    const EtaReference ref = eta_reference(spec, cert.col(j));
    worst = std::max(worst, (net_out.col(j) - ref.eta).cwiseAbs().sum());
    const double mass_scaled = masses[j] * rescale;
    if (mass_scaled < 1.0 / annulus || mass_scaled > annulus)
      throw SpecViolationError("eta_net: certification sample violates the annulus");
  }
  if (worst > eps)
    throw SpecViolationError("eta_net: certified l1 error " + std::to_string(worst) +
                             " exceeds the budget " + std::to_string(eps));

  if (info) {
    info->eps_tilde = eps_tilde;
    info->mass_lo = lo;
    info->mass_hi = hi;
    info->rescale = rescale;
    info->annulus_bound = annulus;
    info->measured_l1_error = worst;
  }
  return result;
}

ReluNetwork model1_net(const Model1Spec& spec, double eps, EtaBuildInfo* info) {
  const Eigen::Index K = spec.pou.center_count();
  if (spec.g_values.size() != K)
    throw std::invalid_argument("model1_net: g_values size != center count");
  if (spec.g_values.minCoeff() < 0.0 || spec.g_values.maxCoeff() > 1.0)
    throw SpecViolationError("model1_net: g values must lie in [0,1]");
  ReluNetwork eta = eta_net(spec.pou, eps, info);
  ReluNetwork readout = affine_net(spec.g_values.transpose(), Vector::Zero(1));
  return concatenate(readout, eta);
}

ReluNetwork projection_net(const Manifold& m, double q, double eps,
                           std::optional<double> delta_opt,
                           double separation_constant, EtaBuildInfo* info) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("projection_net: eps must lie in (0,1)");
  const double tau = m.global_reach();
  const double omq = (1.0 - q) * (1.0 - q);
  const double delta = delta_opt.value_or(
      std::min(eps * omq / 72.0, 0.9 * separation_constant * omq * tau));
  PouSpec spec = make_pou_spec(m, q, delta, separation_constant);
  ReluNetwork eta = eta_net(spec, eps, info);
  ReluNetwork readout = affine_net(spec.net.centers, Vector::Zero(m.ambient_dim()));
  return concatenate(readout, eta);
}

ReluNetwork classifier_wrap(const ReluNetwork& prob_net, double eps) {
  if (prob_net.output_dim() != 1)
    throw std::invalid_argument("classifier_wrap: probability net must be scalar");
  if (eps <= 0.0) throw std::invalid_argument("classifier_wrap: eps must be positive");
  // Sign net at band 2*eps with the affine map t -> 2t - 1 folded into its
  // first layer, so only two layers are added.
  const double band = 2.0 * eps;
  Matrix first(2, 1);
  first << 2.0 / band, 2.0 / band;
  Vector b1(2);
  b1 << 1.0 - 1.0 / band, -1.0 - 1.0 / band;
  Matrix second(1, 2);
  second << 1.0, -1.0;
  Vector b2(1);
  b2 << -1.0;
  std::vector<Layer> layers;
  layers.emplace_back(first, b1, Activation::relu);
  layers.emplace_back(second, b2, Activation::linear);
  ReluNetwork threshold{std::move(layers)};
  return concatenate(threshold, prob_net);
}

PropertyResult pou_check(const PouSpec& spec, int n, unsigned seed) {
  PropertyResult res;
  res.name = "pou_properties";
  const Manifold& m = spec.manifold;
  const double q = spec.q;
  const double radius = 72.0 * spec.net.delta / ((1.0 - q) * (1.0 - q));
  const double mass_floor = (1.0 - q) / 8.0;

  const TubeSample samples = m.tube_sample(q, n, seed);
  double worst_sum = 0.0;
  double worst_mass = std::numeric_limits<double>::infinity();
  double worst_loc = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vector x = samples.points.col(i);
    const EtaReference ref = eta_reference(spec, x);
    ++res.checked;
    worst_sum = std::max(worst_sum, std::abs(ref.eta.sum() - 1.0));
    if (std::abs(ref.eta.sum() - 1.0) > 1e-12) ++res.violations;
    worst_mass = std::min(worst_mass, ref.eta_tilde.sum());
    if (ref.eta_tilde.sum() < mass_floor) ++res.violations;
    const Vector foot = m.project(x);
    for (Eigen::Index k = 0; k < ref.eta_tilde.size(); ++k) {
      if (ref.eta_tilde[k] <= 0.0) continue;
      const double geo = m.geodesic_dist(foot, spec.net.centers.col(k));
      worst_loc = std::max(worst_loc, geo);
      if (geo > radius + 1e-9) ++res.violations;
    }
  }
  res.pass = res.violations == 0;
  res.worst_margin = std::min(
      {1e-12 - worst_sum, worst_mass - mass_floor, radius + 1e-9 - worst_loc});
  std::ostringstream os;
  os << "sum_dev=" << worst_sum << " mass_min=" << worst_mass
     << " loc_max=" << worst_loc << " loc_bound=" << radius;
  res.detail = os.str();
  return res;
}

}  // namespace reluforge
