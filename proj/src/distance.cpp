#include "reluforge/distance.hpp"

#include <cmath>
#include <stdexcept>

#include "reluforge/calculus.hpp"
#include "reluforge/geometry.hpp"
#include "reluforge/primitives.hpp"
#include "reluforge/verify.hpp"

namespace reluforge {

double normdist_reference(const Matrix& cloud, const Vector& x) {
  if (cloud.cols() == 0) throw std::invalid_argument("normdist_reference: empty cloud");
  if (cloud.rows() != x.size())
    throw std::invalid_argument("normdist_reference: dimension mismatch");
  const double min_sq = (cloud.colwise() - x).colwise().squaredNorm().minCoeff();
  return min_sq / static_cast<double>(cloud.rows());
}

std::vector<Eigen::Index> max_separated_subset(const Matrix& cloud, double separation) {
  std::vector<Eigen::Index> kept;
  const double sep_sq = separation * separation;
  for (Eigen::Index j = 0; j < cloud.cols(); ++j) {
    bool ok = true;
    for (const Eigen::Index k : kept) {
      if ((cloud.col(j) - cloud.col(k)).squaredNorm() <= sep_sq) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(j);
  }
  return kept;
}

PackingCertificate packing_certificate(const Matrix& cloud, int declared_dim,
                                       double delta0) {
  if (delta0 <= 0.0) throw std::invalid_argument("packing_certificate: delta0 must be positive");
  const double root_d = std::sqrt(static_cast<double>(cloud.rows()));
  PackingCertificate cert;
  for (int j = 0; j < 5; ++j) {
    const double delta = delta0 * 0.9 / std::pow(2.0, j);
    const auto subset = max_separated_subset(cloud, root_d * delta);
    cert.sweep.emplace_back(1.0 / delta, static_cast<double>(subset.size()));
  }
  // Constant counts (the d = 0 regime) fit slope 0 exactly.
  bool all_equal = true;
  for (const auto& [x, y] : cert.sweep) all_equal &= (y == cert.sweep.front().second);
  if (all_equal) {
    cert.fitted_dim = 0.0;
  } else {
    cert.fitted_dim = rate_fit(cert.sweep).slope;
  }
  cert.pass = cert.fitted_dim <= declared_dim + 0.5;
  return cert;
}

ReluNetwork distance_net(const Matrix& cloud, int intrinsic_dim, double delta0,
                         double eps, DistanceBuildInfo* info) {
  if (cloud.cols() == 0) throw std::invalid_argument("distance_net: empty cloud");
  if (!(eps > 0.0 && eps < 3.0 * delta0))
    throw std::invalid_argument("distance_net: eps must lie in (0, 3 delta0)");
  if (cloud.minCoeff() < 0.0 || cloud.maxCoeff() > 1.0)
    throw std::invalid_argument("distance_net: cloud must lie in [0,1]^D");
  const auto cert = packing_certificate(cloud, intrinsic_dim, delta0);
  if (!cert.pass)
    throw std::invalid_argument(
        "distance_net: packing certificate failed (fitted dim " +
        std::to_string(cert.fitted_dim) + ")");

  const int D = static_cast<int>(cloud.rows());
  const double root_d = std::sqrt(static_cast<double>(D));
  const auto subset = max_separated_subset(cloud, root_d * eps / 3.0);
  const auto K = static_cast<Eigen::Index>(subset.size());

  const ReluNetwork psi = sq_norm_net(D, 1.0, eps / 3.0, /*unit_weights=*/true);
  const std::int64_t psi_params = metrics(psi).nonzero_params;

  std::vector<ReluNetwork> branches;
  branches.reserve(subset.size());
  for (const Eigen::Index idx : subset) {
    const Vector z = cloud.col(idx);
    ReluNetwork shift =
        affine_net(Matrix::Identity(D, D) / root_d, -z / root_d);
    branches.push_back(concatenate(psi, shift));
  }
  ReluNetwork result =
      (K == 1) ? branches.front()
               : concatenate(min_net(static_cast<int>(K)),
                             parallelize(branches, std::vector<double>(subset.size(), 1.0)));

  const DimensionMetrics dm = metrics(result);
  if (dm.weight_bound > 1.0 + 1e-12)
    throw std::logic_error("distance_net: weight bound exceeded 1");
  if (info) {
    info->subset_size = K;
    info->params_as_counted = dm.nonzero_params;
    info->params_distinct = dm.nonzero_params - (K - 1) * psi_params;
  }
  return result;
}

ReluNetwork model2_net(const DistanceModelSpec& spec, double eps,
                       std::vector<DistanceBuildInfo>* infos) {
  if (spec.clouds.empty() || spec.clouds.size() != spec.g_list.size())
    throw std::invalid_argument("model2_net: clouds and g list must match and be nonempty");
  if (!(spec.alpha > 0.0 && spec.alpha <= 1.0))
    throw std::invalid_argument("model2_net: alpha must lie in (0,1]");
  const double eps_alpha = std::pow(eps, spec.alpha);
  if (!(eps_alpha < 6.0 * spec.holder_const * spec.delta0))
    throw std::invalid_argument("model2_net: eps^alpha must be below 6 L delta0");
  const auto M = static_cast<double>(spec.clouds.size());

  // Range-check every g on a probe grid.
  for (const auto& g : spec.g_list) {
    for (int i = 0; i <= 200; ++i) {
      const double v = g(i / 200.0);
      if (v < -1e-12 || v > 1.0 + 1e-12)
        throw std::invalid_argument("model2_net: g leaves [0,1] on the probe grid");
    }
  }

  if (infos) infos->clear();
  std::vector<ReluNetwork> summands;
  summands.reserve(spec.clouds.size());
  for (size_t l = 0; l < spec.clouds.size(); ++l) {
    DistanceBuildInfo binfo;
    ReluNetwork dist =
        distance_net(spec.clouds[l], spec.intrinsic_dim, spec.delta0,
                     eps_alpha / (2.0 * spec.holder_const * M), &binfo);
    if (infos) infos->push_back(binfo);
    ReluNetwork clamped = concatenate(clamp_net(), dist);
    ReluNetwork g_net = holder_net(spec.g_list[l], spec.alpha, spec.holder_const,
                                   eps_alpha / (2.0 * M), /*unit_weights=*/true);
    summands.push_back(concatenate(g_net, clamped));
  }
  ReluNetwork result =
      linear_combine(summands, std::vector<double>(summands.size(), 1.0));
  if (metrics(result).weight_bound > 1.0 + 1e-12)
    throw std::logic_error("model2_net: weight bound exceeded 1");
  return result;
}

}  // namespace reluforge
