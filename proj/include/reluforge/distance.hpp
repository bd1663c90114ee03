#ifndef RELUFORGE_DISTANCE_HPP
#define RELUFORGE_DISTANCE_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "reluforge/net.hpp"

namespace reluforge {

/// Normalized squared distance D^{-1} min_{z in C} ||x - z||_2^2 by
/// exact enumeration over the cloud columns.
double normdist_reference(const Matrix& cloud, const Vector& x);

/// Greedy maximal separation-separated subset of the cloud columns
/// (Euclidean, strict separation), in scan order.
std::vector<Eigen::Index> max_separated_subset(const Matrix& cloud, double separation);

struct PackingCertificate {
  double fitted_dim = 0.0;
  bool pass = false;
  std::vector<std::pair<double, double>> sweep;  // (1/delta, count)
};

/// Certifies the packing assumption P(sqrt(D) delta, C) <~ delta^{-d} over
/// a delta sweep below delta0; fails when the fitted exponent exceeds the
/// declared dimension by more than 0.5.
PackingCertificate packing_certificate(const Matrix& cloud, int declared_dim,
                                       double delta0);

struct DistanceBuildInfo {
  Eigen::Index subset_size = 0;
  std::int64_t params_as_counted = 0;  // shared norm subnet counted per branch
  std::int64_t params_distinct = 0;    // shared norm subnet counted once
};

/// ReLU net for x -> normalized squared distance to the cloud, within eps
/// on [0,1]^D: per-center shift/normalize stages, one shared squared-norm
/// subnet at eps/3, and a minimum over the separated subset. B <= 1.
ReluNetwork distance_net(const Matrix& cloud, int intrinsic_dim, double delta0,
                         double eps, DistanceBuildInfo* info = nullptr);

struct DistanceModelSpec {
  std::vector<Matrix> clouds;                         // C_l as D x n_l columns
  std::vector<std::function<double(double)>> g_list;  // [0,1] -> [0,1]
  double alpha = 1.0;
  double holder_const = 1.0;
  int intrinsic_dim = 0;
  double delta0 = 0.0;
};

/// Composite Model-2 target network: per summand a distance net at
/// eps^alpha / (2 L M), a clamp, and a Holder net at eps^alpha / (2M),
/// summed. Guarantees sup error <= eps^alpha on [0,1]^D and B <= 1.
ReluNetwork model2_net(const DistanceModelSpec& spec, double eps,
                       std::vector<DistanceBuildInfo>* infos = nullptr);

}  // namespace reluforge

#endif
