#ifndef RELUFORGE_PRIMITIVES_HPP
#define RELUFORGE_PRIMITIVES_HPP

#include <functional>
#include <vector>

#include "reluforge/net.hpp"

namespace reluforge {

/// t -> |t| / R, exact. L = 2, W = 2.
ReluNetwork abs_net(double scale);

/// t -> t^2 on [0,1] within eps, via composed sawtooth interpolants.
/// Exact at the dyadic points k / 2^m for the stage count m chosen below.
/// L = m + 1, W = 4 (8 when unit_weights), B <= 4 (<= 1 when unit_weights).
ReluNetwork square_net(double eps, bool unit_weights = false);

/// Stage count used by square_net: m = ceil(log2(1/eps) / 2) + 1, capped
/// where the interpolation error falls below double precision.
int square_stage_count(double eps);

/// x -> ||x||_2^2 on the ball of radius R, within eps. W <= 4D (8D when
/// unit_weights); B <= 4 (R^2 v R^-1).
ReluNetwork sq_norm_net(int dim, double radius, double eps, bool unit_weights = false);

/// (x, y) in R^D x R -> x * y entrywise, within eps on ||x||_inf <= a,
/// |y| <= a. W <= 12D, B <= 4 v 2*ceil(a^2).
ReluNetwork mult_net(int dim, double bound, double eps);

/// z -> sum_i coeffs[i] * z^i on [0,1] within eps, by Horner composition of
/// multiplication stages. The per-stage budget is validated against a dense
/// direct-evaluation grid at build time.
ReluNetwork polynomial_net(const std::vector<double>& coeffs, double eps);

/// t -> 1/t on [1/a, a] within eps, via the truncated geometric series
/// (1/t = c * sum_{i>=0} (1 - c t)^i with c = 1/a). W <= 16, B <= 8.
ReluNetwork reciprocal_net(double bound, double eps);

/// Series truncation order used by reciprocal_net.
int reciprocal_series_order(double bound, double eps);

/// x -> ||x||_1, exact. L = 2, W = 2D.
ReluNetwork l1_norm_net(int dim);

/// x -> x / ||x||_1 within eps on the annulus 1/a <= ||x||_1 <= a.
/// nonneg_inputs selects a cheaper identity carry that is exact only for
/// entrywise nonnegative inputs.
ReluNetwork l1_normalize_net(int dim, double bound, double eps,
                             bool nonneg_inputs = false);

/// x -> min_i x_i, exact, by pairwise tournament. L <= 2*ceil(log2 K),
/// W <= 3*ceil(K/2), P <= 11*K*ceil(log2 K), B <= 1.
ReluNetwork min_net(int k);

/// t -> sign(t) outside [-eps, eps], linear ramp t/eps inside.
/// L = 2, W = 2, P = 7, B = 1/eps.
ReluNetwork sign_net(double eps);

/// t -> 1 ^ t = 1 - relu(1 - t), exact.
ReluNetwork clamp_net();

/// g: [0,1] -> [0,1], assumed (alpha, holder_const)-Holder, rendered within
/// eps by piecewise-linear interpolation at spacing (eps / 2C)^(1/alpha).
/// unit_weights factors each large output coefficient across doubling
/// layers so that B <= 1.
ReluNetwork holder_net(const std::function<double(double)>& g, double alpha,
                       double holder_const, double eps, bool unit_weights = false);

}  // namespace reluforge

#endif
