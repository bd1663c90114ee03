#ifndef RELUFORGE_CALCULUS_HPP
#define RELUFORGE_CALCULUS_HPP

#include <vector>

#include "reluforge/net.hpp"

namespace reluforge {

/// outer(inner(x)), exactly. The interface layer is always split through
/// u = relu(u) - relu(-u), so L = L1 + L2, W <= max{W1, W2, 2*dim(interface)},
/// P <= 2(P1 + P2), B <= max{B1, B2}.
ReluNetwork concatenate(const ReluNetwork& outer, const ReluNetwork& inner);

/// Same map, same outputs, depth grown to target_depth with identity layers
/// (weights +-1 only). Width grows by at most 2*output_dim.
ReluNetwork pad_depth(const ReluNetwork& net, int target_depth);

/// x -> (a_1 net_1(x), ..., a_K net_K(x)), exactly. Operands are padded to
/// the maximum depth first.
ReluNetwork parallelize(const std::vector<ReluNetwork>& nets,
                        const std::vector<double>& scales);

/// x -> sum_i a_i net_i(x), exactly; operands must share the output dim.
ReluNetwork linear_combine(const std::vector<ReluNetwork>& nets,
                           const std::vector<double>& scales);

/// Exact affine rewrites that fuse into an existing layer without adding
/// depth: (y -> A y + b) after the net, and (x -> C x + d) before it.
/// These are not calculus combinators; they are the zero-cost wiring used
/// when a construction composes with a plain affine map.
ReluNetwork fuse_output_affine(const Matrix& A, const Vector& b, const ReluNetwork& net);
ReluNetwork fuse_input_affine(const ReluNetwork& net, const Matrix& C, const Vector& d);

}  // namespace reluforge

#endif
