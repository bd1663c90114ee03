#ifndef RELUFORGE_NET_HPP
#define RELUFORGE_NET_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace reluforge {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class Activation { relu, linear };

/// One affine stage y = act(W x + b). Weights are kept sparse; the
/// constructions here routinely reach widths of 1e5 where nonzeros are a
/// vanishing fraction of the dense entry count.
struct Layer {
  SparseMatrix weights;
  Vector bias;
  Activation activation = Activation::relu;

  Layer() = default;
  Layer(SparseMatrix w, Vector b, Activation act);
  Layer(const Matrix& w, Vector b, Activation act);  // drops exact zeros

  Eigen::Index rows() const { return weights.rows(); }
  Eigen::Index cols() const { return weights.cols(); }
};

/// Feedforward net: ReLU on every layer except the last, which is affine.
/// Immutable after construction; evaluate() is safe to call concurrently.
class ReluNetwork {
 public:
  explicit ReluNetwork(std::vector<Layer> layers);

  Eigen::Index input_dim() const { return input_dim_; }
  Eigen::Index output_dim() const { return output_dim_; }
  int depth() const { return static_cast<int>(layers_.size()); }
  const std::vector<Layer>& layers() const { return layers_; }

  Vector evaluate(const Vector& x) const;
  /// Column-wise batch evaluation; one column per input point.
  Matrix evaluate_batch(const Matrix& xs) const;

 private:
  std::vector<Layer> layers_;
  Eigen::Index input_dim_ = 0;
  Eigen::Index output_dim_ = 0;
};

struct DimensionMetrics {
  int depth = 0;
  Eigen::Index width = 0;
  std::int64_t nonzero_params = 0;
  double weight_bound = 0.0;
};

/// Structural checks: depth >= 2, consecutive dimension chaining, bias
/// lengths, ReLU on hidden layers and affine on the last. Returns one
/// message per violation; an empty list means the net is well formed.
std::vector<std::string> validate(const ReluNetwork& net);

/// Throws std::invalid_argument listing the violations, if any.
void require_valid(const ReluNetwork& net);

/// Depth L, width W (max layer dimension including input and output),
/// nonzero parameter count P (entries exactly equal to zero excluded),
/// and coefficient bound B (max absolute weight or bias entry).
DimensionMetrics metrics(const ReluNetwork& net);

/// Exact two-layer realization of x -> A x + b through the split
/// u = relu(u) - relu(-u).
ReluNetwork affine_net(const Matrix& A, const Vector& b);

/// Identity map on R^d, as an affine net.
ReluNetwork identity_net(Eigen::Index dim);

inline double relu(double t) { return t > 0.0 ? t : 0.0; }

SparseMatrix to_sparse(const Matrix& dense);
Matrix to_dense(const SparseMatrix& sparse);

}  // namespace reluforge

#endif
