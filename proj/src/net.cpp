#include "reluforge/net.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace reluforge {

SparseMatrix to_sparse(const Matrix& dense) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(dense.size()) / 4 + 8);
  for (Eigen::Index i = 0; i < dense.rows(); ++i)
    for (Eigen::Index j = 0; j < dense.cols(); ++j)
      if (dense(i, j) != 0.0) trips.emplace_back(i, j, dense(i, j));
  SparseMatrix out(dense.rows(), dense.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

Matrix to_dense(const SparseMatrix& sparse) { return Matrix(sparse); }

Layer::Layer(SparseMatrix w, Vector b, Activation act)
    : weights(std::move(w)), bias(std::move(b)), activation(act) {
  weights.makeCompressed();
}

Layer::Layer(const Matrix& w, Vector b, Activation act)
    : weights(to_sparse(w)), bias(std::move(b)), activation(act) {}

ReluNetwork::ReluNetwork(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw std::invalid_argument("ReluNetwork: no layers");
  input_dim_ = layers_.front().cols();
  output_dim_ = layers_.back().rows();
}

Vector ReluNetwork::evaluate(const Vector& x) const {
  if (x.size() != input_dim_)
    throw std::invalid_argument("evaluate: input has dimension " +
                                std::to_string(x.size()) + ", net expects " +
                                std::to_string(input_dim_));
  Vector y = x;
  for (size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    Vector z = layer.weights * y + layer.bias;
    if (layer.activation == Activation::relu) z = z.cwiseMax(0.0);
    y = std::move(z);
  }
  return y;
}

Matrix ReluNetwork::evaluate_batch(const Matrix& xs) const {
  if (xs.rows() != input_dim_)
    throw std::invalid_argument("evaluate_batch: input rows mismatch");
  // Column blocks keep intermediate buffers near 64 MB even for very wide
  // layers.
  Eigen::Index max_width = input_dim_;
  for (const Layer& layer : layers_) max_width = std::max(max_width, layer.rows());
  const Eigen::Index block = std::clamp<Eigen::Index>(
      (Eigen::Index(1) << 23) / std::max<Eigen::Index>(max_width, 1), 1, 4096);

  Matrix out(output_dim_, xs.cols());
  for (Eigen::Index start = 0; start < xs.cols(); start += block) {
    const Eigen::Index count = std::min(block, xs.cols() - start);
    Matrix y = xs.middleCols(start, count);
    for (const Layer& layer : layers_) {
      Matrix z = layer.weights * y;
      z.colwise() += layer.bias;
      if (layer.activation == Activation::relu) z = z.cwiseMax(0.0);
      y = std::move(z);
    }
    out.middleCols(start, count) = y;
  }
  return out;
}

std::vector<std::string> validate(const ReluNetwork& net) {
  std::vector<std::string> violations;
  const auto& layers = net.layers();
  if (layers.size() < 2) violations.push_back("depth < 2");
  for (size_t l = 0; l < layers.size(); ++l) {
    const Layer& layer = layers[l];
    if (layer.bias.size() != layer.rows()) {
      std::ostringstream os;
      os << "bias length " << layer.bias.size() << " != row count "
         << layer.rows() << " at layer " << l;
      violations.push_back(os.str());
    }
    if (l > 0 && layer.cols() != layers[l - 1].rows()) {
      std::ostringstream os;
      os << "dimension mismatch at " << l << ": expects " << layer.cols()
         << " inputs, previous layer outputs " << layers[l - 1].rows();
      violations.push_back(os.str());
    }
    const bool last = (l + 1 == layers.size());
    if (last && layer.activation != Activation::linear)
      violations.push_back("final layer must be linear");
    if (!last && layer.activation != Activation::relu) {
      std::ostringstream os;
      os << "hidden layer " << l << " must use relu";
      violations.push_back(os.str());
    }
  }
  return violations;
}

void require_valid(const ReluNetwork& net) {
  auto violations = validate(net);
  if (violations.empty()) return;
  std::string msg = "invalid network:";
  for (const auto& v : violations) msg += " [" + v + "]";
  throw std::invalid_argument(msg);
}

DimensionMetrics metrics(const ReluNetwork& net) {
  DimensionMetrics m;
  m.depth = net.depth();
  m.width = net.input_dim();
  for (const Layer& layer : net.layers()) {
    m.width = std::max(m.width, layer.rows());
    for (int k = 0; k < layer.weights.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(layer.weights, k); it; ++it) {
        if (it.value() != 0.0) {
          ++m.nonzero_params;
          m.weight_bound = std::max(m.weight_bound, std::abs(it.value()));
        }
      }
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
      if (layer.bias[i] != 0.0) {
        ++m.nonzero_params;
        m.weight_bound = std::max(m.weight_bound, std::abs(layer.bias[i]));
      }
    }
  }
  return m;
}

ReluNetwork affine_net(const Matrix& A, const Vector& b) {
  if (A.rows() != b.size())
    throw std::invalid_argument("affine_net: A rows != b length");
  const Eigen::Index n = A.rows();
  Matrix first(2 * n, A.cols());
  first.topRows(n) = A;
  first.bottomRows(n) = -A;
  Vector first_bias(2 * n);
  first_bias.head(n) = b;
  first_bias.tail(n) = -b;
  Matrix second(n, 2 * n);
  second.setZero();
  for (Eigen::Index i = 0; i < n; ++i) {
    second(i, i) = 1.0;
    second(i, n + i) = -1.0;
  }
  std::vector<Layer> layers;
  layers.emplace_back(first, first_bias, Activation::relu);
  layers.emplace_back(second, Vector::Zero(n), Activation::linear);
  return ReluNetwork(std::move(layers));
}

ReluNetwork identity_net(Eigen::Index dim) {
  return affine_net(Matrix::Identity(dim, dim), Vector::Zero(dim));
}

}  // namespace reluforge
