#include "reluforge/calculus.hpp"

#include <cmath>
#include <stdexcept>

namespace reluforge {

namespace {

// [A; -A] with bias [b; -b]: the relu layer whose pair difference
// reconstructs the affine image A x + b.
Layer split_layer(const Layer& linear) {
  SparseMatrix stacked(2 * linear.rows(), linear.cols());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(2 * static_cast<size_t>(linear.weights.nonZeros()));
  for (int k = 0; k < linear.weights.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(linear.weights, k); it; ++it) {
      trips.emplace_back(it.row(), it.col(), it.value());
      trips.emplace_back(it.row() + linear.rows(), it.col(), -it.value());
    }
  }
  stacked.setFromTriplets(trips.begin(), trips.end());
  Vector bias(2 * linear.rows());
  bias.head(linear.rows()) = linear.bias;
  bias.tail(linear.rows()) = -linear.bias;
  return Layer(std::move(stacked), std::move(bias), Activation::relu);
}

// [I, -I] readout undoing split_layer, as a linear final layer.
Layer unsplit_layer(Eigen::Index n) {
  SparseMatrix w(n, 2 * n);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(2 * static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    trips.emplace_back(i, i, 1.0);
    trips.emplace_back(i, n + i, -1.0);
  }
  w.setFromTriplets(trips.begin(), trips.end());
  return Layer(std::move(w), Vector::Zero(n), Activation::linear);
}

// [[I, -I], [-I, I]]: propagates a split pair through one relu layer.
Layer pair_identity_layer(Eigen::Index n) {
  SparseMatrix w(2 * n, 2 * n);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(4 * static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    trips.emplace_back(i, i, 1.0);
    trips.emplace_back(i, n + i, -1.0);
    trips.emplace_back(n + i, i, -1.0);
    trips.emplace_back(n + i, n + i, 1.0);
  }
  w.setFromTriplets(trips.begin(), trips.end());
  return Layer(std::move(w), Vector::Zero(2 * n), Activation::relu);
}

SparseMatrix hstack(const SparseMatrix& a, const SparseMatrix& b) {
  SparseMatrix out(a.rows(), a.cols() + b.cols());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(a.nonZeros() + b.nonZeros()));
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it)
      trips.emplace_back(it.row(), it.col(), it.value());
  for (int k = 0; k < b.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(b, k); it; ++it)
      trips.emplace_back(it.row(), it.col() + a.cols(), it.value());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

// Folds the scale into the final linear layer when that keeps the
// coefficient bound max{1, B ∨ |scale|}; otherwise realizes the scale as a
// split output stage so last-layer entries are exactly +-scale.
ReluNetwork apply_output_scale(const ReluNetwork& net, double scale) {
  const Layer& last = net.layers().back();
  double last_max = 0.0;
  for (int k = 0; k < last.weights.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(last.weights, k); it; ++it)
      last_max = std::max(last_max, std::abs(it.value()));
  for (Eigen::Index i = 0; i < last.bias.size(); ++i)
    last_max = std::max(last_max, std::abs(last.bias[i]));

  if (scale == 1.0) return net;
  if (std::abs(scale) <= 1.0 || last_max <= 1.0) {
    std::vector<Layer> layers = net.layers();
    layers.back().weights = layers.back().weights * scale;
    layers.back().bias *= scale;
    return ReluNetwork(std::move(layers));
  }
  std::vector<Layer> layers(net.layers().begin(), net.layers().end() - 1);
  layers.push_back(split_layer(last));
  Layer out = unsplit_layer(last.rows());
  out.weights = out.weights * scale;
  layers.push_back(std::move(out));
  return ReluNetwork(std::move(layers));
}

}  // namespace

ReluNetwork concatenate(const ReluNetwork& outer, const ReluNetwork& inner) {
  if (inner.output_dim() != outer.input_dim())
    throw std::invalid_argument("concatenate: inner output dim " +
                                std::to_string(inner.output_dim()) +
                                " != outer input dim " +
                                std::to_string(outer.input_dim()));
  std::vector<Layer> layers(inner.layers().begin(), inner.layers().end() - 1);
  layers.push_back(split_layer(inner.layers().back()));
  // Outer's first layer reads the pair difference directly.
  const Layer& f = outer.layers().front();
  Layer first(hstack(f.weights, SparseMatrix(-f.weights)), f.bias, f.activation);
  layers.push_back(std::move(first));
  layers.insert(layers.end(), outer.layers().begin() + 1, outer.layers().end());
  return ReluNetwork(std::move(layers));
}

ReluNetwork pad_depth(const ReluNetwork& net, int target_depth) {
  if (target_depth < net.depth())
    throw std::invalid_argument("pad_depth: target depth " +
                                std::to_string(target_depth) +
                                " below current depth " +
                                std::to_string(net.depth()));
  if (target_depth == net.depth()) return net;
  const int extra = target_depth - net.depth();
  const Eigen::Index n = net.output_dim();
  std::vector<Layer> layers(net.layers().begin(), net.layers().end() - 1);
  layers.push_back(split_layer(net.layers().back()));
  for (int k = 0; k < extra - 1; ++k) layers.push_back(pair_identity_layer(n));
  layers.push_back(unsplit_layer(n));
  return ReluNetwork(std::move(layers));
}

ReluNetwork parallelize(const std::vector<ReluNetwork>& nets,
                        const std::vector<double>& scales) {
  if (nets.empty()) throw std::invalid_argument("parallelize: empty net list");
  if (scales.size() != nets.size())
    throw std::invalid_argument("parallelize: scale count != net count");
  const Eigen::Index in_dim = nets.front().input_dim();
  for (const auto& net : nets)
    if (net.input_dim() != in_dim)
      throw std::invalid_argument("parallelize: mismatched input dims");

  std::vector<ReluNetwork> scaled;
  scaled.reserve(nets.size());
  for (size_t i = 0; i < nets.size(); ++i)
    scaled.push_back(apply_output_scale(nets[i], scales[i]));

  int max_depth = 0;
  for (const auto& net : scaled) max_depth = std::max(max_depth, net.depth());

  std::vector<ReluNetwork> padded;
  padded.reserve(scaled.size());
  for (auto& net : scaled) padded.push_back(pad_depth(net, max_depth));

  std::vector<Layer> layers;
  layers.reserve(static_cast<size_t>(max_depth));
  for (int l = 0; l < max_depth; ++l) {
    Eigen::Index rows = 0, cols = 0;
    std::int64_t nnz = 0;
    for (const auto& net : padded) {
      const Layer& piece = net.layers()[static_cast<size_t>(l)];
      rows += piece.rows();
      cols += piece.cols();
      nnz += piece.weights.nonZeros();
    }
    if (l == 0) cols = in_dim;  // shared input

    SparseMatrix w(rows, cols);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(nnz));
    Vector bias(rows);
    Eigen::Index row_off = 0, col_off = 0;
    for (const auto& net : padded) {
      const Layer& piece = net.layers()[static_cast<size_t>(l)];
      const Eigen::Index piece_col_off = (l == 0) ? 0 : col_off;
      for (int k = 0; k < piece.weights.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(piece.weights, k); it; ++it)
          trips.emplace_back(row_off + it.row(), piece_col_off + it.col(), it.value());
      bias.segment(row_off, piece.rows()) = piece.bias;
      row_off += piece.rows();
      col_off += piece.cols();
    }
    w.setFromTriplets(trips.begin(), trips.end());
    layers.emplace_back(std::move(w), std::move(bias),
                        l + 1 == max_depth ? Activation::linear : Activation::relu);
  }
  return ReluNetwork(std::move(layers));
}

ReluNetwork linear_combine(const std::vector<ReluNetwork>& nets,
                           const std::vector<double>& scales) {
  if (nets.empty()) throw std::invalid_argument("linear_combine: empty net list");
  const Eigen::Index out_dim = nets.front().output_dim();
  for (const auto& net : nets)
    if (net.output_dim() != out_dim)
      throw std::invalid_argument("linear_combine: mismatched output dims");
  ReluNetwork stacked = parallelize(nets, scales);
  Matrix sum(out_dim, out_dim * static_cast<Eigen::Index>(nets.size()));
  sum.setZero();
  for (size_t i = 0; i < nets.size(); ++i)
    sum.block(0, out_dim * static_cast<Eigen::Index>(i), out_dim, out_dim) =
        Matrix::Identity(out_dim, out_dim);
  return fuse_output_affine(sum, Vector::Zero(out_dim), stacked);
}

ReluNetwork fuse_output_affine(const Matrix& A, const Vector& b, const ReluNetwork& net) {
  if (A.cols() != net.output_dim())
    throw std::invalid_argument("fuse_output_affine: dimension mismatch");
  std::vector<Layer> layers = net.layers();
  const Layer& last = layers.back();
  SparseMatrix sA = to_sparse(A);
  SparseMatrix w = (sA * last.weights).pruned();
  Vector bias = sA * last.bias + b;
  layers.back() = Layer(std::move(w), std::move(bias), Activation::linear);
  return ReluNetwork(std::move(layers));
}

ReluNetwork fuse_input_affine(const ReluNetwork& net, const Matrix& C, const Vector& d) {
  if (C.rows() != net.input_dim())
    throw std::invalid_argument("fuse_input_affine: dimension mismatch");
  std::vector<Layer> layers = net.layers();
  const Layer& first = layers.front();
  SparseMatrix sC = to_sparse(C);
  SparseMatrix w = (first.weights * sC).pruned();
  Vector bias = first.weights * d + first.bias;
  layers.front() = Layer(std::move(w), std::move(bias), first.activation);
  return ReluNetwork(std::move(layers));
}

}  // namespace reluforge
