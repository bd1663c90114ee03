#include "reluforge/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "reluforge/calculus.hpp"

namespace reluforge {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Selector matrix picking the listed input coordinates.
Matrix selector(const std::vector<int>& picks, Eigen::Index in_dim) {
  Matrix C = Matrix::Zero(static_cast<Eigen::Index>(picks.size()), in_dim);
  for (size_t i = 0; i < picks.size(); ++i) C(static_cast<Eigen::Index>(i), picks[i]) = 1.0;
  return C;
}

Vector zeros(Eigen::Index n) { return Vector::Zero(n); }

// Chain of relu identity layers, valid only for entrywise nonnegative inputs.
ReluNetwork nonneg_identity_chain(Eigen::Index dim, int depth) {
  SparseMatrix eye(dim, dim);
  eye.setIdentity();
  std::vector<Layer> layers;
  for (int l = 0; l < depth - 1; ++l) layers.emplace_back(eye, zeros(dim), Activation::relu);
  layers.emplace_back(eye, zeros(dim), Activation::linear);
  return ReluNetwork(std::move(layers));
}

}  // namespace

ReluNetwork abs_net(double scale) {
  require(scale > 0.0, "abs_net: scale must be positive");
  Matrix first(2, 1);
  first << 1.0, -1.0;
  Matrix second(1, 2);
  second << 1.0 / scale, 1.0 / scale;
  std::vector<Layer> layers;
  layers.emplace_back(first, zeros(2), Activation::relu);
  layers.emplace_back(second, zeros(1), Activation::linear);
  return ReluNetwork(std::move(layers));
}

int square_stage_count(double eps) {
  require(eps > 0.0 && eps < 1.0, "square_net: eps must lie in (0,1)");
  int m = static_cast<int>(std::ceil(0.5 * std::log2(1.0 / eps))) + 1;
  // Interpolation error 4^{-m}/8 is below double resolution past m = 27.
  return std::clamp(m, 1, 27);
}

// Sawtooth-composition interpolant of t^2 at dyadic points. Hidden state
// [x, s, a, b]: x carries the input, s the accumulated correction, (a, b)
// the running hat-function iterate g_l = 2a - 4b.
ReluNetwork square_net(double eps, bool unit_weights) {
  const int m = square_stage_count(eps);
  std::vector<Layer> layers;

  // Unit-weight mode replaces the (2a - 4b) coefficients by duplicated
  // units: two copies of a, four of b, all wired with weights +-1.
  const int na = unit_weights ? 2 : 1;
  const int nb = unit_weights ? 4 : 1;
  const double ca = unit_weights ? 1.0 : 2.0;
  const double cb = unit_weights ? -1.0 : -4.0;
  const Eigen::Index width = 2 + na + nb;

  {
    Matrix w = Matrix::Zero(width, 1);
    Vector b = zeros(width);
    w(0, 0) = 1.0;  // x = relu(t)
    for (int i = 0; i < na; ++i) w(2 + i, 0) = 1.0;
    for (int i = 0; i < nb; ++i) {
      w(2 + na + i, 0) = 1.0;
      b[2 + na + i] = -0.5;
    }
    layers.emplace_back(w, std::move(b), Activation::relu);
  }
  for (int l = 1; l < m; ++l) {
    const double pow4 = std::pow(4.0, -l);
    Matrix w = Matrix::Zero(width, width);
    Vector b = zeros(width);
    w(0, 0) = 1.0;
    w(1, 1) = 1.0;
    for (int i = 0; i < na; ++i) w(1, 2 + i) = ca * pow4;
    for (int i = 0; i < nb; ++i) w(1, 2 + na + i) = cb * pow4;
    for (int r = 0; r < na + nb; ++r) {
      const Eigen::Index row = 2 + r;
      for (int i = 0; i < na; ++i) w(row, 2 + i) = ca;
      for (int i = 0; i < nb; ++i) w(row, 2 + na + i) = cb;
      if (r >= na) b[row] = -0.5;
    }
    layers.emplace_back(w, std::move(b), Activation::relu);
  }
  {
    const double pow4 = std::pow(4.0, -m);
    Matrix w = Matrix::Zero(1, width);
    w(0, 0) = 1.0;
    w(0, 1) = -1.0;
    for (int i = 0; i < na; ++i) w(0, 2 + i) = -ca * pow4;
    for (int i = 0; i < nb; ++i) w(0, 2 + na + i) = -cb * pow4;
    layers.emplace_back(w, zeros(1), Activation::linear);
  }
  return ReluNetwork(std::move(layers));
}

// One coordinate of sq_norm_net: t = |x_i|/R fed into a square chain, as a
// subnet over the full D-dimensional input.
namespace {
ReluNetwork scaled_square_of_abs(int dim, int coord, double radius, double sq_eps,
                                 bool unit_weights) {
  ReluNetwork sq = square_net(sq_eps, unit_weights);
  // Absolute-value stage: rows relu(x_i), relu(-x_i); the square chain's
  // first layer then reads t = (u+ + u-)/R.
  Matrix pre = Matrix::Zero(2, dim);
  pre(0, coord) = 1.0;
  pre(1, coord) = -1.0;
  std::vector<Layer> layers;
  layers.emplace_back(pre, zeros(2), Activation::relu);
  const Layer& sq_first = sq.layers().front();
  Matrix fold = Matrix::Zero(sq_first.rows(), 2);
  Matrix dense_first = to_dense(sq_first.weights);
  fold.col(0) = dense_first.col(0) / radius;
  fold.col(1) = dense_first.col(0) / radius;
  layers.emplace_back(fold, sq_first.bias, Activation::relu);
  layers.insert(layers.end(), sq.layers().begin() + 1, sq.layers().end());
  return ReluNetwork(std::move(layers));
}
}  // namespace

ReluNetwork sq_norm_net(int dim, double radius, double eps, bool unit_weights) {
  require(dim >= 1, "sq_norm_net: dim must be >= 1");
  require(radius > 0.0, "sq_norm_net: radius must be positive");
  require(eps > 0.0, "sq_norm_net: eps must be positive");
  const double sq_eps = std::min(eps / (dim * radius * radius), 0.5);
  std::vector<ReluNetwork> coords;
  coords.reserve(static_cast<size_t>(dim));
  for (int i = 0; i < dim; ++i)
    coords.push_back(scaled_square_of_abs(dim, i, radius, sq_eps, unit_weights));
  std::vector<double> scales(static_cast<size_t>(dim), radius * radius);
  return linear_combine(coords, scales);
}

namespace {
// Scalar multiplication u*v on [-a,a]^2 by polarization:
// uv = (s^2/2)((u+v)^2 - u^2 - v^2)/s^2 with s = max(2a, 1), each square
// approximated on [0,1] after the |.|/s fold.
ReluNetwork scalar_mult(int in_dim, int u_coord, int v_coord, double bound, double eps) {
  const double s = std::max(2.0 * bound, 1.0);
  const double sq_eps = std::min(2.0 * eps / (3.0 * s * s), 0.5);
  ReluNetwork sq = square_net(sq_eps);
  const Layer& sq_first = sq.layers().front();
  const Matrix dense_first = to_dense(sq_first.weights);
  const Eigen::Index h = sq_first.rows();

  // Pre-layer: relu(+-(u+v)), relu(+-u), relu(+-v).
  Matrix pre = Matrix::Zero(6, in_dim);
  pre(0, u_coord) = 1.0;
  pre(0, v_coord) = 1.0;
  pre(1, u_coord) = -1.0;
  pre(1, v_coord) = -1.0;
  pre(2, u_coord) = 1.0;
  pre(3, u_coord) = -1.0;
  pre(4, v_coord) = 1.0;
  pre(5, v_coord) = -1.0;

  // Three parallel square chains reading |u+v|/s, |u|/s, |v|/s.
  std::vector<Layer> layers;
  layers.emplace_back(pre, zeros(6), Activation::relu);
  Matrix fold = Matrix::Zero(3 * h, 6);
  Vector fold_bias(3 * h);
  for (int c = 0; c < 3; ++c) {
    fold.block(c * h, 2 * c, h, 1) = dense_first.col(0) / s;
    fold.block(c * h, 2 * c + 1, h, 1) = dense_first.col(0) / s;
    fold_bias.segment(c * h, h) = sq_first.bias;
  }
  layers.emplace_back(fold, std::move(fold_bias), Activation::relu);
  for (size_t l = 1; l < sq.layers().size(); ++l) {
    const Layer& sl = sq.layers()[l];
    const Matrix dsl = to_dense(sl.weights);
    Matrix w = Matrix::Zero(3 * sl.rows(), 3 * sl.cols());
    Vector b(3 * sl.rows());
    for (int c = 0; c < 3; ++c) {
      w.block(c * sl.rows(), c * sl.cols(), sl.rows(), sl.cols()) = dsl;
      b.segment(c * sl.rows(), sl.rows()) = sl.bias;
    }
    layers.emplace_back(w, std::move(b),
                        l + 1 == sq.layers().size() ? Activation::linear : Activation::relu);
  }
  // Final readout currently yields (S1, S2, S3); compose (s^2/2)(S1-S2-S3).
  ReluNetwork chains(std::move(layers));
  Matrix read(1, 3);
  read << s * s / 2.0, -s * s / 2.0, -s * s / 2.0;
  return fuse_output_affine(read, zeros(1), chains);
}
}  // namespace

ReluNetwork mult_net(int dim, double bound, double eps) {
  require(dim >= 1, "mult_net: dim must be >= 1");
  require(bound > 0.0, "mult_net: bound must be positive");
  require(eps > 0.0 && eps < 0.5, "mult_net: eps must lie in (0, 1/2)");
  std::vector<ReluNetwork> coords;
  coords.reserve(static_cast<size_t>(dim));
  for (int i = 0; i < dim; ++i)
    coords.push_back(scalar_mult(dim + 1, i, dim, bound, eps));
  return parallelize(coords, std::vector<double>(static_cast<size_t>(dim), 1.0));
}

ReluNetwork polynomial_net(const std::vector<double>& coeffs, double eps) {
  require(!coeffs.empty(), "polynomial_net: empty coefficient list");
  require(eps > 0.0 && eps < 1.0, "polynomial_net: eps must lie in (0,1)");
  const int degree = static_cast<int>(coeffs.size()) - 1;
  if (degree == 0) {
    Matrix A = Matrix::Zero(1, 1);
    Vector b(1);
    b << coeffs[0];
    return affine_net(A, b);
  }
  if (degree == 1) {
    Matrix A(1, 1);
    A << coeffs[1];
    Vector b(1);
    b << coeffs[0];
    return affine_net(A, b);
  }

  // Horner: acc <- c_k + z * acc, k = degree-1 .. 0. Error through the
  // remaining suffix is amplified by at most Lambda per stage, measured as
  // max |z| over the domain (1 on [0,1]).
  double lambda = 0.0;
  for (int i = 0; i <= 1000; ++i) lambda = std::max(lambda, std::abs(i / 1000.0));
  lambda = std::max(lambda, 1.0);
  const int stages = degree;
  const double stage_eps = std::min(eps / (2.0 * stages * lambda), 0.45);

  // Interval bound for the accumulator entering each stage.
  std::vector<double> acc_bound(static_cast<size_t>(degree) + 1, 0.0);
  acc_bound[static_cast<size_t>(degree)] = std::abs(coeffs[static_cast<size_t>(degree)]);
  for (int k = degree - 1; k >= 0; --k)
    acc_bound[static_cast<size_t>(k)] =
        std::abs(coeffs[static_cast<size_t>(k)]) + acc_bound[static_cast<size_t>(k) + 1];

  Matrix init = Matrix::Zero(2, 1);
  init(0, 0) = 1.0;
  Vector init_bias(2);
  init_bias << 0.0, coeffs[static_cast<size_t>(degree)];
  ReluNetwork net = affine_net(init, init_bias);

  for (int k = degree - 1; k >= 0; --k) {
    const double a_k = std::max(1.0, acc_bound[static_cast<size_t>(k) + 1] + eps);
    ReluNetwork carry_z = fuse_input_affine(identity_net(1), selector({0}, 2), zeros(1));
    ReluNetwork mul = mult_net(1, a_k, stage_eps);  // input (z, acc)
    ReluNetwork stage = parallelize({carry_z, mul}, {1.0, 1.0});
    Matrix post(2, 2);
    post << 1.0, 0.0, 0.0, 1.0;
    Vector post_bias(2);
    post_bias << 0.0, coeffs[static_cast<size_t>(k)];
    stage = fuse_output_affine(post, post_bias, stage);
    net = concatenate(stage, net);
  }
  net = fuse_output_affine(selector({1}, 2), zeros(1), net);

  // Validate the stage budget against direct evaluation.
  double worst = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double z = i / 2000.0;
    double exact = 0.0;
    for (int k = degree; k >= 0; --k) exact = exact * z + coeffs[static_cast<size_t>(k)];
    Vector in(1);
    in << z;
    worst = std::max(worst, std::abs(net.evaluate(in)[0] - exact));
  }
  if (worst > eps)
    throw std::runtime_error("polynomial_net: stage budget failed the dense-grid check");
  return net;
}

int reciprocal_series_order(double bound, double eps) {
  return static_cast<int>(std::ceil(bound * bound * std::log(2.0 * bound / eps)));
}

ReluNetwork reciprocal_net(double bound, double eps) {
  require(bound >= 1.0, "reciprocal_net: bound must be >= 1");
  require(eps > 0.0 && eps < 1.0, "reciprocal_net: eps must lie in (0,1)");
  const double c = 1.0 / bound;
  const int order = reciprocal_series_order(bound, eps);
  // Truncation <= eps/2; the remaining eps/2 is split over the stage
  // multiplications, whose errors accumulate linearly.
  const double stage_eps =
      std::clamp(eps * bound / (static_cast<double>(order) * order), 1e-14, 0.45);

  // State (z, acc, p): z = 1 - c t carried exactly, acc the running series
  // sum, p the current power of z.
  Matrix init = Matrix::Zero(3, 1);
  init(0, 0) = -c;
  init(1, 0) = -c * c;
  init(2, 0) = -c;
  Vector init_bias(3);
  init_bias << 1.0, 2.0 * c, 1.0;
  ReluNetwork net = affine_net(init, init_bias);

  for (int k = 2; k <= order; ++k) {
    ReluNetwork carry = fuse_input_affine(identity_net(2),
                                          selector({0, 1}, 3), zeros(2));
    ReluNetwork mul =
        fuse_input_affine(mult_net(1, 2.0, stage_eps), selector({0, 2}, 3), zeros(2));
    ReluNetwork stage = parallelize({carry, mul}, {1.0, 1.0});
    Matrix post(3, 3);
    post << 1.0, 0.0, 0.0, 0.0, 1.0, c, 0.0, 0.0, 1.0;
    stage = fuse_output_affine(post, zeros(3), stage);
    net = concatenate(stage, net);
  }
  return fuse_output_affine(selector({1}, 3), zeros(1), net);
}

ReluNetwork l1_norm_net(int dim) {
  require(dim >= 1, "l1_norm_net: dim must be >= 1");
  Matrix first(2 * dim, dim);
  first.topRows(dim) = Matrix::Identity(dim, dim);
  first.bottomRows(dim) = -Matrix::Identity(dim, dim);
  Matrix second = Matrix::Ones(1, 2 * dim);
  std::vector<Layer> layers;
  layers.emplace_back(first, zeros(2 * dim), Activation::relu);
  layers.emplace_back(second, zeros(1), Activation::linear);
  return ReluNetwork(std::move(layers));
}

ReluNetwork l1_normalize_net(int dim, double bound, double eps, bool nonneg_inputs) {
  require(dim >= 1, "l1_normalize_net: dim must be >= 1");
  require(bound >= 1.0, "l1_normalize_net: bound must be >= 1");
  require(eps > 0.0 && eps < 0.5, "l1_normalize_net: eps must lie in (0, 1/2)");
  ReluNetwork norm_recip =
      concatenate(reciprocal_net(bound, eps / (2.0 * bound)), l1_norm_net(dim));
  ReluNetwork carry = nonneg_inputs
                          ? nonneg_identity_chain(dim, norm_recip.depth())
                          : identity_net(dim);
  ReluNetwork joined = parallelize({carry, norm_recip}, {1.0, 1.0});
  ReluNetwork prod = mult_net(dim, 2.0 * bound, eps / 2.0);
  return concatenate(prod, joined);
}

namespace {
// Exact pairwise minimum min(u, v) = u - relu(u - v) over selected inputs.
ReluNetwork pair_min(int in_dim, int u_coord, int v_coord) {
  Matrix first = Matrix::Zero(3, in_dim);
  first(0, u_coord) = 1.0;
  first(1, u_coord) = -1.0;
  first(2, u_coord) = 1.0;
  first(2, v_coord) += -1.0;  // duplicated coords collapse to a zero row
  Matrix second(1, 3);
  second << 1.0, -1.0, -1.0;
  std::vector<Layer> layers;
  layers.emplace_back(first, zeros(3), Activation::relu);
  layers.emplace_back(second, zeros(1), Activation::linear);
  return ReluNetwork(std::move(layers));
}
}  // namespace

ReluNetwork min_net(int k) {
  require(k >= 2, "min_net: k must be >= 2");
  if (k == 2) return pair_min(2, 0, 1);
  const int pairs = (k + 1) / 2;
  std::vector<ReluNetwork> round;
  round.reserve(static_cast<size_t>(pairs));
  for (int i = 0; i < pairs; ++i) {
    const int u = 2 * i;
    const int v = std::min(2 * i + 1, k - 1);  // odd k repeats the last entry
    round.push_back(pair_min(k, u, v));
  }
  ReluNetwork stage = parallelize(round, std::vector<double>(static_cast<size_t>(pairs), 1.0));
  if (pairs == 1) return stage;
  return concatenate(min_net(pairs), stage);
}

ReluNetwork sign_net(double eps) {
  require(eps > 0.0, "sign_net: eps must be positive");
  Matrix first(2, 1);
  first << 1.0 / eps, 1.0 / eps;
  Vector first_bias(2);
  first_bias << 1.0, -1.0;
  Matrix second(1, 2);
  second << 1.0, -1.0;
  Vector second_bias(1);
  second_bias << -1.0;
  std::vector<Layer> layers;
  layers.emplace_back(first, std::move(first_bias), Activation::relu);
  layers.emplace_back(second, std::move(second_bias), Activation::linear);
  return ReluNetwork(std::move(layers));
}

ReluNetwork clamp_net() {
  Matrix first(1, 1);
  first << -1.0;
  Vector first_bias(1);
  first_bias << 1.0;
  Matrix second(1, 1);
  second << -1.0;
  Vector second_bias(1);
  second_bias << 1.0;
  std::vector<Layer> layers;
  layers.emplace_back(first, std::move(first_bias), Activation::relu);
  layers.emplace_back(second, std::move(second_bias), Activation::linear);
  return ReluNetwork(std::move(layers));
}

ReluNetwork holder_net(const std::function<double(double)>& g, double alpha,
                       double holder_const, double eps, bool unit_weights) {
  require(alpha > 0.0 && alpha <= 1.0, "holder_net: alpha must lie in (0,1]");
  require(holder_const >= 0.0, "holder_net: holder constant must be >= 0");
  require(eps > 0.0 && eps < 1.0, "holder_net: eps must lie in (0,1)");

  int cells = 1;
  if (holder_const > 0.0) {
    const double spacing = std::pow(eps / (2.0 * holder_const), 1.0 / alpha);
    cells = std::max(1, static_cast<int>(std::ceil(1.0 / spacing)));
  }
  const double h = 1.0 / cells;
  std::vector<double> values(static_cast<size_t>(cells) + 1);
  for (int j = 0; j <= cells; ++j) values[static_cast<size_t>(j)] = g(j * h);

  std::vector<double> kink(static_cast<size_t>(cells));   // knot locations
  std::vector<double> coef(static_cast<size_t>(cells));   // slope changes
  double prev_slope = 0.0;
  for (int j = 0; j < cells; ++j) {
    const double slope = (values[static_cast<size_t>(j) + 1] - values[static_cast<size_t>(j)]) / h;
    kink[static_cast<size_t>(j)] = j * h;
    coef[static_cast<size_t>(j)] = slope - prev_slope;
    prev_slope = slope;
  }

  if (!unit_weights) {
    Matrix first(cells, 1);
    Vector first_bias(cells);
    for (int j = 0; j < cells; ++j) {
      first(j, 0) = 1.0;
      first_bias[j] = -kink[static_cast<size_t>(j)];
    }
    Matrix second(1, cells);
    for (int j = 0; j < cells; ++j) second(0, j) = coef[static_cast<size_t>(j)];
    Vector second_bias(1);
    second_bias << values[0];
    std::vector<Layer> layers;
    layers.emplace_back(first, std::move(first_bias), Activation::relu);
    layers.emplace_back(second, std::move(second_bias), Activation::linear);
    return ReluNetwork(std::move(layers));
  }

  // Unit-weight mode: write each slope change as sign * rho * 2^m with
  // rho <= 1 and realize the 2^m by doubling layers over duplicated units.
  // The pair layers are built from triplets; the knot count can be large.
  double max_coef = 1.0;
  for (double cv : coef) max_coef = std::max(max_coef, std::abs(cv));
  const int doublings = static_cast<int>(std::ceil(std::log2(max_coef)));
  const double down = std::pow(2.0, -doublings);

  std::vector<Layer> layers;
  {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(2 * static_cast<size_t>(cells));
    Vector b = zeros(2 * cells);
    for (int j = 0; j < cells; ++j) {
      const double rho = std::abs(coef[static_cast<size_t>(j)]) * down;
      trips.emplace_back(2 * j, 0, rho);
      trips.emplace_back(2 * j + 1, 0, rho);
      b[2 * j] = -rho * kink[static_cast<size_t>(j)];
      b[2 * j + 1] = -rho * kink[static_cast<size_t>(j)];
    }
    SparseMatrix w(2 * cells, 1);
    w.setFromTriplets(trips.begin(), trips.end());
    layers.emplace_back(std::move(w), std::move(b), Activation::relu);
  }
  for (int l = 0; l < doublings; ++l) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(4 * static_cast<size_t>(cells));
    for (int j = 0; j < cells; ++j) {
      trips.emplace_back(2 * j, 2 * j, 1.0);
      trips.emplace_back(2 * j, 2 * j + 1, 1.0);
      trips.emplace_back(2 * j + 1, 2 * j, 1.0);
      trips.emplace_back(2 * j + 1, 2 * j + 1, 1.0);
    }
    SparseMatrix w(2 * cells, 2 * cells);
    w.setFromTriplets(trips.begin(), trips.end());
    layers.emplace_back(std::move(w), zeros(2 * cells), Activation::relu);
  }
  {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(2 * static_cast<size_t>(cells));
    for (int j = 0; j < cells; ++j) {
      const double sign = coef[static_cast<size_t>(j)] < 0.0 ? -0.5 : 0.5;
      trips.emplace_back(0, 2 * j, sign);
      trips.emplace_back(0, 2 * j + 1, sign);
    }
    SparseMatrix w(1, 2 * cells);
    w.setFromTriplets(trips.begin(), trips.end());
    Vector b(1);
    b << values[0];
    layers.emplace_back(std::move(w), std::move(b), Activation::linear);
  }
  return ReluNetwork(std::move(layers));
}

}  // namespace reluforge
