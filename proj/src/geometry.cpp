#include "reluforge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>

namespace reluforge {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kOnManifoldTol = 1e-10;
constexpr double kAmbiguityTol = 1e-9;

Matrix random_orthonormal(int rows, int cols, unsigned seed) {
  if (seed == 0) {
    // Canonical placement: pad the identity.
    Matrix q = Matrix::Zero(rows, cols);
    q.topRows(cols) = Matrix::Identity(cols, cols);
    return q;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(rows, cols);
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  Matrix r = q.transpose() * g;
  for (Eigen::Index j = 0; j < cols; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Vector resolve_center(const Vector& center, int dim) {
  if (center.size() == 0) return Vector::Zero(dim);
  if (center.size() != dim)
    throw std::invalid_argument("manifold center has wrong dimension");
  return center;
}

double angle_between_2d(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const double cross = a.x() * b.y() - a.y() * b.x();
  return std::abs(std::atan2(cross, a.dot(b)));
}

double angle_between_3d(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

}  // namespace

Manifold Manifold::circle(double radius, int ambient_dim, unsigned embed_seed,
                          const Vector& center, double q_max) {
  if (radius <= 0.0) throw std::invalid_argument("circle: radius must be positive");
  if (ambient_dim < 2) throw std::invalid_argument("circle: ambient dim must be >= 2");
  Manifold m;
  m.kind_ = ManifoldKind::circle;
  m.d_ = 1;
  m.D0_ = 2;
  m.D_ = ambient_dim;
  m.r_ = radius;
  m.Q_ = random_orthonormal(ambient_dim, 2, embed_seed);
  m.offset_ = resolve_center(center, ambient_dim);
  m.q_max_ = q_max;
  return m;
}

Manifold Manifold::sphere(double radius, int ambient_dim, unsigned embed_seed,
                          const Vector& center, double q_max) {
  if (radius <= 0.0) throw std::invalid_argument("sphere: radius must be positive");
  if (ambient_dim < 3) throw std::invalid_argument("sphere: ambient dim must be >= 3");
  Manifold m;
  m.kind_ = ManifoldKind::sphere;
  m.d_ = 2;
  m.D0_ = 3;
  m.D_ = ambient_dim;
  m.r_ = radius;
  m.Q_ = random_orthonormal(ambient_dim, 3, embed_seed);
  m.offset_ = resolve_center(center, ambient_dim);
  m.q_max_ = q_max;
  return m;
}

Manifold Manifold::torus(double major, double minor, int ambient_dim, unsigned embed_seed,
                         const Vector& center, double q_max) {
  if (minor <= 0.0 || major <= minor)
    throw std::invalid_argument("torus: requires major > minor > 0");
  if (ambient_dim < 3) throw std::invalid_argument("torus: ambient dim must be >= 3");
  Manifold m;
  m.kind_ = ManifoldKind::torus;
  m.d_ = 2;
  m.D0_ = 3;
  m.D_ = ambient_dim;
  m.r_ = minor;
  m.R_ = major;
  m.Q_ = random_orthonormal(ambient_dim, 3, embed_seed);
  m.offset_ = resolve_center(center, ambient_dim);
  m.q_max_ = q_max;
  return m;
}

Manifold Manifold::swiss_roll(double pitch, double theta0, double theta1, double height,
                              int ambient_dim, unsigned embed_seed,
                              const Vector& center, double q_max) {
  if (pitch <= 0.0 || theta0 <= 0.0 || theta1 <= theta0 || height <= 0.0)
    throw std::invalid_argument("swiss_roll: bad shape parameters");
  if (ambient_dim < 3) throw std::invalid_argument("swiss_roll: ambient dim must be >= 3");
  Manifold m;
  m.kind_ = ManifoldKind::swiss_roll;
  m.d_ = 2;
  m.D0_ = 3;
  m.D_ = ambient_dim;
  m.sw_a_ = pitch;
  m.sw_t0_ = theta0;
  m.sw_t1_ = theta1;
  m.sw_h_ = height;
  m.Q_ = random_orthonormal(ambient_dim, 3, embed_seed);
  m.offset_ = resolve_center(center, ambient_dim);
  m.q_max_ = q_max;
  return m;
}

Manifold Manifold::affine_subspace(int intrinsic_dim, int ambient_dim, const Vector& extent,
                                   unsigned embed_seed, const Vector& center, double q_max) {
  if (intrinsic_dim < 1 || intrinsic_dim >= ambient_dim)
    throw std::invalid_argument("affine_subspace: requires 1 <= d < D");
  if (extent.size() != intrinsic_dim || extent.minCoeff() <= 0.0)
    throw std::invalid_argument("affine_subspace: extent must be positive per axis");
  Manifold m;
  m.kind_ = ManifoldKind::affine_subspace;
  m.d_ = intrinsic_dim;
  m.D0_ = intrinsic_dim;
  m.D_ = ambient_dim;
  m.affine_extent_ = extent;
  m.Q_ = random_orthonormal(ambient_dim, intrinsic_dim, embed_seed);
  m.offset_ = resolve_center(center, ambient_dim);
  m.q_max_ = q_max;
  return m;
}

Vector Manifold::embed(const Vector& canonical) const { return Q_ * canonical + offset_; }

Vector Manifold::canonical_of(const Vector& ambient) const {
  return Q_.transpose() * (ambient - offset_);
}

double Manifold::swiss_arclength(double theta) const {
  return 0.5 * sw_a_ * (theta * std::sqrt(1.0 + theta * theta) + std::asinh(theta));
}

double Manifold::swiss_theta_from_arclength(double s) const {
  double lo = sw_t0_, hi = sw_t1_;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (swiss_arclength(mid) < s)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

Vector Manifold::canonical_project(const Vector& c) const {
  switch (kind_) {
    case ManifoldKind::circle: {
      const double rho = c.norm();
      if (rho < kAmbiguityTol * std::max(1.0, r_))
        throw AmbiguityError("projection ambiguous: point on the circle axis");
      return (r_ / rho) * c;
    }
    case ManifoldKind::sphere: {
      const double rho = c.norm();
      if (rho < kAmbiguityTol * std::max(1.0, r_))
        throw AmbiguityError("projection ambiguous: point at the sphere center");
      return (r_ / rho) * c;
    }
    case ManifoldKind::torus: {
      const double rho = std::hypot(c[0], c[1]);
      if (rho < kAmbiguityTol * std::max(1.0, R_))
        throw AmbiguityError("projection ambiguous: point on the torus axis");
      const double wx = rho - R_;
      const double wz = c[2];
      const double wn = std::hypot(wx, wz);
      if (wn < kAmbiguityTol * std::max(1.0, r_))
        throw AmbiguityError("projection ambiguous: point on the torus center ring");
      const double ux = c[0] / rho, uy = c[1] / rho;
      const double radial = R_ + r_ * wx / wn;
      Vector out(3);
      out << radial * ux, radial * uy, r_ * wz / wn;
      return out;
    }
    case ManifoldKind::swiss_roll: {
      const double vz = std::clamp(c[2], 0.0, sw_h_);
      const Eigen::Vector2d w(c[0], c[1]);
      auto objective = [&](double th) {
        const Eigen::Vector2d p(sw_a_ * th * std::cos(th), sw_a_ * th * std::sin(th));
        return (w - p).squaredNorm();
      };
      // Coarse scan catches every winding; golden-section refinement then
      // narrows each candidate bracket to 1e-10 in parameter space.
      const int grid = 4096;
      std::vector<std::pair<double, double>> candidates;  // (objective, theta)
      double prev = objective(sw_t0_);
      double best = prev;
      for (int i = 1; i <= grid; ++i) {
        const double th = sw_t0_ + (sw_t1_ - sw_t0_) * i / grid;
        const double f = objective(th);
        best = std::min(best, f);
        prev = f;
      }
      const double step = (sw_t1_ - sw_t0_) / grid;
      for (int i = 0; i <= grid; ++i) {
        const double th = sw_t0_ + step * i;
        const double f = objective(th);
        const double fl = objective(std::max(sw_t0_, th - step));
        const double fr = objective(std::min(sw_t1_, th + step));
        if (f <= fl && f <= fr && f <= best + 4.0 * sw_a_ * sw_a_ * step * step + 1e-12) {
          double lo = std::max(sw_t0_, th - step), hi = std::min(sw_t1_, th + step);
          const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
          double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
          double f1 = objective(x1), f2 = objective(x2);
          while (hi - lo > 1e-12) {
            if (f1 < f2) {
              hi = x2;
              x2 = x1;
              f2 = f1;
              x1 = hi - gr * (hi - lo);
              f1 = objective(x1);
            } else {
              lo = x1;
              x1 = x2;
              f1 = f2;
              x2 = lo + gr * (hi - lo);
              f2 = objective(x2);
            }
          }
          const double th_ref = 0.5 * (lo + hi);
          candidates.emplace_back(objective(th_ref), th_ref);
        }
      }
      std::sort(candidates.begin(), candidates.end());
      if (candidates.empty()) throw std::runtime_error("swiss_roll projection: no candidate");
      if (candidates.size() > 1 &&
          candidates[1].first - candidates[0].first < kAmbiguityTol &&
          std::abs(candidates[1].second - candidates[0].second) > 1e-6)
        throw AmbiguityError("projection ambiguous between swiss roll windings");
      const double th = candidates[0].second;
      Vector out(3);
      out << sw_a_ * th * std::cos(th), sw_a_ * th * std::sin(th), vz;
      return out;
    }
    case ManifoldKind::affine_subspace:
      return c;
  }
  throw std::logic_error("unreachable");
}

Vector Manifold::project(const Vector& x) const {
  if (x.size() != D_) throw std::invalid_argument("project: wrong ambient dimension");
  return embed(canonical_project(canonical_of(x)));
}

Matrix Manifold::tangent_basis(const Vector& v) const {
  const Vector c = canonical_of(v);
  Matrix t_can(D0_, d_);
  switch (kind_) {
    case ManifoldKind::circle: {
      if (std::abs(c.norm() - r_) > kOnManifoldTol * std::max(1.0, r_))
        throw std::invalid_argument("tangent_basis: point is off the circle");
      t_can(0, 0) = -c[1] / r_;
      t_can(1, 0) = c[0] / r_;
      break;
    }
    case ManifoldKind::sphere: {
      if (std::abs(c.norm() - r_) > kOnManifoldTol * std::max(1.0, r_))
        throw std::invalid_argument("tangent_basis: point is off the sphere");
      const Eigen::Vector3d n = c.head<3>() / r_;
      int axis = 0;
      for (int k = 1; k < 3; ++k)
        if (std::abs(n[k]) < std::abs(n[axis])) axis = k;
      Eigen::Vector3d e = Eigen::Vector3d::Zero();
      e[axis] = 1.0;
      const Eigen::Vector3d t1 = (e - e.dot(n) * n).normalized();
      const Eigen::Vector3d t2 = n.cross(t1);
      t_can.col(0) = t1;
      t_can.col(1) = t2;
      break;
    }
    case ManifoldKind::torus: {
      const double rho = std::hypot(c[0], c[1]);
      const double theta = std::atan2(c[1], c[0]);
      const double phi = std::atan2(c[2], rho - R_);
      t_can.col(0) << -std::sin(theta), std::cos(theta), 0.0;
      t_can.col(1) << -std::sin(phi) * std::cos(theta), -std::sin(phi) * std::sin(theta),
          std::cos(phi);
      break;
    }
    case ManifoldKind::swiss_roll: {
      const double rho = std::hypot(c[0], c[1]);
      const double theta = rho / sw_a_;
      const double norm = std::sqrt(1.0 + theta * theta);
      t_can.col(0) << (std::cos(theta) - theta * std::sin(theta)) / norm,
          (std::sin(theta) + theta * std::cos(theta)) / norm, 0.0;
      t_can.col(1) << 0.0, 0.0, 1.0;
      break;
    }
    case ManifoldKind::affine_subspace:
      t_can = Matrix::Identity(D0_, d_);
      break;
  }
  return Q_ * t_can;
}

Matrix Manifold::normal_basis(const Vector& v) const {
  const Matrix t = tangent_basis(v);
  Eigen::HouseholderQR<Matrix> qr(t);
  Matrix full = qr.householderQ() * Matrix::Identity(D_, D_);
  return full.rightCols(D_ - d_);
}

void Manifold::ensure_torus_grid() const {
  if (!torus_nodes_.empty()) return;
  torus_grid_n_ = 200;
  torus_nodes_.reserve(static_cast<size_t>(torus_grid_n_) * torus_grid_n_);
  for (int i = 0; i < torus_grid_n_; ++i) {
    const double theta = 2.0 * kPi * i / torus_grid_n_;
    for (int j = 0; j < torus_grid_n_; ++j) {
      const double phi = 2.0 * kPi * j / torus_grid_n_;
      Vector p(3);
      p << (R_ + r_ * std::cos(phi)) * std::cos(theta),
          (R_ + r_ * std::cos(phi)) * std::sin(theta), r_ * std::sin(phi);
      torus_nodes_.push_back(p);
    }
  }
}

namespace {
// Shortest path field over the torus parameter grid, 8-neighborhood,
// chordal edge lengths.
std::vector<double> torus_distance_field(const std::vector<Vector>& nodes, int n, int source) {
  std::vector<double> dist(nodes.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[static_cast<size_t>(source)] = 0.0;
  heap.emplace(0.0, source);
  const int di[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
  const int dj[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[static_cast<size_t>(u)]) continue;
    const int ui = u / n, uj = u % n;
    for (int k = 0; k < 8; ++k) {
      const int vi = (ui + di[k] + n) % n;
      const int vj = (uj + dj[k] + n) % n;
      const int v = vi * n + vj;
      const double w =
          (nodes[static_cast<size_t>(u)] - nodes[static_cast<size_t>(v)]).norm();
      if (d + w < dist[static_cast<size_t>(v)]) {
        dist[static_cast<size_t>(v)] = d + w;
        heap.emplace(d + w, v);
      }
    }
  }
  return dist;
}

int torus_snap(const Vector& c, double R, int n) {
  const double theta = std::atan2(c[1], c[0]);
  const double rho = std::hypot(c[0], c[1]);
  const double phi = std::atan2(c[2], rho - R);
  auto wrap = [n](double angle) {
    double t = angle / (2.0 * kPi);
    t -= std::floor(t);
    int idx = static_cast<int>(std::lround(t * n)) % n;
    return idx < 0 ? idx + n : idx;
  };
  return wrap(theta) * n + wrap(phi);
}
}  // namespace

double Manifold::geodesic_dist(const Vector& v, const Vector& w) const {
  const Vector a = canonical_of(v), b = canonical_of(w);
  switch (kind_) {
    case ManifoldKind::circle:
      return r_ * angle_between_2d(a.head<2>(), b.head<2>());
    case ManifoldKind::sphere:
      return r_ * angle_between_3d(a.head<3>(), b.head<3>());
    case ManifoldKind::torus: {
      ensure_torus_grid();
      const int s = torus_snap(a, R_, torus_grid_n_);
      const int t = torus_snap(b, R_, torus_grid_n_);
      if (s == t) return (a - b).norm();
      auto field = torus_distance_field(torus_nodes_, torus_grid_n_, s);
      return field[static_cast<size_t>(t)];
    }
    case ManifoldKind::swiss_roll: {
      const double sa = swiss_arclength(std::hypot(a[0], a[1]) / sw_a_);
      const double sb = swiss_arclength(std::hypot(b[0], b[1]) / sw_a_);
      return std::hypot(sa - sb, a[2] - b[2]);
    }
    case ManifoldKind::affine_subspace:
      return (a - b).norm();
  }
  throw std::logic_error("unreachable");
}

Vector Manifold::geodesic_dists_from(const Vector& v, const Matrix& targets) const {
  Vector out(targets.cols());
  if (kind_ == ManifoldKind::torus) {
    ensure_torus_grid();
    const int s = torus_snap(canonical_of(v), R_, torus_grid_n_);
    auto field = torus_distance_field(torus_nodes_, torus_grid_n_, s);
    for (Eigen::Index i = 0; i < targets.cols(); ++i) {
      const int t = torus_snap(canonical_of(targets.col(i)), R_, torus_grid_n_);
      out[i] = (s == t) ? (v - targets.col(i)).norm() : field[static_cast<size_t>(t)];
    }
    return out;
  }
  for (Eigen::Index i = 0; i < targets.cols(); ++i)
    out[i] = geodesic_dist(v, targets.col(i));
  return out;
}

double Manifold::local_reach(const Vector& v) const {
  const Vector c = canonical_of(v);
  switch (kind_) {
    case ManifoldKind::circle:
      return r_;
    case ManifoldKind::sphere:
      return r_;
    case ManifoldKind::torus: {
      const double rho = std::hypot(c[0], c[1]);
      return std::min(r_, rho);
    }
    case ManifoldKind::swiss_roll: {
      const double theta = std::hypot(c[0], c[1]) / sw_a_;
      const double kappa =
          (theta * theta + 2.0) / (sw_a_ * std::pow(theta * theta + 1.0, 1.5));
      return std::min(1.0 / kappa, kPi * sw_a_);
    }
    case ManifoldKind::affine_subspace:
      return 2.0 * affine_extent_.norm();  // +inf capped at the domain diameter
  }
  throw std::logic_error("unreachable");
}

double Manifold::global_reach() const {
  switch (kind_) {
    case ManifoldKind::circle:
    case ManifoldKind::sphere:
      return r_;
    case ManifoldKind::torus:
      return std::min(r_, R_ - r_);
    case ManifoldKind::swiss_roll: {
      const double theta = sw_t0_;
      const double kappa =
          (theta * theta + 2.0) / (sw_a_ * std::pow(theta * theta + 1.0, 1.5));
      return std::min(1.0 / kappa, kPi * sw_a_);
    }
    case ManifoldKind::affine_subspace:
      return 2.0 * affine_extent_.norm();
  }
  throw std::logic_error("unreachable");
}

double Manifold::volume() const {
  switch (kind_) {
    case ManifoldKind::circle:
      return 2.0 * kPi * r_;
    case ManifoldKind::sphere:
      return 4.0 * kPi * r_ * r_;
    case ManifoldKind::torus:
      return 4.0 * kPi * kPi * R_ * r_;
    case ManifoldKind::swiss_roll:
      return (swiss_arclength(sw_t1_) - swiss_arclength(sw_t0_)) * sw_h_;
    case ManifoldKind::affine_subspace: {
      double vol = 1.0;
      for (Eigen::Index i = 0; i < affine_extent_.size(); ++i)
        vol *= 2.0 * affine_extent_[i];
      return vol;
    }
  }
  throw std::logic_error("unreachable");
}

std::optional<double> Manifold::geodesic_from_chord(double chord) const {
  switch (kind_) {
    case ManifoldKind::circle:
    case ManifoldKind::sphere:
      return 2.0 * r_ * std::asin(std::clamp(chord / (2.0 * r_), 0.0, 1.0));
    case ManifoldKind::affine_subspace:
      return chord;
    default:
      return std::nullopt;
  }
}

Matrix Manifold::probe_points(int n) const {
  n = std::max(n, 8);
  std::vector<Vector> pts;
  pts.reserve(static_cast<size_t>(n));
  switch (kind_) {
    case ManifoldKind::circle: {
      for (int i = 0; i < n; ++i) {
        const double th = 2.0 * kPi * i / n;
        Vector c(2);
        c << r_ * std::cos(th), r_ * std::sin(th);
        pts.push_back(c);
      }
      break;
    }
    case ManifoldKind::sphere: {
      const double golden = kPi * (3.0 - std::sqrt(5.0));
      for (int i = 0; i < n; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / n;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double th = golden * i;
        Vector c(3);
        c << r_ * rho * std::cos(th), r_ * rho * std::sin(th), r_ * z;
        pts.push_back(c);
      }
      break;
    }
    case ManifoldKind::torus: {
      const int side = std::max(8, static_cast<int>(std::ceil(std::sqrt(double(n)))));
      for (int i = 0; i < side; ++i)
        for (int j = 0; j < side; ++j) {
          const double th = 2.0 * kPi * i / side;
          const double ph = 2.0 * kPi * j / side;
          Vector c(3);
          c << (R_ + r_ * std::cos(ph)) * std::cos(th),
              (R_ + r_ * std::cos(ph)) * std::sin(th), r_ * std::sin(ph);
          pts.push_back(c);
        }
      break;
    }
    case ManifoldKind::swiss_roll: {
      const double s0 = swiss_arclength(sw_t0_), s1 = swiss_arclength(sw_t1_);
      const double aspect = (s1 - s0) / sw_h_;
      const int ns = std::max(4, static_cast<int>(std::ceil(std::sqrt(n * aspect))));
      const int nv = std::max(4, static_cast<int>(std::ceil(double(n) / ns)));
      for (int i = 0; i < ns; ++i)
        for (int j = 0; j < nv; ++j) {
          const double s = s0 + (s1 - s0) * (i + 0.5) / ns;
          const double th = swiss_theta_from_arclength(s);
          Vector c(3);
          c << sw_a_ * th * std::cos(th), sw_a_ * th * std::sin(th),
              sw_h_ * (j + 0.5) / nv;
          pts.push_back(c);
        }
      break;
    }
    case ManifoldKind::affine_subspace: {
      const int side =
          std::max(2, static_cast<int>(std::ceil(std::pow(double(n), 1.0 / d_))));
      std::vector<int> idx(static_cast<size_t>(d_), 0);
      while (true) {
        Vector c(d_);
        for (int k = 0; k < d_; ++k)
          c[k] = affine_extent_[k] * (2.0 * (idx[static_cast<size_t>(k)] + 0.5) / side - 1.0);
        pts.push_back(c);
        int k = 0;
        while (k < d_ && ++idx[static_cast<size_t>(k)] == side) idx[static_cast<size_t>(k++)] = 0;
        if (k == d_) break;
      }
      break;
    }
  }
  Matrix out(D_, static_cast<Eigen::Index>(pts.size()));
  for (size_t i = 0; i < pts.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = embed(pts[i]);
  return out;
}

Vector Manifold::surface_from_unit(const Vector& u) const {
  if (u.size() != d_) throw std::invalid_argument("surface_from_unit: wrong param dim");
  Vector c(D0_);
  switch (kind_) {
    case ManifoldKind::circle: {
      const double th = 2.0 * kPi * u[0];
      c << r_ * std::cos(th), r_ * std::sin(th);
      break;
    }
    case ManifoldKind::sphere: {
      const double z = 1.0 - 2.0 * u[0];
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double th = 2.0 * kPi * u[1];
      c << r_ * rho * std::cos(th), r_ * rho * std::sin(th), r_ * z;
      break;
    }
    case ManifoldKind::torus: {
      const double th = 2.0 * kPi * u[0];
      // Invert the minor-angle area CDF (R phi + r sin phi) / (2 pi R).
      const double target = u[1] * 2.0 * kPi * R_;
      double lo = 0.0, hi = 2.0 * kPi;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (R_ * mid + r_ * std::sin(mid) < target)
          lo = mid;
        else
          hi = mid;
      }
      const double ph = 0.5 * (lo + hi);
      c << (R_ + r_ * std::cos(ph)) * std::cos(th),
          (R_ + r_ * std::cos(ph)) * std::sin(th), r_ * std::sin(ph);
      break;
    }
    case ManifoldKind::swiss_roll: {
      const double s0 = swiss_arclength(sw_t0_), s1 = swiss_arclength(sw_t1_);
      const double th = swiss_theta_from_arclength(s0 + (s1 - s0) * u[0]);
      c << sw_a_ * th * std::cos(th), sw_a_ * th * std::sin(th), sw_h_ * u[1];
      break;
    }
    case ManifoldKind::affine_subspace: {
      for (int k = 0; k < d_; ++k) c[k] = affine_extent_[k] * (2.0 * u[k] - 1.0);
      break;
    }
  }
  return embed(c);
}

TubeSample Manifold::tube_sample(double q, int n, unsigned seed) const {
  if (q < 0.0 || q >= 1.0) throw std::invalid_argument("tube_sample: q must lie in [0,1)");
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  TubeSample out;
  out.points.resize(D_, n);
  out.feet.resize(D_, n);
  const int codim = D_ - d_;
  for (int i = 0; i < n; ++i) {
    Vector c(D0_);
    switch (kind_) {
      case ManifoldKind::circle: {
        const double th = 2.0 * kPi * unif(rng);
        c << r_ * std::cos(th), r_ * std::sin(th);
        break;
      }
      case ManifoldKind::sphere: {
        Eigen::Vector3d g(gauss(rng), gauss(rng), gauss(rng));
        while (g.norm() < 1e-12) g = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
        c = r_ * g.normalized();
        break;
      }
      case ManifoldKind::torus: {
        const double th = 2.0 * kPi * unif(rng);
        double ph = 0.0;
        // Area-weighted rejection for the minor angle.
        while (true) {
          ph = 2.0 * kPi * unif(rng);
          if (unif(rng) <= (R_ + r_ * std::cos(ph)) / (R_ + r_)) break;
        }
        c << (R_ + r_ * std::cos(ph)) * std::cos(th),
            (R_ + r_ * std::cos(ph)) * std::sin(th), r_ * std::sin(ph);
        break;
      }
      case ManifoldKind::swiss_roll: {
        const double s0 = swiss_arclength(sw_t0_), s1 = swiss_arclength(sw_t1_);
        const double th = swiss_theta_from_arclength(s0 + (s1 - s0) * unif(rng));
        c << sw_a_ * th * std::cos(th), sw_a_ * th * std::sin(th), sw_h_ * unif(rng);
        break;
      }
      case ManifoldKind::affine_subspace: {
        c.resize(d_);
        for (int k = 0; k < d_; ++k) c[k] = affine_extent_[k] * (2.0 * unif(rng) - 1.0);
        break;
      }
    }
    const Vector foot = embed(c);
    Vector u = Vector::Zero(D_);
    if (q > 0.0 && codim > 0) {
      Vector dir(codim);
      do {
        for (int k = 0; k < codim; ++k) dir[k] = gauss(rng);
      } while (dir.norm() < 1e-12);
      dir.normalize();
      const double radius = q * local_reach(foot) *
                            std::pow(unif(rng), 1.0 / codim) * (1.0 - 1e-9);
      u = normal_basis(foot) * (radius * dir);
    }
    out.feet.col(i) = foot;
    out.points.col(i) = foot + u;
  }
  return out;
}

bool Manifold::tube_fits_unit_cube(double q) const {
  const Matrix probes = probe_points(20000);
  for (Eigen::Index j = 0; j < probes.cols(); ++j) {
    const double pad = q * local_reach(probes.col(j));
    for (Eigen::Index i = 0; i < D_; ++i) {
      if (probes(i, j) - pad < 0.0 || probes(i, j) + pad > 1.0) return false;
    }
  }
  return true;
}

SeparatedNet separated_net(const Manifold& m, double delta, double probe_density) {
  if (delta <= 0.0) throw std::invalid_argument("separated_net: delta must be positive");
  const double expected =
      std::max(1.0, m.volume() / std::pow(delta, m.intrinsic_dim()));
  const int n_probes = static_cast<int>(
      std::clamp(probe_density * expected, 2000.0, 3.0e6));
  const Matrix probes = m.probe_points(n_probes);
  const Eigen::Index P = probes.cols();

  // Where the metric is monotone in chordal distance the greedy pass runs on
  // squared chords; otherwise on geodesic distance fields per center.
  const bool chord_monotone = m.geodesic_from_chord(0.0).has_value();

  std::vector<Eigen::Index> center_idx;
  Vector min_dist = Vector::Constant(P, std::numeric_limits<double>::infinity());

  if (chord_monotone) {
    // Numeric inversion of the monotone chord -> geodesic map at delta:
    // geodesic(d) > delta iff chord(d) > chord_delta.
    double lo = 0.0, hi = 1e-6;
    while (*m.geodesic_from_chord(hi) < delta && hi < 1e9) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (*m.geodesic_from_chord(mid) < delta)
        lo = mid;
      else
        hi = mid;
    }
    const double chord_delta = 0.5 * (lo + hi);
    const double chord_delta_sq = chord_delta * chord_delta;
    Vector min_sq = Vector::Constant(P, std::numeric_limits<double>::infinity());
    for (Eigen::Index i = 0; i < P; ++i) {
      if (min_sq[i] <= chord_delta_sq) continue;
      center_idx.push_back(i);
      const Vector c = probes.col(i);
      min_sq = min_sq.cwiseMin((probes.colwise() - c).colwise().squaredNorm().transpose());
    }
    for (Eigen::Index i = 0; i < P; ++i)
      min_dist[i] = *m.geodesic_from_chord(std::sqrt(min_sq[i]));
  } else {
    for (Eigen::Index i = 0; i < P; ++i) {
      if (min_dist[i] <= delta) continue;
      center_idx.push_back(i);
      min_dist = min_dist.cwiseMin(m.geodesic_dists_from(probes.col(i), probes));
    }
  }

  SeparatedNet net;
  net.delta = delta;
  net.centers.resize(m.ambient_dim(), static_cast<Eigen::Index>(center_idx.size()));
  for (size_t k = 0; k < center_idx.size(); ++k)
    net.centers.col(static_cast<Eigen::Index>(k)) = probes.col(center_idx[k]);
  net.covering_radius = min_dist.maxCoeff();

  if (net.covering_radius > delta * (1.0 + 1e-12))
    throw CertificationError(
        "separated_net: probe set too sparse to certify maximality "
        "(covering radius " +
        std::to_string(net.covering_radius) + " > delta)");

  // Strict pairwise separation.
  const Eigen::Index K = net.centers.cols();
  for (Eigen::Index i = 0; i < K; ++i) {
    if (m.geodesic_from_chord(0.0).has_value()) {
      const Vector d2 =
          (net.centers.rightCols(K - i - 1).colwise() - net.centers.col(i))
              .colwise()
              .norm()
              .transpose();
      for (Eigen::Index j = 0; j < d2.size(); ++j) {
        if (*m.geodesic_from_chord(d2[j]) <= delta * (1.0 - 1e-12))
          throw CertificationError("separated_net: pairwise separation violated");
      }
    } else {
      for (Eigen::Index j = i + 1; j < K; ++j) {
        if (m.geodesic_dist(net.centers.col(i), net.centers.col(j)) <= delta * (1.0 - 1e-12))
          throw CertificationError("separated_net: pairwise separation violated");
      }
    }
  }

  // Lemma-style cardinality certificate where the bound applies.
  if (delta < 0.5 * m.global_reach()) {
    const double bound = packing_bound(m, delta);
    if (static_cast<double>(K) > bound)
      throw CertificationError("separated_net: center count exceeds the packing bound");
  }
  return net;
}

double packing_bound(const Manifold& m, double delta) {
  if (!(delta > 0.0 && delta <= 0.5 * m.global_reach()))
    throw std::invalid_argument("packing_bound: delta must lie in (0, reach/2]");
  const double d = m.intrinsic_dim();
  return std::pow(3.0, d) * m.volume() * std::pow(d, d / 2.0) / std::pow(delta, d);
}

}  // namespace reluforge
