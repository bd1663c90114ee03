#ifndef RELUFORGE_GEOMETRY_HPP
#define RELUFORGE_GEOMETRY_HPP

#include <optional>
#include <stdexcept>
#include <vector>

#include "reluforge/net.hpp"

namespace reluforge {

struct AmbiguityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CertificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ManifoldKind { circle, sphere, torus, swiss_roll, affine_subspace };

/// Points sampled from the tube M(q), each with its generating foot point.
struct TubeSample {
  Matrix points;  // D x n
  Matrix feet;    // D x n, on the manifold
};

/// Analytic manifold catalog entry. Canonical coordinates live in R^{D0}
/// (R^2 circle, R^3 sphere/torus/swiss roll, R^d flat); a rigid embedding
/// x = Q x_can + offset, with Q columnwise orthonormal, places the manifold
/// in the ambient space. All oracles (projection, tangent, geodesic, reach)
/// are exact up to the documented torus geodesic approximation.
class Manifold {
 public:
  Manifold() = default;  // unspecified; use the factories below

  static Manifold circle(double radius, int ambient_dim, unsigned embed_seed,
                         const Vector& center = Vector(), double q_max = 0.9);
  static Manifold sphere(double radius, int ambient_dim, unsigned embed_seed,
                         const Vector& center = Vector(), double q_max = 0.9);
  static Manifold torus(double major, double minor, int ambient_dim, unsigned embed_seed,
                        const Vector& center = Vector(), double q_max = 0.9);
  static Manifold swiss_roll(double pitch, double theta0, double theta1, double height,
                             int ambient_dim, unsigned embed_seed,
                             const Vector& center = Vector(), double q_max = 0.9);
  static Manifold affine_subspace(int intrinsic_dim, int ambient_dim, const Vector& extent,
                                  unsigned embed_seed, const Vector& center = Vector(),
                                  double q_max = 0.9);

  ManifoldKind kind() const { return kind_; }
  int intrinsic_dim() const { return d_; }
  int ambient_dim() const { return D_; }
  double q_max() const { return q_max_; }

  Vector embed(const Vector& canonical) const;
  Vector canonical_of(const Vector& ambient) const;

  /// Unique nearest point on the manifold; throws AmbiguityError near the
  /// medial axis (candidates within 1e-9 of each other in objective).
  Vector project(const Vector& x) const;

  /// D x d columnwise orthonormal tangent basis at v (on-manifold within 1e-10).
  Matrix tangent_basis(const Vector& v) const;

  /// D x (D - d) orthonormal basis of the normal space at v.
  Matrix normal_basis(const Vector& v) const;

  /// Geodesic metric. Analytic except on the torus, where a shortest path
  /// over a 200x200 parameter grid is used (about 1% relative error).
  double geodesic_dist(const Vector& v, const Vector& w) const;

  /// Vectorized geodesic distances from one point to many (D x n) points.
  Vector geodesic_dists_from(const Vector& v, const Matrix& targets) const;

  double local_reach(const Vector& v) const;
  double global_reach() const;
  double volume() const;

  /// Geodesic distance as a monotone function of chordal distance, when the
  /// manifold admits one (circle, sphere, affine); nullopt otherwise.
  std::optional<double> geodesic_from_chord(double chord) const;

  /// Deterministic dense probe set on the manifold (ambient coordinates).
  Matrix probe_points(int n) const;

  /// Area-uniform-ish surface point from unit-cube parameters u in [0,1)^d,
  /// in ambient coordinates. Used to push low-discrepancy grids onto the
  /// manifold.
  Vector surface_from_unit(const Vector& u) const;

  /// x = v + u with v drawn over the manifold and u uniform in the normal
  /// disk of radius just under q * local_reach(v). Reproducible from seed.
  TubeSample tube_sample(double q, int n, unsigned seed) const;

  /// True if the manifold plus its q-tube provably fits inside [0,1]^D.
  bool tube_fits_unit_cube(double q) const;

 private:
  Vector canonical_project(const Vector& c) const;  // within the canonical space
  double swiss_arclength(double theta) const;
  double swiss_theta_from_arclength(double s) const;
  void ensure_torus_grid() const;

  ManifoldKind kind_ = ManifoldKind::circle;
  int d_ = 1;
  int D_ = 2;
  int D0_ = 2;
  double r_ = 1.0;
  double R_ = 0.0;
  double sw_a_ = 0.0, sw_t0_ = 0.0, sw_t1_ = 0.0, sw_h_ = 0.0;
  Vector affine_extent_;
  Matrix Q_;       // D x D0
  Vector offset_;  // D
  double q_max_ = 0.9;

  // Torus geodesic grid (lazy).
  mutable std::vector<Vector> torus_nodes_;
  mutable int torus_grid_n_ = 0;
};

/// Maximal delta-separated net of manifold centers, greedily grown over a
/// dense probe set, with its measured covering radius.
struct SeparatedNet {
  Matrix centers;  // D x K
  double delta = 0.0;
  double covering_radius = 0.0;
};

/// Greedy insertion over probe_density * (expected count) probe points.
/// Certifies strict pairwise separation and covering radius <= delta;
/// throws CertificationError if the probe set cannot certify maximality.
SeparatedNet separated_net(const Manifold& m, double delta, double probe_density = 100.0);

/// Closed-form packing bound 3^d Vol(M) d^{d/2} / delta^d, valid for
/// delta in (0, reach/2).
double packing_bound(const Manifold& m, double delta);

}  // namespace reluforge

#endif
