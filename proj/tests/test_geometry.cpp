#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "reluforge/geometry.hpp"

using namespace reluforge;

namespace {
constexpr double kPi = 3.14159265358979323846;

Vector vec3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}
}  // namespace

TEST_CASE("circle projection is radial") {
  Manifold m = Manifold::circle(1.0, 3, /*embed_seed=*/0);
  SUBCASE("outside point lands radially") {
    const Vector p = m.project(vec3(2.0, 0.0, 0.0));
    CHECK((p - vec3(1.0, 0.0, 0.0)).norm() <= 1e-12);
  }
  SUBCASE("on-manifold points are fixed") {
    const Vector v = vec3(std::cos(0.7), std::sin(0.7), 0.0);
    CHECK((m.project(v) - v).norm() <= 1e-12);
  }
  SUBCASE("off-plane points project through the plane") {
    const Vector p = m.project(vec3(2.0, 0.0, 0.5));
    CHECK((p - vec3(1.0, 0.0, 0.0)).norm() <= 1e-12);
  }
  SUBCASE("axis points are ambiguous") {
    CHECK_THROWS_AS(m.project(vec3(0.0, 0.0, 0.3)), AmbiguityError);
  }
}

TEST_CASE("sphere projection is radial") {
  Manifold m = Manifold::sphere(1.0, 5, /*embed_seed=*/0);
  Vector x = Vector::Zero(5);
  x[2] = 0.5;
  const Vector p = m.project(x);
  Vector expect = Vector::Zero(5);
  expect[2] = 1.0;
  CHECK((p - expect).norm() <= 1e-12);
  CHECK_THROWS_AS(m.project(Vector::Zero(5)), AmbiguityError);
}

TEST_CASE("tangent bases are orthonormal and tangent") {
  std::mt19937_64 rng(3);
  std::vector<Manifold> catalog;
  catalog.push_back(Manifold::circle(1.0, 3, 7));
  catalog.push_back(Manifold::sphere(1.0, 5, 8));
  catalog.push_back(Manifold::torus(3.0, 1.0, 4, 9));
  catalog.push_back(Manifold::swiss_roll(0.08, 6.0, 15.0, 1.0, 3, 0));
  Vector extent(2);
  extent << 1.0, 0.5;
  catalog.push_back(Manifold::affine_subspace(2, 5, extent, 11));

  for (const Manifold& m : catalog) {
    const TubeSample s = m.tube_sample(0.0, 100, 17);
    for (int i = 0; i < 100; ++i) {
      const Vector v = s.feet.col(i);
      const Matrix t = m.tangent_basis(v);
      CHECK((t.transpose() * t - Matrix::Identity(m.intrinsic_dim(), m.intrinsic_dim()))
                .cwiseAbs()
                .maxCoeff() <= 1e-10);
      const Matrix n = m.normal_basis(v);
      CHECK((n.transpose() * t).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }

  SUBCASE("circle tangent at (1,0,0) spans (0,1,0)") {
    Manifold m = Manifold::circle(1.0, 3, 0);
    const Matrix t = m.tangent_basis(vec3(1.0, 0.0, 0.0));
    CHECK(std::abs(std::abs(t(1, 0)) - 1.0) <= 1e-12);
    CHECK(std::abs(t(0, 0)) <= 1e-12);
    CHECK(std::abs(t(2, 0)) <= 1e-12);
  }
  SUBCASE("sphere tangents at the north pole avoid the pole direction") {
    Manifold m = Manifold::sphere(1.0, 3, 0);
    const Matrix t = m.tangent_basis(vec3(0.0, 0.0, 1.0));
    CHECK(t.row(2).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("off-manifold points are rejected") {
    Manifold m = Manifold::circle(1.0, 3, 0);
    CHECK_THROWS_AS(m.tangent_basis(vec3(1.5, 0.0, 0.0)), std::invalid_argument);
  }
}

TEST_CASE("geodesic distances match the analytic catalog") {
  SUBCASE("circle quarter arc") {
    Manifold m = Manifold::circle(1.0, 3, 0);
    const double d = m.geodesic_dist(vec3(1, 0, 0), vec3(0, 1, 0));
    CHECK(d == doctest::Approx(kPi / 2).epsilon(1e-12));
    CHECK(m.geodesic_dist(vec3(1, 0, 0), vec3(1, 0, 0)) == 0.0);
  }
  SUBCASE("sphere antipodes at radius 2") {
    Manifold m = Manifold::sphere(2.0, 3, 0);
    const double d = m.geodesic_dist(vec3(0, 0, 2), vec3(0, 0, -2));
    CHECK(d == doctest::Approx(2 * kPi).epsilon(1e-12));
  }
  SUBCASE("swiss roll uses flat-strip coordinates") {
    Manifold m = Manifold::swiss_roll(0.1, 6.0, 12.0, 1.0, 3, 0);
    // Two points at the same angle, different heights: distance is the gap.
    const double th = 8.0;
    const Vector a = vec3(0.1 * th * std::cos(th), 0.1 * th * std::sin(th), 0.2);
    const Vector b = vec3(0.1 * th * std::cos(th), 0.1 * th * std::sin(th), 0.9);
    CHECK(m.geodesic_dist(a, b) == doctest::Approx(0.7).epsilon(1e-9));
  }
  SUBCASE("torus grid approximation is within about 1 percent") {
    Manifold m = Manifold::torus(3.0, 1.0, 3, 0);
    // Pure minor-circle arc: analytic length r * angle.
    const Vector a = vec3(4.0, 0.0, 0.0);             // phi = 0
    const Vector b = vec3(3.0, 0.0, 1.0);             // phi = pi/2
    const double approx = m.geodesic_dist(a, b);
    CHECK(approx == doctest::Approx(kPi / 2).epsilon(0.02));
  }
}

TEST_CASE("local reach matches the analytic formulas") {
  CHECK(Manifold::circle(1.0, 3, 0).global_reach() == 1.0);
  CHECK(Manifold::sphere(0.25, 3, 0).global_reach() == 0.25);
  CHECK(Manifold::torus(3.0, 1.0, 3, 0).global_reach() == 1.0);

  SUBCASE("torus reach via dense medial sampling oracle") {
    Manifold m = Manifold::torus(3.0, 1.0, 3, 0);
    // Medial set: the symmetry axis and the center ring. Sample surface
    // points and compute min distance to both analytically sampled sets.
    const TubeSample s = m.tube_sample(0.0, 200, 5);
    double worst = 1e18;
    for (int i = 0; i < 200; ++i) {
      const Vector v = s.feet.col(i);
      const double rho = std::hypot(v[0], v[1]);
      const double to_axis = rho;
      double to_ring = 1e18;
      for (int k = 0; k < 720; ++k) {
        const double th = 2 * kPi * k / 720;
        to_ring = std::min(to_ring, (v - vec3(3 * std::cos(th), 3 * std::sin(th), 0)).norm());
      }
      worst = std::min(worst, std::min(to_axis, to_ring));
      // The ring oracle is discretized at 720 points; its chord error is
      // a few 1e-5 at this radius.
      CHECK(m.local_reach(v) == doctest::Approx(std::min(to_axis, to_ring)).epsilon(2e-4));
    }
    CHECK(worst == doctest::Approx(1.0).epsilon(1e-3));
  }
  SUBCASE("reach is 1-Lipschitz on the swiss roll") {
    Manifold m = Manifold::swiss_roll(0.08, 6.0, 15.0, 1.0, 3, 0);
    const TubeSample s = m.tube_sample(0.0, 300, 9);
    for (int i = 0; i + 1 < 300; i += 2) {
      const Vector v = s.feet.col(i), w = s.feet.col(i + 1);
      CHECK(std::abs(m.local_reach(v) - m.local_reach(w)) <=
            (v - w).norm() + 1e-9);
    }
  }
}

TEST_CASE("separated_net certifies separation and covering") {
  SUBCASE("unit circle at delta=1 yields exactly 6 centers") {
    Manifold m = Manifold::circle(1.0, 3, 13);
    const SeparatedNet net = separated_net(m, 1.0);
    // Brute-force packing oracle: the largest k with pairwise arc > 1 on a
    // circumference of 2 pi satisfies k * 1 < 2 pi, so k = 6.
    int oracle = 0;
    for (int k = 1; k < 20; ++k)
      if (2 * kPi / k > 1.0) oracle = k;
    CHECK(oracle == 6);
    CHECK(net.centers.cols() == 6);
    CHECK(net.covering_radius <= 1.0);
  }
  SUBCASE("delta above the diameter leaves one center") {
    Manifold m = Manifold::circle(1.0, 3, 13);
    const SeparatedNet net = separated_net(m, 10.0);
    CHECK(net.centers.cols() == 1);
  }
  SUBCASE("count stays below the packing bound") {
    Manifold m = Manifold::circle(1.0, 3, 13);
    const double delta = 0.3;
    const SeparatedNet net = separated_net(m, delta);
    CHECK(static_cast<double>(net.centers.cols()) <= packing_bound(m, delta));
    // Pairwise separation strict.
    for (Eigen::Index i = 0; i < net.centers.cols(); ++i)
      for (Eigen::Index j = i + 1; j < net.centers.cols(); ++j)
        CHECK(m.geodesic_dist(net.centers.col(i), net.centers.col(j)) > delta * (1 - 1e-12));
  }
  SUBCASE("sphere nets certify as well") {
    Manifold m = Manifold::sphere(1.0, 5, 21);
    const SeparatedNet net = separated_net(m, 0.5);
    CHECK(net.covering_radius <= 0.5);
    CHECK(static_cast<double>(net.centers.cols()) <= packing_bound(m, 0.49));
  }
}

TEST_CASE("packing_bound evaluates the closed form") {
  Manifold circle = Manifold::circle(1.0, 3, 0);
  CHECK(packing_bound(circle, 0.5) == doctest::Approx(3.0 * 2 * kPi / 0.5).epsilon(1e-12));
  // Monotone: the bound shrinks as delta grows toward reach/2.
  CHECK(packing_bound(circle, 0.49) > packing_bound(circle, 0.499));
  Manifold sphere = Manifold::sphere(1.0, 4, 0);
  CHECK(packing_bound(sphere, 0.25) ==
        doctest::Approx(9.0 * 4 * kPi * 2.0 / (0.25 * 0.25)).epsilon(1e-12));
  CHECK_THROWS_AS(packing_bound(circle, 0.6), std::invalid_argument);
}

TEST_CASE("tube samples stay inside the tube and project back") {
  Manifold m = Manifold::circle(0.2, 3, 5, 0.5 * Vector::Ones(3));

  SUBCASE("q=0 lands on the manifold") {
    const TubeSample s = m.tube_sample(0.0, 200, 3);
    for (int i = 0; i < 200; ++i)
      CHECK((s.points.col(i) - s.feet.col(i)).norm() == 0.0);
  }
  SUBCASE("projection recovers the generating foot at q=0.5") {
    const TubeSample s = m.tube_sample(0.5, 1000, 4);
    for (int i = 0; i < 1000; ++i) {
      CHECK((m.project(s.points.col(i)) - s.feet.col(i)).norm() <= 1e-8);
      const double offset = (s.points.col(i) - s.feet.col(i)).norm();
      CHECK(offset < 0.5 * m.local_reach(s.feet.col(i)));
    }
  }
}

TEST_CASE("tangent projector perturbation is bounded by geodesic over reach") {
  for (const unsigned seed : {1u, 2u}) {
    Manifold m = (seed == 1u) ? Manifold::circle(1.0, 3, 31)
                              : Manifold::sphere(1.0, 5, 32);
    const double tau = m.global_reach();
    const TubeSample a = m.tube_sample(0.0, 500, seed);
    const TubeSample b = m.tube_sample(0.0, 500, seed + 100);
    for (int i = 0; i < 500; ++i) {
      const Vector v = a.feet.col(i), w = b.feet.col(i);
      const Matrix pv = m.tangent_basis(v) * m.tangent_basis(v).transpose();
      const Matrix pw = m.tangent_basis(w) * m.tangent_basis(w).transpose();
      const double spectral =
          Eigen::JacobiSVD<Matrix>(pv - pw).singularValues()[0];
      CHECK(spectral <= m.geodesic_dist(v, w) / tau + 1e-9);
    }
  }
}

TEST_CASE("tube containment check reflects the embedding") {
  Manifold inside = Manifold::circle(0.2, 3, 5, 0.5 * Vector::Ones(3));
  CHECK(inside.tube_fits_unit_cube(0.5));
  Manifold outside = Manifold::circle(1.0, 3, 5);
  CHECK(!outside.tube_fits_unit_cube(0.5));
}
