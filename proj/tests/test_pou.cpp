#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "reluforge/calculus.hpp"
#include "reluforge/net.hpp"
#include "reluforge/pou.hpp"
#include "reluforge/primitives.hpp"

using namespace reluforge;

namespace {

constexpr double kPi = 3.14159265358979323846;

Manifold small_circle() {
  return Manifold::circle(0.2, 3, /*embed_seed=*/5, 0.5 * Vector::Ones(3));
}

// Coarse partition spec for fast unit runs; the acceptance suite exercises
// the proof-constant regime.
PouSpec coarse_spec(double q, double delta, double sep_c) {
  return make_pou_spec(small_circle(), q, delta, sep_c);
}

double circle_angle(const Manifold& m, const Vector& ambient) {
  const Vector c = m.canonical_of(ambient);
  return std::atan2(c[1], c[0]);
}

}  // namespace

TEST_CASE("bandwidths follow the closed forms") {
  auto [p0, h0] = bandwidths(0.0);
  CHECK(p0 == 0.5);
  CHECK(h0 == 6.0);
  auto [p5, h5] = bandwidths(0.5);
  CHECK(p5 == 0.75);
  CHECK(h5 == doctest::Approx(18.0).epsilon(1e-12));
  CHECK(bandwidths(0.99).second > bandwidths(0.9).second);
  CHECK_THROWS_AS(bandwidths(1.0), std::invalid_argument);
}

TEST_CASE("make_pou_spec enforces the separation regime") {
  Manifold m = small_circle();
  // Default constant 1/288: delta must stay below (1-q)^2 tau / 288.
  CHECK_THROWS_AS(make_pou_spec(m, 0.3, 1e-3), SpecViolationError);
  PouSpec spec = make_pou_spec(m, 0.3, 2e-3, 1.0 / 24.0);
  CHECK(spec.p == doctest::Approx(0.65));
  CHECK(spec.h == doctest::Approx(6.0 / (1.0 - 0.3 / 0.65)).epsilon(1e-12));
  CHECK(spec.center_count() > 10);
  CHECK(spec.reaches.minCoeff() == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("eta_reference is a localized partition of unity") {
  PouSpec spec = coarse_spec(0.3, 8e-3, 1.0 / 6.0);
  SUBCASE("each center carries full weight at itself") {
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(10, spec.center_count()); ++i) {
      const EtaReference ref = eta_reference(spec, spec.net.centers.col(i));
      CHECK(ref.eta_tilde[i] == 1.0);
    }
  }
  SUBCASE("eta sums to one over tube samples") {
    const TubeSample s = spec.manifold.tube_sample(0.3, 500, 11);
    for (int k = 0; k < 500; ++k) {
      const EtaReference ref = eta_reference(spec, s.points.col(k));
      CHECK(std::abs(ref.eta.sum() - 1.0) <= 1e-12);
    }
  }
  SUBCASE("the mass lower bound (1-q)/8 holds on 1000 samples") {
    const TubeSample s = spec.manifold.tube_sample(0.3, 1000, 13);
    double lo = 1e18;
    for (int k = 0; k < 1000; ++k)
      lo = std::min(lo, eta_reference(spec, s.points.col(k)).eta_tilde.sum());
    CHECK(lo >= (1.0 - 0.3) / 8.0);
  }
}

TEST_CASE("pou_check passes on a valid spec") {
  PouSpec spec = coarse_spec(0.3, 4e-3, 1.0 / 12.0);
  const PropertyResult res = pou_check(spec, 1000, 17);
  CHECK(res.pass);
  CHECK(res.violations == 0);
  CHECK(res.worst_margin >= 0.0);
}

TEST_CASE("eta_net approximates the reference in l1") {
  const double eps = 0.05;
  PouSpec spec = coarse_spec(0.3, 8e-3, 1.0 / 6.0);
  EtaBuildInfo info;
  ReluNetwork net = eta_net(spec, eps, &info);
  CHECK(validate(net).empty());
  CHECK(info.measured_l1_error <= eps);
  CHECK(info.mass_lo >= (1.0 - 0.3) / 8.0);

  const TubeSample s = spec.manifold.tube_sample(0.3, 400, 23);
  const Matrix out = net.evaluate_batch(s.points);
  double worst_l1 = 0.0, worst_sum = 0.0;
  for (int k = 0; k < 400; ++k) {
    const EtaReference ref = eta_reference(spec, s.points.col(k));
    worst_l1 = std::max(worst_l1, (out.col(k) - ref.eta).cwiseAbs().sum());
    worst_sum = std::max(worst_sum, std::abs(out.col(k).sum() - 1.0));
  }
  CHECK(worst_l1 <= eps);
  CHECK(worst_sum <= eps);
}

TEST_CASE("eta_net rejects manifolds outside the unit cube") {
  Manifold big = Manifold::circle(1.0, 3, 5);
  PouSpec spec = make_pou_spec(big, 0.0, 0.02, 1.0 / 24.0);
  CHECK_THROWS_AS(eta_net(spec, 0.1), SpecViolationError);
}

TEST_CASE("model1_net renders g through the partition") {
  const double q = 0.3, delta = 4e-3, eps = 0.05;
  PouSpec spec = coarse_spec(q, delta, 1.0 / 12.0);
  const Eigen::Index K = spec.center_count();

  SUBCASE("constant g stays within c * eps") {
    Model1Spec ms{spec, Vector::Constant(K, 0.4), 1.0, 0.0};
    ReluNetwork net = model1_net(ms, eps);
    const TubeSample s = spec.manifold.tube_sample(q, 300, 29);
    for (int k = 0; k < 300; ++k)
      CHECK(std::abs(net.evaluate(s.points.col(k))[0] - 0.4) <= 0.4 * eps);
  }
  SUBCASE("Lipschitz g satisfies the error chain") {
    Vector g_values(K);
    for (Eigen::Index i = 0; i < K; ++i)
      g_values[i] = 0.5 * (1.0 + std::cos(circle_angle(spec.manifold,
                                                       spec.net.centers.col(i))));
    Model1Spec ms{spec, g_values, 1.0, 2.5};
    ReluNetwork net = model1_net(ms, eps);
    // Error chain: L * (72 delta / (1-q)^2)^alpha + eps.
    const double chain =
        2.5 * (72.0 * delta / ((1 - q) * (1 - q))) + eps;
    const TubeSample s = spec.manifold.tube_sample(q, 300, 31);
    for (int k = 0; k < 300; ++k) {
      const double theta = circle_angle(spec.manifold, spec.manifold.project(s.points.col(k)));
      const double truth = 0.5 * (1.0 + std::cos(theta));
      CHECK(std::abs(net.evaluate(s.points.col(k))[0] - truth) <= chain);
    }
  }
  SUBCASE("g outside [0,1] is rejected") {
    Model1Spec ms{spec, Vector::Constant(K, 1.4), 1.0, 0.0};
    CHECK_THROWS_AS(model1_net(ms, eps), SpecViolationError);
  }
}

TEST_CASE("projection_net tracks the projection on the tube") {
  Manifold m = small_circle();
  const double q = 0.0, eps = 0.2, delta = 4e-3;
  ReluNetwork net = projection_net(m, q, eps, delta, 1.0 / 12.0);
  const double chain = 72.0 * delta / ((1 - q) * (1 - q)) + eps;
  const TubeSample s = m.tube_sample(q, 300, 37);
  for (int k = 0; k < 300; ++k) {
    const Vector want = m.project(s.points.col(k));
    const Vector got = net.evaluate(s.points.col(k));
    CHECK((got - want).cwiseAbs().maxCoeff() <= chain);
    // The output also lies near the manifold.
    CHECK((m.project(got) - got).norm() <= chain);
  }
}

TEST_CASE("classifier_wrap thresholds far from the boundary") {
  // Probability net rendering f(t) = t exactly on scalars.
  Matrix one(1, 1);
  one << 1.0;
  ReluNetwork prob = affine_net(one, Vector::Zero(1));
  const double eps = 0.02;
  ReluNetwork wrapped = classifier_wrap(prob, eps);

  auto eval = [&](double t) {
    Vector x(1);
    x << t;
    return wrapped.evaluate(x)[0];
  };
  CHECK(eval(0.9) == 1.0);
  CHECK(eval(0.1) == -1.0);
  CHECK(eval(0.5) == 0.0);
  // Output range and the Lemma-level dimensions.
  for (double t = 0.0; t <= 1.0; t += 0.01) {
    CHECK(eval(t) <= 1.0);
    CHECK(eval(t) >= -1.0);
  }
  CHECK(metrics(wrapped).depth == metrics(prob).depth + 2);
  CHECK(metrics(wrapped).nonzero_params <= 2 * (metrics(prob).nonzero_params + 7));
  CHECK_THROWS_AS(classifier_wrap(identity_net(2), eps), std::invalid_argument);
}
