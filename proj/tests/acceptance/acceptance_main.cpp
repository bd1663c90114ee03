// Acceptance suite: one self-contained check per criterion, each printing a
// single PASS/FAIL line. Run with --criterion N for one criterion, with no
// arguments for all, or with --calibrate to print measured values for the
// frozen-constant registry.

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "reluforge/calculus.hpp"
#include "reluforge/distance.hpp"
#include "reluforge/geometry.hpp"
#include "reluforge/net.hpp"
#include "reluforge/pou.hpp"
#include "reluforge/primitives.hpp"
#include "reluforge/rates.hpp"
#include "reluforge/verify.hpp"

using namespace reluforge;

namespace {

constexpr double kPi = 3.14159265358979323846;
bool g_calibrate = false;
int g_jobs = 2;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [FAILED: " << what << "]";
    }
  }
};

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const auto start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

ConstantsRegistry constants() {
  return ConstantsRegistry::load_file(std::string(RELUFORGE_TEST_DATA_DIR) +
                                      "/frozen_constants.json");
}

Vector scalar(double t) {
  Vector v(1);
  v << t;
  return v;
}

double grid_sup(const ReluNetwork& net, const std::function<double(double)>& ref,
                double lo, double hi, int n) {
  double worst = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = lo + (hi - lo) * i / n;
    worst = std::max(worst, std::abs(net.evaluate(scalar(t))[0] - ref(t)));
  }
  return worst;
}

Matrix random_cloud(int dim, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  Matrix c(dim, count);
  for (int j = 0; j < count; ++j)
    for (int i = 0; i < dim; ++i) c(i, j) = u(rng);
  return c;
}

Matrix curve_cloud(int dim, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  const double phase = u(rng);
  Matrix c(dim, count);
  for (int j = 0; j < count; ++j) {
    const double t = double(j) / (count - 1);
    for (int i = 0; i < dim; ++i)
      c(i, j) = 0.5 + 0.35 * std::sin(2.0 * t + phase + 1.7 * i);
  }
  return c;
}

// --- criterion 1: exact primitives ---------------------------------------

Outcome criterion1() {
  Outcome out;
  const double t0 = now_seconds();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const double tol = 1e-12;

  ReluNetwork absn = abs_net(1.0);
  ReluNetwork l1 = l1_norm_net(5);
  ReluNetwork sgn = sign_net(0.25);
  ReluNetwork cl = clamp_net();
  Matrix A(3, 4);
  Vector b(3);
  for (int i = 0; i < 3; ++i) {
    b[i] = u(rng);
    for (int j = 0; j < 4; ++j) A(i, j) = u(rng);
  }
  ReluNetwork aff = affine_net(A, b);
  ReluNetwork idn = identity_net(3);
  std::vector<ReluNetwork> mins;
  for (const int k : {2, 3, 7, 16}) mins.push_back(min_net(k));

  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const double t = u(rng);
    worst = std::max(worst, std::abs(absn.evaluate(scalar(t))[0] - std::abs(t)));
    worst = std::max(worst, std::abs(cl.evaluate(scalar(t))[0] - std::min(1.0, t)));
    if (std::abs(t) > 0.25)
      worst = std::max(worst,
                       std::abs(sgn.evaluate(scalar(t))[0] - (t > 0 ? 1.0 : -1.0)));
    Vector x5(5);
    for (int i = 0; i < 5; ++i) x5[i] = u(rng);
    worst = std::max(worst, std::abs(l1.evaluate(x5)[0] - x5.cwiseAbs().sum()));
    Vector x4(4);
    for (int i = 0; i < 4; ++i) x4[i] = u(rng);
    worst = std::max(worst, (aff.evaluate(x4) - (A * x4 + b)).cwiseAbs().maxCoeff());
    Vector x3(3);
    for (int i = 0; i < 3; ++i) x3[i] = u(rng);
    worst = std::max(worst, (idn.evaluate(x3) - x3).cwiseAbs().maxCoeff());
    const int ks[4] = {2, 3, 7, 16};
    for (int m = 0; m < 4; ++m) {
      Vector xk(ks[m]);
      for (int i = 0; i < ks[m]; ++i) xk[i] = u(rng);
      worst = std::max(worst, std::abs(mins[size_t(m)].evaluate(xk)[0] - xk.minCoeff()));
    }
  }
  const double elapsed = now_seconds() - t0;
  out.detail << "max_dev=" << worst << " runtime=" << elapsed << "s";
  out.require(worst <= tol, "exact primitive deviation above 1e-12");
  out.require(elapsed < 10.0, "runtime above 10s");
  return out;
}

// --- criterion 2: eps primitives ------------------------------------------

Outcome criterion2() {
  Outcome out;
  const double t0 = now_seconds();

  for (const double eps : {1e-2, 1e-3, 1e-4}) {
    const double err =
        grid_sup(square_net(eps), [](double t) { return t * t; }, 0.0, 1.0, 100000);
    out.detail << " square(" << eps << ")=" << err;
    out.require(err <= eps, "square sup error");
  }

  for (const int D : {3, 10})
    for (const double R : {1.0, 2.0}) {
      const double eps = 1e-3;
      ReluNetwork n = sq_norm_net(D, R, eps);
      auto ref = [](const Vector& x) { return x.squaredNorm(); };
      const double side = R / std::sqrt(double(D));
      const SupError s = sup_error(
          n, std::function<double(const Vector&)>(ref),
          SamplerSpec::box_domain(-side * Vector::Ones(D), side * Vector::Ones(D)),
          100000, 2, ErrorNorm::linf, g_jobs);
      out.detail << " sqnorm(D=" << D << ",R=" << R << ")=" << s.estimate;
      out.require(s.estimate <= eps, "sq_norm sup error");
    }

  {
    const double eps = 1e-3;
    ReluNetwork n = mult_net(1, 2.0, eps);
    auto ref = [](const Vector& x) { return x[0] * x[1]; };
    const SupError s = sup_error(
        n, std::function<double(const Vector&)>(ref),
        SamplerSpec::box_domain(-2.0 * Vector::Ones(2), 2.0 * Vector::Ones(2)),
        100000, 3, ErrorNorm::linf, g_jobs);
    out.detail << " mult=" << s.estimate;
    out.require(s.estimate <= eps, "mult sup error");
  }

  for (const double a : {2.0, 4.0}) {
    const double eps = 1e-2;
    const double err = grid_sup(reciprocal_net(a, eps),
                                [](double t) { return 1.0 / t; }, 1.0 / a, a, 100000);
    out.detail << " recip(a=" << a << ")=" << err;
    out.require(err <= eps, "reciprocal sup error");
  }

  {
    // l1 normalization on the annulus 1/4 <= |x|_1 <= 4, entrywise budget.
    const double eps = 1e-2, a = 4.0;
    ReluNetwork n = l1_normalize_net(5, a, eps);
    HaltonSequence seq(6, 9);
    double worst = 0.0;
    for (int k = 0; k < 100000; ++k) {
      const Vector u = seq.next();
      Vector x(5);
      for (int i = 0; i < 5; ++i) x[i] = 2.0 * u[i] - 1.0;
      const double target = 1.0 / a + (a - 1.0 / a) * u[5];
      x *= target / std::max(x.cwiseAbs().sum(), 1e-9);
      const Vector got = n.evaluate(x);
      worst = std::max(worst, (got - x / x.cwiseAbs().sum()).cwiseAbs().maxCoeff());
    }
    out.detail << " l1norm=" << worst;
    out.require(worst <= eps, "l1 normalization sup error");
  }

  {
    const double eps = 0.05;
    auto root = [](double t) { return std::sqrt(t); };
    const double err = grid_sup(holder_net(root, 0.5, 1.0, eps), root, 0.0, 1.0, 100000);
    out.detail << " holder_sqrt=" << err;
    out.require(err <= eps, "holder sup error");
  }

  const double elapsed = now_seconds() - t0;
  out.detail << " runtime=" << elapsed << "s";
  out.require(elapsed < 120.0, "runtime above 2 minutes");
  return out;
}

// --- criterion 3: dimension audits ----------------------------------------

Outcome criterion3() {
  Outcome out;
  const auto reg = constants();

  for (const int k : {2, 3, 7, 16}) {
    const auto m = metrics(min_net(k));
    const int log2k = static_cast<int>(std::ceil(std::log2(double(k))));
    out.require(m.nonzero_params <= 11ll * k * log2k, "min params bound");
    out.require(m.depth <= 2 * log2k, "min depth bound");
  }
  {
    const double eps = 1e-3;
    const auto m = metrics(sign_net(eps));
    out.require(m.depth == 2 && m.width == 2 && m.nonzero_params == 7,
                "sign exact dimensions");
    out.require(std::abs(m.weight_bound - 1.0 / eps) <= 1e-9, "sign weight bound");
  }

  double square_ratio = 0.0;
  for (double eps = 1e-1; eps >= 1e-6; eps /= 10.0) {
    const auto m = metrics(square_net(eps));
    square_ratio = std::max(square_ratio, m.depth / std::log2(1.0 / eps));
  }
  double recip_ratio = 0.0;
  for (const double a : {2.0, 4.0})
    for (const double eps : {1e-1, 1e-2, 1e-3}) {
      const auto m = metrics(reciprocal_net(a, eps));
      const double formula = a * a * std::pow(std::log(a / eps), 2.0);
      recip_ratio = std::max(recip_ratio, m.depth / formula);
    }
  out.detail << "square_depth_ratio=" << square_ratio
             << " reciprocal_depth_ratio=" << recip_ratio;
  if (g_calibrate) {
    std::cout << "  \"square_depth_c\": " << 2.0 * square_ratio << ",\n"
              << "  \"reciprocal_depth_c\": " << 2.0 * recip_ratio << ",\n";
    return out;
  }
  out.require(square_ratio <= reg.at("square_depth_c"), "square depth log growth");
  out.require(recip_ratio <= reg.at("reciprocal_depth_c"), "reciprocal depth growth");
  return out;
}

// --- criterion 4: geometry suite -------------------------------------------

Outcome criterion4() {
  Outcome out;
  Manifold circle = Manifold::circle(1.0, 3, 101);
  Manifold sphere = Manifold::sphere(1.0, 5, 102);

  for (const Manifold* m : {&circle, &sphere}) {
    for (const double q : {0.0, 0.3, 0.5, 0.8}) {
      const PropertyResult r = lipschitz_check(*m, q, 10000, 41);
      out.require(r.pass, "lipschitz ratio at q=" + std::to_string(q));
    }
    const PropertyResult eq = metric_equivalence_check(*m, 0.3, 0.65, 10000, 43);
    out.detail << " metric_eq_margin=" << eq.worst_margin;
    out.require(eq.pass && eq.violations == 0, "metric equivalence violations");
  }

  {
    const SeparatedNet net = separated_net(circle, 1.0);
    out.detail << " circle_delta1_centers=" << net.centers.cols();
    out.require(net.centers.cols() == 6, "circle delta=1 center count");
  }
  for (const double delta : {0.3, 0.1}) {
    const SeparatedNet net = separated_net(circle, delta);
    out.require(static_cast<double>(net.centers.cols()) <= packing_bound(circle, delta),
                "circle packing bound");
  }
  {
    const SeparatedNet net = separated_net(sphere, 0.4);
    out.require(static_cast<double>(net.centers.cols()) <= packing_bound(sphere, 0.4),
                "sphere packing bound");
  }
  return out;
}

// --- criterion 5: partition of unity ---------------------------------------

Outcome criterion5() {
  Outcome out;
  Manifold m = Manifold::circle(0.2, 3, 105, 0.5 * Vector::Ones(3), 0.6);
  const double q = 0.3;
  const double tau = m.global_reach();
  const double delta = tau * (1.0 - q) * (1.0 - q) / 300.0;
  PouSpec spec = make_pou_spec(m, q, delta);
  out.detail << "centers=" << spec.center_count();

  const PropertyResult pou = pou_check(spec, 10000, 51);
  out.detail << " " << pou.detail;
  out.require(pou.pass, "pou sum/localization/mass checks");

  // Mass upper bound: finite, frozen constant.
  const auto reg = constants();
  double mass_hi = 0.0;
  const TubeSample s = m.tube_sample(q, 2000, 53);
  for (int i = 0; i < 2000; ++i)
    mass_hi = std::max(mass_hi, eta_reference(spec, s.points.col(i)).eta_tilde.sum());
  out.detail << " mass_hi=" << mass_hi;
  if (g_calibrate)
    std::cout << "  \"pou_mass_upper\": " << 2.0 * mass_hi << ",\n";
  else
    out.require(mass_hi <= reg.at("pou_mass_upper"), "mass upper bound");

  for (const double eps : {0.1, 0.03}) {
    EtaBuildInfo info;
    ReluNetwork net = eta_net(spec, eps, &info);
    const TubeSample probe = m.tube_sample(q, 1500, 55);
    const Matrix got = net.evaluate_batch(probe.points);
    double worst = 0.0;
    for (int i = 0; i < 1500; ++i) {
      const EtaReference ref = eta_reference(spec, probe.points.col(i));
      worst = std::max(worst, (got.col(i) - ref.eta).cwiseAbs().sum());
    }
    out.detail << " eta_l1(" << eps << ")=" << worst;
    out.require(worst <= eps, "eta net l1 error at eps=" + std::to_string(eps));
  }
  return out;
}

// --- criterion 6: theorems 3.1 and 3.2 -------------------------------------

Outcome criterion6() {
  Outcome out;
  const double t0 = now_seconds();
  const auto reg = constants();
  Manifold m = Manifold::circle(0.2, 3, 106, 0.5 * Vector::Ones(3), 0.6);
  const double q = 0.3;
  const double sep_c = 1.0 / 48.0;
  const double tau = m.global_reach();
  const double omq = (1.0 - q) * (1.0 - q);

  // Triangle-wave target: genuinely Lipschitz with kinks, so the sampled
  // error scales first order in delta rather than through the second-order
  // cancellation a smooth g would enjoy.
  auto g_fn = [&m](const Vector& x) {
    const Vector c = m.canonical_of(m.project(x));
    return std::abs(std::atan2(c[1], c[0])) / kPi;
  };
  const double g_lip = 1.0 / (kPi * 0.2);  // |d/d(arc)| at radius 0.2

  // Kink-shell points near theta = 0 and pi, where the maxima live.
  auto kink_points = [&m](double delta) {
    std::vector<double> thetas;
    for (const double base : {0.0, kPi})
      for (const double off : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
        thetas.push_back(base + off * delta / 0.2);
        thetas.push_back(base - off * delta / 0.2);
      }
    Matrix pts(3, static_cast<Eigen::Index>(thetas.size()));
    for (size_t i = 0; i < thetas.size(); ++i) {
      Vector c(1);
      c << thetas[i] / (2.0 * kPi);
      pts.col(static_cast<Eigen::Index>(i)) =
          m.surface_from_unit(c.cwiseAbs().unaryExpr(
              [](double t) { return t - std::floor(t); }));
    }
    return pts;
  };

  const double delta_max = 0.9 * sep_c * omq * tau;
  std::vector<std::pair<double, double>> fit_pairs;
  double worst_ratio = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double delta = delta_max / std::pow(1.5, i);
    const double eps = 0.5 * g_lip * 72.0 * delta / omq;
    PouSpec spec = make_pou_spec(m, q, delta, sep_c);
    const Eigen::Index K = spec.center_count();
    Vector g_values(K);
    for (Eigen::Index k = 0; k < K; ++k) g_values[k] = g_fn(spec.net.centers.col(k));
    Model1Spec ms{spec, g_values, 1.0, g_lip};
    ReluNetwork net = model1_net(ms, eps);
    SamplerSpec sampler = SamplerSpec::tube_domain(m, q);
    sampler.special_points = kink_points(delta);
    const SupError sup =
        sup_error(net, std::function<double(const Vector&)>(g_fn), sampler, 1200, 61,
                  ErrorNorm::linf, g_jobs);
    const auto dm = metrics(net);
    fit_pairs.emplace_back(sup.estimate, static_cast<double>(dm.nonzero_params));
    worst_ratio = std::max(worst_ratio, sup.estimate / eps);
    out.detail << " (K=" << K << ",eps=" << eps << ",err=" << sup.estimate << ")";
  }
  const RateFit fit = rate_fit(fit_pairs);
  out.detail << " slope=" << fit.slope << " err_ratio=" << worst_ratio;
  if (g_calibrate)
    std::cout << "  \"model1_sup_c\": " << 2.0 * worst_ratio << ",\n";
  else
    out.require(worst_ratio <= reg.at("model1_sup_c"), "model1 sup error constant");
  out.require(std::abs(fit.slope + 1.0) <= 0.3, "model1 P-vs-error exponent");

  // Theorem 3.2: projection nets at q in {0, 0.5}, 1e4 tube samples each.
  double worst_proj_ratio = 0.0;
  for (const auto& [pq, peps] : std::vector<std::pair<double, double>>{{0.0, 0.15},
                                                                       {0.5, 0.25}}) {
    const double pomq = (1.0 - pq) * (1.0 - pq);
    const double delta = std::min(peps * pomq / 72.0, 0.9 * sep_c * pomq * tau);
    ReluNetwork net = projection_net(m, pq, peps, delta, sep_c);
    auto proj_ref = [&m](const Vector& x) { return m.project(x); };
    const SupError sup =
        sup_error(net, std::function<Vector(const Vector&)>(proj_ref),
                  SamplerSpec::tube_domain(m, pq), 10000, 63, ErrorNorm::linf, g_jobs);
    worst_proj_ratio = std::max(worst_proj_ratio, sup.estimate / peps);
    out.detail << " proj(q=" << pq << ")=" << sup.estimate;
  }
  if (g_calibrate)
    std::cout << "  \"projection_sup_c\": " << 2.0 * worst_proj_ratio << ",\n";
  else
    out.require(worst_proj_ratio <= reg.at("projection_sup_c"),
                "projection sup error constant");

  const double elapsed = now_seconds() - t0;
  out.detail << " runtime=" << elapsed << "s";
  out.require(elapsed < 300.0, "runtime above 5 minutes");
  return out;
}

// --- criterion 7: theorem 3.3 ----------------------------------------------

Outcome criterion7() {
  Outcome out;
  const double t0 = now_seconds();

  auto run_model2 = [&](const Matrix& cloud, int d, double delta0, double alpha,
                        const std::function<double(double)>& g, double eps_alpha,
                        int samples) {
    DistanceModelSpec spec;
    spec.clouds = {cloud};
    spec.g_list = {g};
    spec.alpha = alpha;
    spec.holder_const = 1.0;
    spec.intrinsic_dim = d;
    spec.delta0 = delta0;
    const double eps = std::pow(eps_alpha, 1.0 / alpha);
    ReluNetwork net = model2_net(spec, eps);
    auto oracle = [&spec, &g](const Vector& x) {
      return g(normdist_reference(spec.clouds[0], x));
    };
    const SupError sup = sup_error(
        net, std::function<double(const Vector&)>(oracle),
        SamplerSpec::unit_cube(static_cast<int>(cloud.rows())), samples, 71,
        ErrorNorm::linf, g_jobs);
    const auto dm = metrics(net);
    out.require(dm.weight_bound <= 1.0 + 1e-12, "model2 weight bound above 1");
    out.require(sup.estimate <= eps_alpha,
                "model2 sup error above eps^alpha=" + std::to_string(eps_alpha));
    return std::make_pair(sup.estimate, static_cast<double>(dm.nonzero_params));
  };

  const Matrix attractors = random_cloud(20, 10, 707);

  // (a) alpha = 1: pinned 1e5-sample check, then the parameter-rate sweep.
  run_model2(attractors, 0, 0.2, 1.0, [](double t) { return t; }, 2e-3, 100000);
  {
    std::vector<std::pair<double, double>> pairs;
    for (const double ea : {1e-4, 5e-5, 2.5e-5, 1.25e-5}) {
      const auto [err, params] =
          run_model2(attractors, 0, 0.2, 1.0, [](double t) { return t; }, ea, 1500);
      (void)err;
      pairs.emplace_back(ea, params);
    }
    const RateFit fit = rate_fit(pairs);
    out.detail << " a1_slope=" << fit.slope;
    out.require(std::abs(fit.slope + 1.0) <= 0.3, "alpha=1 parameter exponent");
  }

  // (a) alpha = 1/2.
  run_model2(attractors, 0, 0.2, 0.5, [](double t) { return std::sqrt(t); }, 0.1,
             100000);
  {
    std::vector<std::pair<double, double>> pairs;
    for (const double ea : {0.02, 0.01414, 0.01, 0.00707}) {
      const auto [err, params] = run_model2(
          attractors, 0, 0.2, 0.5, [](double t) { return std::sqrt(t); }, ea, 1000);
      (void)err;
      pairs.emplace_back(ea, params);
    }
    const RateFit fit = rate_fit(pairs);
    out.detail << " a05_slope=" << fit.slope;
    out.require(std::abs(fit.slope + 2.0) <= 0.3, "alpha=1/2 parameter exponent");
  }

  // (b) d = 1 curve samples.
  {
    const Matrix curve = curve_cloud(10, 3000, 708);
    std::vector<std::pair<double, double>> pairs;
    for (const double ea : {0.05, 0.035, 0.025, 0.018}) {
      const auto [err, params] =
          run_model2(curve, 1, 0.05, 1.0, [](double t) { return t; }, ea, 1500);
      (void)err;
      pairs.emplace_back(ea, params);
    }
    const RateFit fit = rate_fit(pairs);
    out.detail << " curve_slope=" << fit.slope;
    out.require(std::abs(fit.slope + 1.0) <= 0.4, "d=1 parameter exponent");
  }

  const double elapsed = now_seconds() - t0;
  out.detail << " runtime=" << elapsed << "s";
  out.require(elapsed < 300.0, "runtime above 5 minutes");
  return out;
}

// --- criterion 8: rate calculators -----------------------------------------

Outcome criterion8() {
  Outcome out;
  for (const double alpha : {0.25, 0.5, 0.75, 1.0})
    for (const double d : {1.0, 2.0, 3.0}) {
      const Schedule r =
          schedule(ModelFamily::model1, TaskKind::regression, 1e5, alpha, d, 4.0);
      out.require(std::abs(r.risk_exponent - 2.0 * alpha / (2.0 * alpha + d)) <= 1e-12,
                  "model1 regression exponent");
      for (const double beta : {0.5, 1.0, 2.0}) {
        const Schedule c = schedule(ModelFamily::model1, TaskKind::classification, 1e5,
                                    alpha, d, 4.0, beta);
        out.require(std::abs(c.risk_exponent - alpha * (beta + 1.0) /
                                                   (alpha * (beta + 2.0) + d)) <= 1e-12,
                    "model1 classification exponent");
        const Schedule c2 = schedule(ModelFamily::model2, TaskKind::classification, 1e5,
                                     alpha, d, 4.0, beta);
        const double eff = std::max(1.0, alpha * d);
        out.require(std::abs(c2.risk_exponent - alpha * (beta + 1.0) /
                                                    (alpha * (beta + 2.0) + eff)) <= 1e-12,
                    "model2 classification exponent");
      }
      const Schedule r2 =
          schedule(ModelFamily::model2, TaskKind::regression, 1e5, alpha, d, 4.0);
      const double eff = std::max(1.0, alpha * d);
      out.require(std::abs(r2.risk_exponent - 2.0 * alpha / (2.0 * alpha + eff)) <= 1e-12,
                  "model2 regression exponent");
    }

  for (const auto model : {ModelFamily::model1, ModelFamily::model2}) {
    double prev = 1e18;
    for (double n = 1e3; n <= 1e8; n *= 1.3) {
      const Schedule s = schedule(model, TaskKind::regression, n, 0.5, 2.0, 4.0);
      out.require(s.eps_N < prev, "eps_N monotone decreasing");
      prev = s.eps_N;
    }
  }
  return out;
}

// --- criterion 9: covering balance ------------------------------------------

Outcome criterion9() {
  Outcome out;
  const auto reg = constants();
  const double alpha = 1.0, d = 1.0, D = 3.0;
  double worst = 0.0;
  for (const double n : {1e4, 1e6}) {
    const Schedule s = schedule(ModelFamily::model1, TaskKind::regression, n, alpha, d, D);
    const double omega = std::min(1.0, std::pow(s.eps_N, 2.0 * alpha));
    const double cover = covering_bound(s.L_N, s.W_N, s.P_N, s.B_N, omega);
    const double balance = D * std::pow(std::log(D), 3.0) * std::pow(s.eps_N, 2.0 * alpha);
    worst = std::max(worst, cover / n / balance);
    out.detail << " N=" << n << " ratio=" << cover / n / balance;
  }
  if (g_calibrate)
    std::cout << "  \"covering_balance_c\": " << 2.0 * worst << ",\n";
  else
    out.require(worst <= reg.at("covering_balance_c"), "covering balance constant");
  return out;
}

// --- criterion 10: classifier wrapper ----------------------------------------

Outcome criterion10() {
  Outcome out;
  // Probability net rendering f(x) = x_1 exactly over [0,1]^2.
  Matrix pick(1, 2);
  pick << 1.0, 0.0;
  ReluNetwork prob = affine_net(pick, Vector::Zero(1));
  const double eps = 0.01;
  ReluNetwork wrapped = classifier_wrap(prob, eps);

  HaltonSequence seq(2, 15);
  long long checked = 0;
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Vector u = seq.next();
    const double f = u[0];
    const double margin = 2.0 * f - 1.0;
    const double got = wrapped.evaluate(u)[0];
    out.require(got >= -1.0 - 1e-12 && got <= 1.0 + 1e-12, "output range");
    if (std::abs(margin) > 4.0 * eps) {
      ++checked;
      worst = std::max(worst, std::abs(got - (margin > 0 ? 1.0 : -1.0)));
    }
  }
  out.detail << "checked=" << checked << " max_dev=" << worst;
  out.require(checked > 9000, "enough off-boundary samples");
  out.require(worst <= 1e-12, "sign agreement beyond the 4*eps band");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  int which = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
      which = std::atoi(argv[++i]);
    else if (std::strcmp(argv[i], "--calibrate") == 0)
      g_calibrate = true;
    else if (std::strcmp(argv[i], "--jobs") == 0 && i + 1 < argc)
      g_jobs = std::atoi(argv[++i]);
  }

  using Fn = Outcome (*)();
  const Fn criteria[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                         criterion6, criterion7, criterion8, criterion9, criterion10};
  const char* names[] = {
      "exact primitive suite",          "eps primitive suite",
      "dimension audits",               "geometry suite",
      "partition of unity suite",       "model-1 target and projection nets",
      "model-2 distance nets",          "rate calculators",
      "covering/estimation balance",    "classifier wrapper"};

  bool all_pass = true;
  for (int c = 1; c <= 10; ++c) {
    if (which != 0 && which != c) continue;
    try {
      Outcome res = criteria[c - 1]();
      all_pass &= res.pass;
      std::cout << (res.pass ? "[PASS]" : "[FAIL]") << " criterion " << c << ": "
                << names[c - 1] << " (" << res.detail.str() << ")\n";
    } catch (const std::exception& e) {
      all_pass = false;
      std::cout << "[FAIL] criterion " << c << ": " << names[c - 1]
                << " (exception: " << e.what() << ")\n";
    }
  }
  return all_pass ? 0 : 1;
}
