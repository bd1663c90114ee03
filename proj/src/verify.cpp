#include "reluforge/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace reluforge {

namespace {

constexpr double kPi = 3.14159265358979323846;

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                           41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base, f = inv, x = 0.0;
  while (i > 0) {
    x += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
    i /= static_cast<std::uint64_t>(base);
    f *= inv;
  }
  return x;
}

}  // namespace

HaltonSequence::HaltonSequence(int dim, unsigned seed) : dim_(dim) {
  if (dim < 1 || dim > 24)
    throw std::invalid_argument("HaltonSequence: dim must lie in [1,24]");
  index_ = 4096ull + static_cast<std::uint64_t>(seed) * 122949829ull % 900000007ull;
}

Vector HaltonSequence::next() {
  Vector u(dim_);
  for (int k = 0; k < dim_; ++k) u[k] = radical_inverse(index_, kPrimes[k]);
  ++index_;
  return u;
}

SamplerSpec SamplerSpec::box_domain(const Vector& lo, const Vector& hi) {
  if (lo.size() != hi.size() || lo.size() == 0 || ((hi - lo).minCoeff() <= 0.0))
    throw std::invalid_argument("box_domain: bad bounds");
  SamplerSpec s;
  s.kind = Kind::box;
  s.lo = lo;
  s.hi = hi;
  // Corners carry the extreme coordinates; inject up to 2^min(dim,12).
  const int dim = static_cast<int>(lo.size());
  const int corner_bits = std::min(dim, 12);
  const int corners = 1 << corner_bits;
  s.special_points.resize(dim, corners);
  for (int c = 0; c < corners; ++c)
    for (int k = 0; k < dim; ++k)
      s.special_points(k, c) = (k < corner_bits && ((c >> k) & 1)) ? hi[k] : lo[k];
  return s;
}

SamplerSpec SamplerSpec::unit_cube(int dim) {
  return box_domain(Vector::Zero(dim), Vector::Ones(dim));
}

SamplerSpec SamplerSpec::tube_domain(const Manifold& m, double q) {
  if (q < 0.0 || q >= 1.0) throw std::invalid_argument("tube_domain: q must lie in [0,1)");
  SamplerSpec s;
  s.kind = Kind::tube;
  s.manifold = &m;
  s.q = q;
  return s;
}

SamplerSpec SamplerSpec::point_list(const Matrix& pts) {
  if (pts.cols() == 0) throw std::invalid_argument("point_list: no points");
  SamplerSpec s;
  s.kind = Kind::points;
  s.points = pts;
  return s;
}

int SamplerSpec::dim() const {
  switch (kind) {
    case Kind::box:
      return static_cast<int>(lo.size());
    case Kind::tube:
      return manifold->ambient_dim();
    case Kind::points:
      return static_cast<int>(points.rows());
  }
  return 0;
}

Matrix SamplerSpec::draw(int n, unsigned seed) const {
  Matrix base;
  switch (kind) {
    case Kind::box: {
      const int d = dim();
      HaltonSequence seq(d, seed);
      base.resize(d, n);
      for (int i = 0; i < n; ++i) {
        const Vector u = seq.next();
        base.col(i) = lo.array() + (hi - lo).array() * u.array();
      }
      break;
    }
    case Kind::tube: {
      const Manifold& m = *manifold;
      const int d = m.intrinsic_dim();
      const int D = m.ambient_dim();
      const int codim = D - d;
      // Parameters: d surface coordinates, 1 radial fraction, codim
      // direction coordinates; shells at fractions {0, 1/2, 9/10, 1-} mix
      // interior and near-boundary offsets.
      HaltonSequence seq(d + 1 + codim, seed);
      base.resize(D, n);
      const double shells[4] = {0.0, 0.5, 0.9, 1.0 - 1e-9};
      for (int i = 0; i < n; ++i) {
        const Vector u = seq.next();
        const Vector foot = m.surface_from_unit(u.head(d));
        Vector x = foot;
        if (q > 0.0 && codim > 0) {
          Vector dir(codim);
          // Box-Muller over Halton pairs for a deterministic direction.
          for (int k = 0; k < codim; ++k) {
            const double a = std::max(u[d + 1 + k], 1e-12);
            const double b = u[d + 1 + (k + 1) % codim];
            dir[k] = std::sqrt(-2.0 * std::log(a)) * std::cos(2.0 * kPi * b);
          }
          if (dir.norm() < 1e-12) dir.setOnes();
          dir.normalize();
          const double shell = shells[i % 4];
          const double frac =
              (i % 8 < 4) ? shell : std::pow(u[d], 1.0 / codim) * (1.0 - 1e-9);
          const double radius = q * m.local_reach(foot) * frac;
          x = foot + m.normal_basis(foot) * (radius * dir);
        }
        base.col(i) = x;
      }
      break;
    }
    case Kind::points: {
      base = points.leftCols(std::min<Eigen::Index>(n, points.cols()));
      break;
    }
  }
  if (special_points.cols() == 0) return base;
  Matrix out(base.rows(), base.cols() + special_points.cols());
  out << base, special_points;
  return out;
}

SupError sup_error(const ReluNetwork& net,
                   const std::function<Vector(const Vector&)>& reference,
                   const SamplerSpec& sampler, int n, unsigned seed,
                   ErrorNorm norm, int jobs) {
  if (sampler.dim() != net.input_dim())
    throw std::invalid_argument("sup_error: sampler dimension " +
                                std::to_string(sampler.dim()) +
                                " != net input dim " +
                                std::to_string(net.input_dim()));
  const Matrix xs = sampler.draw(n, seed);
  const Eigen::Index total = xs.cols();

  // Batch size bounded so wide intermediate layers stay within memory.
  Eigen::Index max_width = net.input_dim();
  for (const Layer& l : net.layers()) max_width = std::max(max_width, l.rows());
  const Eigen::Index block = std::clamp<Eigen::Index>(
      (Eigen::Index(1) << 25) / std::max<Eigen::Index>(max_width, 1), 8, 2048);

  jobs = std::max(1, jobs);
  std::mutex mu;
  double best = -1.0;
  Eigen::Index best_col = 0;
  std::atomic<Eigen::Index> cursor{0};

  auto worker = [&]() {
    double local_best = -1.0;
    Eigen::Index local_col = 0;
    while (true) {
      const Eigen::Index start = cursor.fetch_add(block);
      if (start >= total) break;
      const Eigen::Index count = std::min(block, total - start);
      const Matrix out = net.evaluate_batch(xs.middleCols(start, count));
      for (Eigen::Index c = 0; c < count; ++c) {
        const Vector ref = reference(xs.col(start + c));
        const Vector diff = out.col(c) - ref;
        const double err = (norm == ErrorNorm::linf)
                               ? diff.cwiseAbs().maxCoeff()
                               : diff.cwiseAbs().sum();
        if (err > local_best) {
          local_best = err;
          local_col = start + c;
        }
      }
    }
    std::lock_guard<std::mutex> lock(mu);
    if (local_best > best || (local_best == best && local_col < best_col)) {
      best = local_best;
      best_col = local_col;
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  SupError result;
  result.estimate = std::max(best, 0.0);
  result.argmax = xs.col(best_col);
  result.sample_count = static_cast<int>(total);
  result.seed = seed;
  return result;
}

SupError sup_error(const ReluNetwork& net,
                   const std::function<double(const Vector&)>& reference,
                   const SamplerSpec& sampler, int n, unsigned seed,
                   ErrorNorm norm, int jobs) {
  auto vec_ref = [&reference](const Vector& x) {
    Vector v(1);
    v << reference(x);
    return v;
  };
  return sup_error(net, std::function<Vector(const Vector&)>(vec_ref), sampler, n,
                   seed, norm, jobs);
}

std::vector<AuditRow> dimension_audit(const ReluNetwork& net,
                                      const std::vector<AuditBound>& bounds) {
  const DimensionMetrics m = metrics(net);
  std::vector<AuditRow> rows;
  rows.reserve(bounds.size());
  for (const AuditBound& b : bounds) {
    AuditRow row;
    row.metric = b.metric;
    row.bound = b.bound;
    row.note = b.note;
    if (b.metric == "depth")
      row.value = m.depth;
    else if (b.metric == "width")
      row.value = static_cast<double>(m.width);
    else if (b.metric == "params")
      row.value = static_cast<double>(m.nonzero_params);
    else if (b.metric == "weight_bound")
      row.value = m.weight_bound;
    else
      throw std::invalid_argument("dimension_audit: unknown metric '" + b.metric + "'");
    row.pass = row.value <= b.bound;
    rows.push_back(std::move(row));
  }
  return rows;
}

RateFit rate_fit(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3) throw std::invalid_argument("rate_fit: need at least 3 pairs");
  const auto n = static_cast<double>(pairs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : pairs) {
    if (x <= 0.0 || y <= 0.0)
      throw std::invalid_argument("rate_fit: values must be positive");
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  const double cxy = sxy - sx * sy / n;
  RateFit fit;
  fit.slope = (vx > 0.0) ? cxy / vx : 0.0;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.r2 = (vx > 0.0 && vy > 0.0) ? (cxy * cxy) / (vx * vy) : 1.0;
  return fit;
}

PropertyResult metric_equivalence_check(const Manifold& m, double q, double p,
                                        int n, unsigned seed) {
  if (!(p >= q && p < 1.0))
    throw std::invalid_argument("metric_equivalence_check: need q <= p < 1");
  const double tau = m.global_reach();
  PropertyResult res;
  res.name = "metric_equivalence";
  res.worst_margin = std::numeric_limits<double>::infinity();

  const int batch = std::max(64, n / 4);
  int admissible = 0;
  int draws = 0;
  unsigned round = 0;
  while (admissible < n && draws < 200 * n) {
    const TubeSample xs = m.tube_sample(q, batch, seed + 17 * round);
    const TubeSample zs = m.tube_sample(0.0, batch, seed + 17 * round + 7);
    ++round;
    for (int i = 0; i < batch && admissible < n; ++i) {
      ++draws;
      const Vector x = xs.points.col(i);
      const Vector z = zs.feet.col(i);
      const Vector v = m.project(x);
      const double tau_z = m.local_reach(z);
      const Matrix A = m.tangent_basis(z);
      const double omega = (A.transpose() * (x - z)).norm();
      // Preconditions of the lower-bound direction.
      if ((x - z).norm() >= p * tau_z) continue;
      if (omega >= (1.0 - p) / 3.0 * tau) continue;
      ++admissible;
      ++res.checked;

      const double geo = m.geodesic_dist(z, v);
      const double dist_to_m = (x - v).norm();
      const double tau_v = m.local_reach(v);
      const double denom = std::max(tau, tau_v - geo);
      const double upper = (1.0 + dist_to_m / denom) * geo;  // bounds omega
      const double lower_rhs = 3.0 / (1.0 - p) * omega;      // bounds geo

      const double slack1 = upper - omega;
      const double slack2 = lower_rhs - geo;
      const double slack = std::min(slack1, slack2);
      res.worst_margin = std::min(res.worst_margin, slack);
      if (slack1 < -1e-9 || slack2 < -1e-9) ++res.violations;
    }
  }
  if (admissible < n / 10)
    throw std::runtime_error("metric_equivalence_check: too few admissible samples");
  res.pass = res.violations == 0;
  std::ostringstream os;
  os << "admissible=" << admissible << " of " << draws << " draws";
  res.detail = os.str();
  return res;
}

PropertyResult lipschitz_check(const Manifold& m, double q, int n_pairs, unsigned seed) {
  if (q < 0.0 || q >= 1.0) throw std::invalid_argument("lipschitz_check: q must lie in [0,1)");
  PropertyResult res;
  res.name = "projection_lipschitz";
  const double bound = 1.0 / (1.0 - q) + 1e-8;
  const TubeSample a = m.tube_sample(q, n_pairs, seed);
  const TubeSample b = m.tube_sample(q, n_pairs, seed + 1);
  double max_ratio = 0.0;
  for (int i = 0; i < n_pairs; ++i) {
    const Vector x = a.points.col(i), y = b.points.col(i);
    const double dx = (x - y).norm();
    if (dx < 1e-12) continue;
    const double dpi = (m.project(x) - m.project(y)).norm();
    max_ratio = std::max(max_ratio, dpi / dx);
    ++res.checked;
    if (dpi > bound * dx) ++res.violations;
  }
  res.worst_margin = bound - max_ratio;
  res.pass = res.violations == 0;
  std::ostringstream os;
  os << "max_ratio=" << max_ratio << " bound=" << bound;
  res.detail = os.str();
  return res;
}

ConstantsRegistry ConstantsRegistry::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("constants registry: cannot open " + path);
  nlohmann::json doc;
  in >> doc;
  return from_json(doc);
}

ConstantsRegistry ConstantsRegistry::from_json(const nlohmann::json& doc) {
  ConstantsRegistry reg;
  for (auto it = doc.begin(); it != doc.end(); ++it)
    reg.values_[it.key()] = it.value().get<double>();
  return reg;
}

double ConstantsRegistry::at(const std::string& id) const {
  auto it = values_.find(id);
  if (it == values_.end())
    throw std::invalid_argument("constants registry: unknown check id '" + id + "'");
  return it->second;
}

bool ConstantsRegistry::contains(const std::string& id) const {
  return values_.count(id) > 0;
}

bool VerificationReport::all_pass() const {
  for (const auto& row : dimension_audit)
    if (!row.pass) return false;
  for (const auto& prop : property_results)
    if (!prop.pass) return false;
  return true;
}

nlohmann::ordered_json VerificationReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["sup_error_estimate"] = sup_error_estimate;
  doc["argmax_point"] =
      std::vector<double>(argmax_point.data(), argmax_point.data() + argmax_point.size());
  doc["sample_count"] = sample_count;
  doc["seed"] = seed;
  nlohmann::ordered_json audits = nlohmann::ordered_json::array();
  for (const auto& row : dimension_audit) {
    nlohmann::ordered_json r;
    r["metric"] = row.metric;
    r["value"] = row.value;
    r["bound"] = row.bound;
    r["pass"] = row.pass;
    if (!row.note.empty()) r["note"] = row.note;
    audits.push_back(std::move(r));
  }
  doc["dimension_audit"] = std::move(audits);
  nlohmann::ordered_json props = nlohmann::ordered_json::array();
  for (const auto& prop : property_results) {
    nlohmann::ordered_json r;
    r["name"] = prop.name;
    r["checked"] = prop.checked;
    r["violations"] = prop.violations;
    r["worst_margin"] = prop.worst_margin;
    r["pass"] = prop.pass;
    if (!prop.detail.empty()) r["detail"] = prop.detail;
    props.push_back(std::move(r));
  }
  doc["property_results"] = std::move(props);
  if (rate_fit.has_value()) {
    nlohmann::ordered_json rf;
    rf["slope"] = rate_fit->slope;
    rf["intercept"] = rate_fit->intercept;
    rf["r2"] = rate_fit->r2;
    doc["rate_fit"] = std::move(rf);
  }
  return doc;
}

std::string VerificationReport::to_csv() const {
  std::ostringstream os;
  os << "check,value,bound,pass\n";
  os << "sup_error," << sup_error_estimate << ",,\n";
  for (const auto& row : dimension_audit)
    os << row.metric << "," << row.value << "," << row.bound << ","
       << (row.pass ? "1" : "0") << "\n";
  for (const auto& prop : property_results)
    os << prop.name << "," << prop.violations << ",0," << (prop.pass ? "1" : "0")
       << "\n";
  if (rate_fit.has_value())
    os << "rate_fit_slope," << rate_fit->slope << ",,\n";
  return os.str();
}

}  // namespace reluforge
