// reluforge: build and verify constructive ReLU networks from a config file.
//
// Commands:
//   build       emit the network JSON for a named construction
//   verify      run the check suite for a construction, emit a report
//   sweep       eps/delta/N grids, emit CSV plus a log-log rate fit
//   rates       emit sample-size schedule tables
//   primitives  build and verify the primitive zoo
//
// Exit codes: 0 all requested assertions pass, 1 assertion failure,
// 2 configuration error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "reluforge/calculus.hpp"
#include "reluforge/distance.hpp"
#include "reluforge/geometry.hpp"
#include "reluforge/net.hpp"
#include "reluforge/pou.hpp"
#include "reluforge/primitives.hpp"
#include "reluforge/rates.hpp"
#include "reluforge/serialize.hpp"
#include "reluforge/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace reluforge;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AssertionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

int line_of_offset(const std::string& text, size_t offset) {
  int line = 1;
  for (size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error at line " +
                      std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
  }
}

// Dotted-path override: model1.q=0.4 reaches cfg["model1"]["q"].
void apply_override(json& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment + "' is not key.path=value");
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  json* node = &cfg;
  size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw ConfigError("override '" + assignment + "' has an empty key");
    if (dot == std::string::npos) {
      json parsed;
      try {
        parsed = json::parse(value);
      } catch (const json::parse_error&) {
        parsed = value;  // plain string
      }
      (*node)[key] = parsed;
      return;
    }
    node = &((*node)[key]);
    start = dot + 1;
  }
}

template <typename T>
T require_field(const json& section, const std::string& key, const std::string& where) {
  if (!section.contains(key))
    throw ConfigError("config: missing " + where + "." + key);
  try {
    return section.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config: bad value for " + where + "." + key + ": " + e.what());
  }
}

template <typename T>
T field_or(const json& section, const std::string& key, T fallback) {
  if (!section.contains(key)) return fallback;
  return section.at(key).get<T>();
}

Manifold manifold_from_config(const json& cfg) {
  if (!cfg.contains("manifold")) throw ConfigError("config: missing [manifold] section");
  const json& mc = cfg.at("manifold");
  const std::string kind = require_field<std::string>(mc, "kind", "manifold");
  const int ambient = require_field<int>(mc, "ambient_dim", "manifold");
  const auto embed_seed = field_or<unsigned>(mc, "embed_seed", 0u);
  const double q_max = field_or<double>(mc, "q_max", 0.9);

  Vector center;
  if (mc.contains("center")) {
    if (mc.at("center").is_string() && mc.at("center").get<std::string>() == "cube") {
      center = 0.5 * Vector::Ones(ambient);
    } else {
      const auto vals = mc.at("center").get<std::vector<double>>();
      center = Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    }
  }

  if (kind == "circle")
    return Manifold::circle(require_field<double>(mc, "radius", "manifold"), ambient,
                            embed_seed, center, q_max);
  if (kind == "sphere")
    return Manifold::sphere(require_field<double>(mc, "radius", "manifold"), ambient,
                            embed_seed, center, q_max);
  if (kind == "torus")
    return Manifold::torus(require_field<double>(mc, "major_radius", "manifold"),
                           require_field<double>(mc, "minor_radius", "manifold"),
                           ambient, embed_seed, center, q_max);
  if (kind == "swiss_roll")
    return Manifold::swiss_roll(require_field<double>(mc, "pitch", "manifold"),
                                require_field<double>(mc, "theta0", "manifold"),
                                require_field<double>(mc, "theta1", "manifold"),
                                require_field<double>(mc, "height", "manifold"),
                                ambient, embed_seed, center, q_max);
  if (kind == "affine_subspace") {
    const auto ext = require_field<std::vector<double>>(mc, "extent", "manifold");
    Vector extent = Eigen::Map<const Vector>(ext.data(), static_cast<Eigen::Index>(ext.size()));
    return Manifold::affine_subspace(static_cast<int>(ext.size()), ambient, extent,
                                     embed_seed, center, q_max);
  }
  throw ConfigError("config: unknown manifold kind '" + kind + "'");
}

// Named scalar targets g on the manifold, evaluated through canonical
// coordinates. Values land in [0,1].
double manifold_g(const std::string& name, const Manifold& m, const Vector& point) {
  if (name.rfind("constant:", 0) == 0) return std::stod(name.substr(9));
  const Vector c = m.canonical_of(point);
  if (name == "cosine_angle") {
    const double theta = std::atan2(c[1], c[0]);
    return 0.5 * (1.0 + std::cos(theta));
  }
  if (name == "height") {
    // Last canonical coordinate normalized by the canonical extent.
    const double span = std::max(1e-12, std::abs(c.size() >= 3 ? 1.0 : 1.0));
    (void)span;
    return 0.5 * (1.0 + c[c.size() - 1] / std::max(1e-12, c.cwiseAbs().maxCoeff() + 1e-9));
  }
  throw ConfigError("config: unknown manifold g '" + name + "'");
}

std::function<double(double)> scalar_g(const std::string& name) {
  if (name.rfind("constant:", 0) == 0) {
    const double c = std::stod(name.substr(9));
    return [c](double) { return c; };
  }
  if (name == "identity") return [](double t) { return t; };
  if (name == "sqrt") return [](double t) { return std::sqrt(t); };
  if (name == "one_minus") return [](double t) { return 1.0 - t; };
  if (name == "sine")
    return [](double t) { return 0.5 * (1.0 + std::sin(2.0 * 3.14159265358979323846 * t)); };
  throw ConfigError("config: unknown scalar g '" + name + "'");
}

Matrix read_cloud_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open cloud file " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      throw ConfigError("cloud file " + path + " has ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("cloud file " + path + " is empty");
  Matrix cloud(static_cast<Eigen::Index>(rows.front().size()),
               static_cast<Eigen::Index>(rows.size()));
  for (size_t j = 0; j < rows.size(); ++j)
    for (size_t i = 0; i < rows[j].size(); ++i)
      cloud(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[j][i];
  return cloud;
}

Matrix generated_cloud(const json& gc) {
  const std::string type = require_field<std::string>(gc, "type", "cloud_generator");
  const int dim = require_field<int>(gc, "dim", "cloud_generator");
  const int count = require_field<int>(gc, "count", "cloud_generator");
  const auto seed = field_or<unsigned>(gc, "seed", 1u);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  Matrix cloud(dim, count);
  if (type == "random") {
    for (int j = 0; j < count; ++j)
      for (int i = 0; i < dim; ++i) cloud(i, j) = u(rng);
    return cloud;
  }
  if (type == "curve") {
    const double phase = u(rng);
    for (int j = 0; j < count; ++j) {
      const double t = double(j) / std::max(1, count - 1);
      for (int i = 0; i < dim; ++i)
        cloud(i, j) = 0.5 + 0.35 * std::sin(2.0 * t + phase + 1.7 * i);
    }
    return cloud;
  }
  throw ConfigError("config: unknown cloud generator '" + type + "'");
}

std::vector<Matrix> clouds_from_config(const json& m2) {
  std::vector<Matrix> clouds;
  if (m2.contains("cloud_files"))
    for (const auto& f : m2.at("cloud_files"))
      clouds.push_back(read_cloud_csv(f.get<std::string>()));
  if (m2.contains("cloud_generators"))
    for (const auto& g : m2.at("cloud_generators")) clouds.push_back(generated_cloud(g));
  if (clouds.empty())
    throw ConfigError("config: model2 needs cloud_files or cloud_generators");
  return clouds;
}

DistanceModelSpec model2_from_config(const json& cfg) {
  if (!cfg.contains("model2")) throw ConfigError("config: missing [model2] section");
  const json& m2 = cfg.at("model2");
  DistanceModelSpec spec;
  spec.clouds = clouds_from_config(m2);
  for (const auto& name : require_field<std::vector<std::string>>(m2, "g", "model2"))
    spec.g_list.push_back(scalar_g(name));
  if (spec.g_list.size() != spec.clouds.size())
    throw ConfigError("config: model2 g list must match the cloud count");
  spec.alpha = require_field<double>(m2, "alpha", "model2");
  spec.holder_const = require_field<double>(m2, "holder_const", "model2");
  spec.intrinsic_dim = require_field<int>(m2, "intrinsic_dim", "model2");
  spec.delta0 = require_field<double>(m2, "delta0", "model2");
  return spec;
}

struct Model1Setup {
  PouSpec pou;
  std::string g_name;
  double eps = 0.0;
};

Model1Setup model1_from_config(const json& cfg, const Manifold& m) {
  if (!cfg.contains("model1")) throw ConfigError("config: missing [model1] section");
  const json& m1 = cfg.at("model1");
  const double q = require_field<double>(m1, "q", "model1");
  if (!(q >= 0.0 && q < 1.0)) throw ConfigError("config: model1.q must lie in [0,1)");
  const double sep_c = field_or<double>(m1, "separation_constant", 1.0 / 288.0);
  const double tau = m.global_reach();
  const double delta = field_or<double>(
      m1, "delta", 0.9 * sep_c * (1.0 - q) * (1.0 - q) * tau);
  Model1Setup setup;
  setup.pou = make_pou_spec(m, q, delta, sep_c);
  setup.g_name = field_or<std::string>(m1, "g", "cosine_angle");
  setup.eps = field_or<double>(m1, "eps", 0.05);
  return setup;
}

// Output directory writer with a manifest of artifacts and config hash.
class ArtifactWriter {
 public:
  ArtifactWriter(std::string out_dir, const json& cfg) : dir_(std::move(out_dir)) {
    fs::create_directories(dir_);
    manifest_["config_hash"] = to_hex(fnv1a(cfg.dump()));
    manifest_["files"] = ordered_json::array();
  }

  void write_text(const std::string& name, const std::string& text) {
    std::ofstream out(fs::path(dir_) / name);
    if (!out) throw std::runtime_error("cannot write " + name);
    out << text;
    manifest_["files"].push_back(name);
  }

  void write_network(const std::string& name, const ReluNetwork& net) {
    write_text(name, network_to_json(net).dump(2) + "\n");
  }

  void finish() {
    std::ofstream out(fs::path(dir_) / "manifest.json");
    out << manifest_.dump(2) << "\n";
  }

 private:
  static std::string to_hex(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << v;
    return os.str();
  }
  std::string dir_;
  ordered_json manifest_;
};

ordered_json sup_to_json(const SupError& s) {
  ordered_json j;
  j["estimate"] = s.estimate;
  j["argmax"] = std::vector<double>(s.argmax.data(), s.argmax.data() + s.argmax.size());
  j["samples"] = s.sample_count;
  j["seed"] = s.seed;
  return j;
}

int run_build(const json& cfg, const std::string& out_dir, unsigned seed, int jobs) {
  (void)seed;
  (void)jobs;
  ArtifactWriter writer(out_dir, cfg);
  const std::string what =
      field_or<std::string>(cfg.value("build", json::object()), "construction", "model1");
  if (what == "model1") {
    Manifold m = manifold_from_config(cfg);
    Model1Setup setup = model1_from_config(cfg, m);
    const Eigen::Index K = setup.pou.center_count();
    Vector g_values(K);
    for (Eigen::Index i = 0; i < K; ++i)
      g_values[i] = manifold_g(setup.g_name, m, setup.pou.net.centers.col(i));
    Model1Spec spec{setup.pou, g_values, 1.0, 1.0};
    writer.write_network("model1.net.json", model1_net(spec, setup.eps));
  } else if (what == "projection") {
    Manifold m = manifold_from_config(cfg);
    Model1Setup setup = model1_from_config(cfg, m);
    writer.write_network("projection.net.json",
                         projection_net(m, setup.pou.q, setup.eps, setup.pou.net.delta,
                                        setup.pou.separation_constant));
  } else if (what == "eta") {
    Manifold m = manifold_from_config(cfg);
    Model1Setup setup = model1_from_config(cfg, m);
    writer.write_network("eta.net.json", eta_net(setup.pou, setup.eps));
  } else if (what == "model2") {
    DistanceModelSpec spec = model2_from_config(cfg);
    const double eps = field_or<double>(cfg.at("model2"), "eps", 0.05);
    writer.write_network("model2.net.json", model2_net(spec, eps));
  } else {
    throw ConfigError("config: unknown construction '" + what + "'");
  }
  writer.finish();
  return 0;
}

int run_verify(const json& cfg, const std::string& out_dir, unsigned seed, int jobs) {
  ArtifactWriter writer(out_dir, cfg);
  const json vc = cfg.value("verify", json::object());
  const std::string what = field_or<std::string>(vc, "construction", "geometry");
  const int samples = field_or<int>(vc, "samples", 2000);
  VerificationReport report;
  report.seed = seed;

  if (what == "geometry") {
    Manifold m = manifold_from_config(cfg);
    const auto q_list = field_or<std::vector<double>>(vc, "q_list", {0.0, 0.3, 0.5});
    for (const double q : q_list)
      report.property_results.push_back(lipschitz_check(m, q, samples, seed));
    const double q = q_list.empty() ? 0.3 : q_list[q_list.size() / 2];
    const double p = field_or<double>(vc, "metric_p", 0.5 * (1.0 + q));
    report.property_results.push_back(metric_equivalence_check(m, q, p, samples, seed));
  } else if (what == "pou") {
    Manifold m = manifold_from_config(cfg);
    Model1Setup setup = model1_from_config(cfg, m);
    report.property_results.push_back(pou_check(setup.pou, samples, seed));
  } else if (what == "model1") {
    Manifold m = manifold_from_config(cfg);
    Model1Setup setup = model1_from_config(cfg, m);
    const Eigen::Index K = setup.pou.center_count();
    Vector g_values(K);
    for (Eigen::Index i = 0; i < K; ++i)
      g_values[i] = manifold_g(setup.g_name, m, setup.pou.net.centers.col(i));
    Model1Spec spec{setup.pou, g_values, 1.0, 1.0};
    ReluNetwork net = model1_net(spec, setup.eps);
    const std::string g_name = setup.g_name;
    auto oracle = [&m, g_name](const Vector& x) {
      return manifold_g(g_name, m, m.project(x));
    };
    const SupError sup =
        sup_error(net, std::function<double(const Vector&)>(oracle),
                  SamplerSpec::tube_domain(m, setup.pou.q), samples, seed,
                  ErrorNorm::linf, jobs);
    report.sup_error_estimate = sup.estimate;
    report.argmax_point = sup.argmax;
    report.sample_count = sup.sample_count;
    report.property_results.push_back(pou_check(setup.pou, std::min(samples, 2000), seed));
  } else if (what == "model2") {
    DistanceModelSpec spec = model2_from_config(cfg);
    const double eps = field_or<double>(cfg.at("model2"), "eps", 0.05);
    ReluNetwork net = model2_net(spec, eps);
    auto oracle = [&spec](const Vector& x) {
      double acc = 0.0;
      for (size_t l = 0; l < spec.clouds.size(); ++l)
        acc += spec.g_list[l](normdist_reference(spec.clouds[l], x));
      return acc;
    };
    const SupError sup = sup_error(
        net, std::function<double(const Vector&)>(oracle),
        SamplerSpec::unit_cube(static_cast<int>(spec.clouds[0].rows())), samples, seed,
        ErrorNorm::linf, jobs);
    report.sup_error_estimate = sup.estimate;
    report.argmax_point = sup.argmax;
    report.sample_count = sup.sample_count;
    report.dimension_audit =
        dimension_audit(net, {{"weight_bound", 1.0, "theorem bound"}});
    PropertyResult err;
    err.name = "model2_sup_error";
    err.checked = sup.sample_count;
    err.worst_margin = std::pow(eps, spec.alpha) - sup.estimate;
    err.pass = sup.estimate <= std::pow(eps, spec.alpha);
    err.violations = err.pass ? 0 : 1;
    report.property_results.push_back(err);
  } else {
    throw ConfigError("config: unknown verify construction '" + what + "'");
  }

  writer.write_text("report.json", report.to_json().dump(2) + "\n");
  writer.write_text("report.csv", report.to_csv());
  writer.finish();
  if (!report.all_pass()) {
    std::ostringstream os;
    os << "failing checks:";
    for (const auto& p : report.property_results)
      if (!p.pass) os << " " << p.name;
    for (const auto& r : report.dimension_audit)
      if (!r.pass) os << " " << r.metric;
    throw AssertionFailure(os.str());
  }
  return 0;
}

int run_sweep(const json& cfg, const std::string& out_dir, unsigned seed, int jobs) {
  ArtifactWriter writer(out_dir, cfg);
  const json sc = cfg.value("sweep", json::object());
  const std::string kind = field_or<std::string>(sc, "kind", "model2_eps");
  std::ostringstream csv;
  std::vector<std::pair<double, double>> fit_pairs;

  if (kind == "model2_eps") {
    DistanceModelSpec spec = model2_from_config(cfg);
    const auto eps_values = require_field<std::vector<double>>(sc, "eps_values", "sweep");
    const int samples = field_or<int>(sc, "samples", 4000);
    csv << "eps,eps_alpha,params,depth,width,weight_bound,sup_error\n";
    for (const double eps : eps_values) {
      ReluNetwork net = model2_net(spec, eps);
      auto oracle = [&spec](const Vector& x) {
        double acc = 0.0;
        for (size_t l = 0; l < spec.clouds.size(); ++l)
          acc += spec.g_list[l](normdist_reference(spec.clouds[l], x));
        return acc;
      };
      const SupError sup = sup_error(
          net, std::function<double(const Vector&)>(oracle),
          SamplerSpec::unit_cube(static_cast<int>(spec.clouds[0].rows())), samples,
          seed, ErrorNorm::linf, jobs);
      const auto dm = metrics(net);
      const double eps_alpha = std::pow(eps, spec.alpha);
      csv << eps << "," << eps_alpha << "," << dm.nonzero_params << "," << dm.depth
          << "," << dm.width << "," << dm.weight_bound << "," << sup.estimate << "\n";
      fit_pairs.emplace_back(eps_alpha, static_cast<double>(dm.nonzero_params));
    }
  } else if (kind == "model1_eps") {
    Manifold m = manifold_from_config(cfg);
    const json& m1 = cfg.at("model1");
    const double q = require_field<double>(m1, "q", "model1");
    const double sep_c = field_or<double>(m1, "separation_constant", 1.0 / 288.0);
    const std::string g_name = field_or<std::string>(m1, "g", "cosine_angle");
    const auto eps_values = require_field<std::vector<double>>(sc, "eps_values", "sweep");
    const auto delta_values =
        require_field<std::vector<double>>(sc, "delta_values", "sweep");
    if (eps_values.size() != delta_values.size())
      throw ConfigError("config: sweep eps and delta lists must pair up");
    const int samples = field_or<int>(sc, "samples", 1200);
    csv << "eps,delta,centers,params,depth,width,sup_error\n";
    for (size_t i = 0; i < eps_values.size(); ++i) {
      PouSpec pou = make_pou_spec(m, q, delta_values[i], sep_c);
      const Eigen::Index K = pou.center_count();
      Vector g_values(K);
      for (Eigen::Index k = 0; k < K; ++k)
        g_values[k] = manifold_g(g_name, m, pou.net.centers.col(k));
      Model1Spec spec{pou, g_values, 1.0, 1.0};
      ReluNetwork net = model1_net(spec, eps_values[i]);
      auto oracle = [&m, g_name](const Vector& x) {
        return manifold_g(g_name, m, m.project(x));
      };
      const SupError sup =
          sup_error(net, std::function<double(const Vector&)>(oracle),
                    SamplerSpec::tube_domain(m, q), samples, seed, ErrorNorm::linf, jobs);
      const auto dm = metrics(net);
      csv << eps_values[i] << "," << delta_values[i] << "," << K << ","
          << dm.nonzero_params << "," << dm.depth << "," << dm.width << ","
          << sup.estimate << "\n";
      fit_pairs.emplace_back(sup.estimate, static_cast<double>(dm.nonzero_params));
    }
  } else if (kind == "rates_N") {
    throw ConfigError("config: use the rates command for N sweeps");
  } else {
    throw ConfigError("config: unknown sweep kind '" + kind + "'");
  }

  writer.write_text("sweep.csv", csv.str());
  if (fit_pairs.size() >= 3) {
    const RateFit fit = rate_fit(fit_pairs);
    ordered_json jfit;
    jfit["slope"] = fit.slope;
    jfit["intercept"] = fit.intercept;
    jfit["r2"] = fit.r2;
    writer.write_text("rate_fit.json", jfit.dump(2) + "\n");
  }
  writer.finish();
  return 0;
}

int run_rates(const json& cfg, const std::string& out_dir) {
  ArtifactWriter writer(out_dir, cfg);
  const json rc = cfg.value("rates", json::object());
  const std::string model = field_or<std::string>(rc, "model", "model1");
  const std::string task = field_or<std::string>(rc, "task", "regression");
  const double alpha = field_or<double>(rc, "alpha", 1.0);
  const double d = field_or<double>(rc, "d", 1.0);
  const double D = field_or<double>(rc, "D", 3.0);
  std::optional<double> beta;
  if (rc.contains("beta")) beta = rc.at("beta").get<double>();

  std::vector<double> grid;
  if (rc.contains("N_grid")) {
    grid = rc.at("N_grid").get<std::vector<double>>();
  } else {
    for (double n = 1e3; n <= 1e7; n *= 10.0) grid.push_back(n);
  }

  const ModelFamily mf = (model == "model1") ? ModelFamily::model1 : ModelFamily::model2;
  const TaskKind tk = (task == "regression") ? TaskKind::regression : TaskKind::classification;

  std::ostringstream csv;
  csv << "N,eps_N,L_N,W_N,P_N,B_N,predicted_risk,risk_exponent\n";
  ordered_json rows = ordered_json::array();
  for (const double n : grid) {
    const Schedule s = schedule(mf, tk, n, alpha, d, D, beta);
    csv << s.N << "," << s.eps_N << "," << s.L_N << "," << s.W_N << "," << s.P_N << ","
        << s.B_N << "," << s.predicted_risk << "," << s.risk_exponent << "\n";
    ordered_json row;
    row["N"] = s.N;
    row["eps_N"] = s.eps_N;
    row["L_N"] = s.L_N;
    row["W_N"] = s.W_N;
    row["P_N"] = s.P_N;
    row["B_N"] = s.B_N;
    row["predicted_risk"] = s.predicted_risk;
    row["risk_exponent"] = s.risk_exponent;
    rows.push_back(std::move(row));
  }
  writer.write_text("rates.csv", csv.str());
  writer.write_text("rates.json", rows.dump(2) + "\n");
  writer.finish();
  return 0;
}

int run_primitives(const json& cfg, const std::string& out_dir, double eps, unsigned seed) {
  ArtifactWriter writer(out_dir, cfg);
  std::ostringstream csv;
  csv << "primitive,metric,value,bound,pass\n";
  bool all_pass = true;
  auto row = [&](const std::string& name, const std::string& metric, double value,
                 double bound) {
    const bool pass = value <= bound;
    all_pass &= pass;
    csv << name << "," << metric << "," << value << "," << bound << ","
        << (pass ? 1 : 0) << "\n";
  };

  {
    ReluNetwork sq = square_net(eps);
    auto ref = [](const Vector& x) { return x[0] * x[0]; };
    const SupError s = sup_error(sq, std::function<double(const Vector&)>(ref),
                                 SamplerSpec::box_domain(Vector::Zero(1), Vector::Ones(1)),
                                 100000, seed);
    row("square", "sup_error", s.estimate, eps);
    writer.write_network("square.net.json", sq);
  }
  {
    ReluNetwork n = sq_norm_net(3, 1.0, eps);
    auto ref = [](const Vector& x) { return x.squaredNorm(); };
    // Quasi-random ball sampling through the cube, filtered by the net's
    // own domain: sample the inscribed box.
    const double side = 1.0 / std::sqrt(3.0);
    const SupError s =
        sup_error(n, std::function<double(const Vector&)>(ref),
                  SamplerSpec::box_domain(-side * Vector::Ones(3), side * Vector::Ones(3)),
                  100000, seed);
    row("sq_norm", "sup_error", s.estimate, eps);
  }
  {
    ReluNetwork n = mult_net(1, 2.0, std::min(eps, 0.45));
    auto ref = [](const Vector& x) { return x[0] * x[1]; };
    const SupError s = sup_error(
        n, std::function<double(const Vector&)>(ref),
        SamplerSpec::box_domain(-2.0 * Vector::Ones(2), 2.0 * Vector::Ones(2)), 100000, seed);
    row("mult", "sup_error", s.estimate, std::min(eps, 0.45));
  }
  {
    ReluNetwork n = reciprocal_net(2.0, eps);
    auto ref = [](const Vector& x) { return 1.0 / x[0]; };
    const SupError s = sup_error(n, std::function<double(const Vector&)>(ref),
                                 SamplerSpec::box_domain(0.5 * Vector::Ones(1), 2.0 * Vector::Ones(1)),
                                 100000, seed);
    row("reciprocal", "sup_error", s.estimate, eps);
  }
  {
    const auto m = metrics(min_net(8));
    row("min8", "params", static_cast<double>(m.nonzero_params), 11.0 * 8 * 3);
    row("min8", "depth", m.depth, 6.0);
    row("min8", "weight_bound", m.weight_bound, 1.0);
  }
  {
    const auto m = metrics(sign_net(eps));
    row("sign", "params", static_cast<double>(m.nonzero_params), 7.0);
    row("sign", "weight_bound", m.weight_bound, 1.0 / eps);
  }

  writer.write_text("primitives.csv", csv.str());
  writer.finish();
  if (!all_pass) throw AssertionFailure("primitive suite has failing rows");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constructive ReLU network compiler and verifier"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  unsigned seed = 1;
  int jobs = 0;
  double eps = 1e-3;
  std::vector<std::string> overrides;

  app.add_option("--config", config_path, "config file (JSON)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "sampling seed");
  app.add_option("--jobs", jobs, "verification worker threads");
  app.add_option("--eps", eps, "primitive accuracy target");
  app.add_option("--set", overrides, "dotted-path config override key.path=value");

  auto* cmd_build = app.add_subcommand("build", "emit network JSON for a construction");
  auto* cmd_verify = app.add_subcommand("verify", "run the check suite");
  auto* cmd_sweep = app.add_subcommand("sweep", "grid sweeps with rate fits");
  auto* cmd_rates = app.add_subcommand("rates", "schedule tables");
  auto* cmd_prims = app.add_subcommand("primitives", "build and verify the primitive zoo");

  CLI11_PARSE(app, argc, argv);

  if (jobs <= 0) {
    if (const char* env = std::getenv("RELUFORGE_JOBS")) jobs = std::atoi(env);
    if (jobs <= 0) jobs = 1;
  }

  try {
    json cfg = json::object();
    if (!config_path.empty()) cfg = load_config(config_path);
    for (const auto& ov : overrides) apply_override(cfg, ov);
    if (cfg.contains("seed") && !app.count("--seed")) seed = cfg.at("seed").get<unsigned>();

    if (cmd_build->parsed()) return run_build(cfg, out_dir, seed, jobs);
    if (cmd_verify->parsed()) return run_verify(cfg, out_dir, seed, jobs);
    if (cmd_sweep->parsed()) return run_sweep(cfg, out_dir, seed, jobs);
    if (cmd_rates->parsed()) return run_rates(cfg, out_dir);
    if (cmd_prims->parsed()) return run_primitives(cfg, out_dir, eps, seed);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const AssertionFailure& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
