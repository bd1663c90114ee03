#ifndef RELUFORGE_VERIFY_HPP
#define RELUFORGE_VERIFY_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reluforge/geometry.hpp"
#include "reluforge/net.hpp"

#include <json.hpp>

namespace reluforge {

/// Halton low-discrepancy sequence over [0,1)^dim; the seed shifts the
/// start index so distinct seeds give distinct deterministic grids.
class HaltonSequence {
 public:
  HaltonSequence(int dim, unsigned seed);
  Vector next();

 private:
  int dim_;
  std::uint64_t index_;
};

/// Where a sup-error estimate draws its points: a box, a manifold tube, or
/// an explicit list. Special points (centers, corners, boundary shells) are
/// appended to every draw; error maxima concentrate at construction seams.
struct SamplerSpec {
  enum class Kind { box, tube, points };
  Kind kind = Kind::box;
  Vector lo, hi;                       // box
  const Manifold* manifold = nullptr;  // tube
  double q = 0.0;
  Matrix points;          // explicit list (D x n)
  Matrix special_points;  // appended to every draw (D x k)

  static SamplerSpec box_domain(const Vector& lo, const Vector& hi);
  static SamplerSpec unit_cube(int dim);
  static SamplerSpec tube_domain(const Manifold& m, double q);
  static SamplerSpec point_list(const Matrix& pts);

  int dim() const;
  /// n deterministic draws plus the special points.
  Matrix draw(int n, unsigned seed) const;
};

enum class ErrorNorm { linf, l1 };

struct SupError {
  double estimate = 0.0;
  Vector argmax;
  int sample_count = 0;
  unsigned seed = 0;
};

/// Max deviation between the net and the reference over the sampled grid;
/// a lower bound on the true sup norm. Deterministic given the seed;
/// sample evaluation is partitioned over jobs threads and max-reduced.
SupError sup_error(const ReluNetwork& net,
                   const std::function<Vector(const Vector&)>& reference,
                   const SamplerSpec& sampler, int n, unsigned seed,
                   ErrorNorm norm = ErrorNorm::linf, int jobs = 1);

/// Scalar-reference convenience overload.
SupError sup_error(const ReluNetwork& net,
                   const std::function<double(const Vector&)>& reference,
                   const SamplerSpec& sampler, int n, unsigned seed,
                   ErrorNorm norm = ErrorNorm::linf, int jobs = 1);

struct AuditBound {
  std::string metric;  // depth | width | params | weight_bound
  double bound = 0.0;  // already includes any frozen constant
  std::string note;
};

struct AuditRow {
  std::string metric;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::string note;
};

/// Evaluates each named metric of the net against its bound.
/// Unknown metric names throw.
std::vector<AuditRow> dimension_audit(const ReluNetwork& net,
                                      const std::vector<AuditBound>& bounds);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares on (ln x, ln y); requires >= 3 positive pairs.
RateFit rate_fit(const std::vector<std::pair<double, double>>& pairs);

struct PropertyResult {
  std::string name;
  long long checked = 0;
  long long violations = 0;
  double worst_margin = 0.0;  // most adverse slack observed (>= 0 is healthy)
  bool pass = false;
  std::string detail;
};

/// Proposition-level geometric checks, sampled.
PropertyResult metric_equivalence_check(const Manifold& m, double q, double p,
                                        int n, unsigned seed);
PropertyResult lipschitz_check(const Manifold& m, double q, int n_pairs, unsigned seed);

/// Frozen fitted-constant registry: JSON map {check_id: constant}.
class ConstantsRegistry {
 public:
  static ConstantsRegistry load_file(const std::string& path);
  static ConstantsRegistry from_json(const nlohmann::json& doc);
  double at(const std::string& id) const;  // throws on unknown id
  bool contains(const std::string& id) const;
  const std::map<std::string, double>& values() const { return values_; }

 private:
  std::map<std::string, double> values_;
};

struct VerificationReport {
  double sup_error_estimate = 0.0;
  Vector argmax_point;
  int sample_count = 0;
  unsigned seed = 0;
  std::vector<AuditRow> dimension_audit;
  std::vector<PropertyResult> property_results;
  std::optional<RateFit> rate_fit;

  bool all_pass() const;
  nlohmann::ordered_json to_json() const;
  std::string to_csv() const;  // summary rows: check name, value, bound, pass
};

}  // namespace reluforge

#endif
