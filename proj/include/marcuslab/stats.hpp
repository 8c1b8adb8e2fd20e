#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "marcuslab/cadlag_path.hpp"
#include "marcuslab/stable_levy.hpp"

namespace marcuslab {

class Philox;

struct TailEstimate {
  double alpha_hat = 0.0;
  int k = 0;
  double standard_error = 0.0;
  std::size_t sample_size = 0;
};

/// Hill estimator on the k largest order statistics:
///   alpha_hat = k / sum_{i<k} log(X_(N-i) / X_(N-k)),  SE = alpha_hat / sqrt(k).
/// Throws std::invalid_argument unless 2 <= k < N and all samples are positive,
/// DegenerateSample when the top k + 1 values coincide.
TailEstimate hill_estimator(std::vector<double> samples, int k);

/// floor(N^0.6).
int default_hill_k(std::size_t n);

struct EcfReport {
  std::vector<Point> u_grid;
  std::vector<std::complex<double>> empirical;
  std::vector<std::complex<double>> theoretical;
  std::vector<double> standard_error;  // sqrt((1 - |phi_hat|^2) / N)
  std::vector<double> abs_gap;
  double max_abs_gap = 0.0;
  std::size_t argmax = 0;
  double max_standard_error = 0.0;
  /// max over u of |gap(u)| / SE(u); gaps below 1e-12 count as zero, and a
  /// larger gap where SE = 0 gives infinity.
  double max_gap_in_se = 0.0;
};

/// Directions: the atoms of the spectral measure, their orthogonal
/// complements and negatives (at most four distinct directions), times radii
/// {0.25, 0.5, 1, 2, 4}. Twenty points in dimension >= 2.
std::vector<Point> default_u_grid(const StableLaw& law);

/// Throws std::invalid_argument below 1000 samples.
EcfReport ecf_distance(const std::vector<Point>& samples, const StableLaw& law, const std::vector<Point>& u_grid);

/// Energy distance 2 E|A - B| - E|A - A'| - E|B - B'| with all three expectations
/// taken over all ordered pairs (V-statistics), hence nonnegative and zero for
/// identical samples.
double energy_distance(const std::vector<Point>& a, const std::vector<Point>& b);

struct PermutationTest {
  double statistic = 0.0;
  std::vector<double> null_distribution;  // sorted
  double quantile95 = 0.0;
  double quantile99 = 0.0;
  double p_value = 0.0;  // (1 + #{null >= statistic}) / (1 + permutations)
};

/// Permutation null for energy_distance on the pooled samples.
PermutationTest energy_permutation_test(const std::vector<Point>& a, const std::vector<Point>& b, int permutations,
                                        Philox& rng);

/// Linear-interpolation sample quantile (type 7). Throws on empty input.
double quantile(std::vector<double> values, double q);

struct QuantileStability {
  double q = 0.0;
  std::map<std::int64_t, double> quantiles;
  double spread = 0.0;  // max / min - 1
  double threshold = 0.0;
  bool pass = false;
};

/// Throws std::invalid_argument with fewer than two values of n.
QuantileStability quantile_stability(const std::map<std::int64_t, std::vector<double>>& series, double q,
                                     double threshold);

struct KsResult {
  double statistic = 0.0;
  double critical_1pct = 0.0;  // 1.628 sqrt((n + m) / (n m))
  bool reject_1pct = false;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// Report object: {estimator, inputs_digest, numbers, pass, threshold, seed}.
nlohmann::ordered_json make_report(const std::string& estimator, const std::string& inputs_digest,
                                   nlohmann::ordered_json numbers, bool pass, nlohmann::ordered_json threshold,
                                   std::uint64_t seed);

nlohmann::ordered_json to_json(const TailEstimate& t);
nlohmann::ordered_json to_json(const EcfReport& r);
nlohmann::ordered_json to_json(const QuantileStability& q);

}  // namespace marcuslab
