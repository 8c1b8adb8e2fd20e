#include "marcuslab/stats.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "marcuslab/errors.hpp"
#include "marcuslab/rng.hpp"

namespace marcuslab {

TailEstimate hill_estimator(std::vector<double> x, int k) {
  const std::size_t n = x.size();
  if (k < 2 || static_cast<std::size_t>(k) >= n) throw std::invalid_argument("hill_estimator: need 2 <= k < N");
  for (double v : x) {
    if (!(v > 0.0)) throw std::invalid_argument("hill_estimator: samples must be positive");
  }
  // Descending order statistics x[0] >= ... >= x[k].
  std::partial_sort(x.begin(), x.begin() + k + 1, x.end(), std::greater<>());
  const double base = x[static_cast<std::size_t>(k)];
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += std::log(x[static_cast<std::size_t>(i)] / base);
  if (sum == 0.0) throw DegenerateSample("hill_estimator: top order statistics are all equal");
  TailEstimate t;
  t.k = k;
  t.alpha_hat = k / sum;
  t.standard_error = t.alpha_hat / std::sqrt(static_cast<double>(k));
  t.sample_size = n;
  return t;
}

int default_hill_k(std::size_t n) { return static_cast<int>(std::floor(std::pow(static_cast<double>(n), 0.6))); }

namespace {

Point perpendicular(const Point& s) {
  if (s.size() == 2) {
    Point p(2);
    p << -s(1), s(0);
    return p;
  }
  // Gram-Schmidt against the coordinate axis least aligned with s.
  Eigen::Index axis = 0;
  s.cwiseAbs().minCoeff(&axis);
  Point p = Point::Unit(s.size(), axis);
  p -= p.dot(s) * s;
  return p / p.norm();
}

void push_unique(std::vector<Point>& dirs, const Point& s) {
  for (const auto& d : dirs) {
    if ((d - s).norm() < 1e-9) return;
  }
  dirs.push_back(s);
}

}  // namespace

std::vector<Point> default_u_grid(const StableLaw& law) {
  std::vector<Point> dirs;
  for (const auto& atom : law.spectral().atoms()) push_unique(dirs, atom.direction);
  if (law.dimension() >= 2) {
    const auto atoms = dirs;
    for (const auto& s : atoms) push_unique(dirs, perpendicular(s));
  }
  const auto base = dirs;
  for (const auto& s : base) push_unique(dirs, -s);
  if (dirs.size() > 4) dirs.resize(4);
  std::vector<Point> grid;
  for (const auto& s : dirs) {
    for (double r : {0.25, 0.5, 1.0, 2.0, 4.0}) grid.push_back(r * s);
  }
  return grid;
}

EcfReport ecf_distance(const std::vector<Point>& samples, const StableLaw& law, const std::vector<Point>& u_grid) {
  if (samples.size() < 1000) throw std::invalid_argument("ecf_distance: at least 1000 samples required");
  const double n = static_cast<double>(samples.size());
  EcfReport r;
  r.u_grid = u_grid;
  for (std::size_t j = 0; j < u_grid.size(); ++j) {
    const Point& u = u_grid[j];
    double re = 0.0, im = 0.0;
    for (const auto& x : samples) {
      const double phase = u.dot(x);
      re += std::cos(phase);
      im += std::sin(phase);
    }
    const std::complex<double> emp(re / n, im / n);
    const std::complex<double> th = char_function(law, u);
    const double se = std::sqrt(std::max(0.0, 1.0 - std::norm(emp)) / n);
    const double gap = std::abs(emp - th);
    r.empirical.push_back(emp);
    r.theoretical.push_back(th);
    r.standard_error.push_back(se);
    r.abs_gap.push_back(gap);
    if (gap > r.max_abs_gap) {
      r.max_abs_gap = gap;
      r.argmax = j;
    }
    r.max_standard_error = std::max(r.max_standard_error, se);
    // Directions orthogonal to every atom give |phi_hat| = 1 and SE = 0; a gap
    // at round-off level there is not evidence against the law.
    const double g = gap > 1e-12 ? gap : 0.0;
    const double ratio = se > 0.0 ? g / se : (g > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    r.max_gap_in_se = std::max(r.max_gap_in_se, ratio);
  }
  return r;
}

namespace {

// Sum of |x_i - y_j| over the given index ranges of a pooled sample.
double pair_sum(const std::vector<const Point*>& pool, std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1) {
  double s = 0.0;
  for (std::size_t i = a0; i < a1; ++i) {
    for (std::size_t j = b0; j < b1; ++j) s += (*pool[i] - *pool[j]).norm();
  }
  return s;
}

double energy_of_pool(const std::vector<const Point*>& pool, std::size_t na) {
  const std::size_t n = pool.size();
  const double a = static_cast<double>(na), b = static_cast<double>(n - na);
  const double ab = pair_sum(pool, 0, na, na, n);
  // Within-sample sums over unordered pairs, doubled for ordered pairs.
  double aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < na; ++i) aa += pair_sum(pool, i, i + 1, i + 1, na);
  for (std::size_t i = na; i < n; ++i) bb += pair_sum(pool, i, i + 1, i + 1, n);
  return 2.0 * ab / (a * b) - 2.0 * aa / (a * a) - 2.0 * bb / (b * b);
}

std::vector<const Point*> pooled(const std::vector<Point>& a, const std::vector<Point>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("energy_distance: samples must be nonempty");
  std::vector<const Point*> pool;
  pool.reserve(a.size() + b.size());
  for (const auto& x : a) pool.push_back(&x);
  for (const auto& x : b) {
    if (x.size() != a.front().size()) throw std::invalid_argument("energy_distance: dimension mismatch");
    pool.push_back(&x);
  }
  return pool;
}

}  // namespace

double energy_distance(const std::vector<Point>& a, const std::vector<Point>& b) {
  return std::max(0.0, energy_of_pool(pooled(a, b), a.size()));
}

PermutationTest energy_permutation_test(const std::vector<Point>& a, const std::vector<Point>& b, int permutations,
                                        Philox& rng) {
  if (permutations < 1) throw std::invalid_argument("energy_permutation_test: permutations must be >= 1");
  auto pool = pooled(a, b);
  PermutationTest t;
  t.statistic = std::max(0.0, energy_of_pool(pool, a.size()));
  int at_least = 0;
  for (int p = 0; p < permutations; ++p) {
    std::shuffle(pool.begin(), pool.end(), rng);
    const double e = std::max(0.0, energy_of_pool(pool, a.size()));
    t.null_distribution.push_back(e);
    if (e >= t.statistic) ++at_least;
  }
  std::sort(t.null_distribution.begin(), t.null_distribution.end());
  t.quantile95 = quantile(t.null_distribution, 0.95);
  t.quantile99 = quantile(t.null_distribution, 0.99);
  t.p_value = (1.0 + at_least) / (1.0 + permutations);
  return t;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q must lie in [0, 1]");
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

QuantileStability quantile_stability(const std::map<std::int64_t, std::vector<double>>& series, double q,
                                     double threshold) {
  if (series.size() < 2) throw std::invalid_argument("quantile_stability: need at least two values of n");
  QuantileStability r;
  r.q = q;
  r.threshold = threshold;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& [n, values] : series) {
    const double v = quantile(values, q);
    r.quantiles[n] = v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  r.spread = hi == lo ? 0.0 : (lo > 0.0 ? hi / lo - 1.0 : std::numeric_limits<double>::infinity());
  r.pass = r.spread < threshold;
  return r;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: samples must be nonempty");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsResult r;
  r.statistic = d;
  r.critical_1pct = 1.628 * std::sqrt((na + nb) / (na * nb));
  r.reject_1pct = d > r.critical_1pct;
  return r;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256: digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

nlohmann::ordered_json make_report(const std::string& estimator, const std::string& inputs_digest,
                                   nlohmann::ordered_json numbers, bool pass, nlohmann::ordered_json threshold,
                                   std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["estimator"] = estimator;
  j["inputs_digest"] = inputs_digest;
  j["numbers"] = std::move(numbers);
  j["pass"] = pass;
  j["threshold"] = std::move(threshold);
  j["seed"] = seed;
  return j;
}

nlohmann::ordered_json to_json(const TailEstimate& t) {
  return {{"alpha_hat", t.alpha_hat}, {"k", t.k}, {"standard_error", t.standard_error}, {"sample_size", t.sample_size}};
}

nlohmann::ordered_json to_json(const EcfReport& r) {
  nlohmann::ordered_json grid = nlohmann::ordered_json::array();
  for (std::size_t j = 0; j < r.u_grid.size(); ++j) {
    grid.push_back({{"u", std::vector<double>(r.u_grid[j].data(), r.u_grid[j].data() + r.u_grid[j].size())},
                    {"empirical", {r.empirical[j].real(), r.empirical[j].imag()}},
                    {"theoretical", {r.theoretical[j].real(), r.theoretical[j].imag()}},
                    {"abs_gap", r.abs_gap[j]},
                    {"standard_error", r.standard_error[j]}});
  }
  return {{"max_abs_gap", r.max_abs_gap},
          {"max_standard_error", r.max_standard_error},
          {"max_gap_in_se", r.max_gap_in_se},
          {"grid", grid}};
}

nlohmann::ordered_json to_json(const QuantileStability& q) {
  nlohmann::ordered_json per_n = nlohmann::ordered_json::object();
  for (const auto& [n, v] : q.quantiles) per_n[std::to_string(n)] = v;
  return {{"q", q.q}, {"quantiles", per_n}, {"spread", q.spread}, {"threshold", q.threshold}, {"pass", q.pass}};
}

}  // namespace marcuslab
