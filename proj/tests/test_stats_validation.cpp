#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "marcuslab/errors.hpp"
#include "marcuslab/rng.hpp"
#include "marcuslab/stable_levy.hpp"
#include "marcuslab/stats.hpp"

using namespace marcuslab;

namespace {

Point vec(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) p(i++) = x;
  return p;
}

std::vector<Point> normals(Philox& rng, int n, int d, double shift = 0.0) {
  std::vector<Point> out;
  for (int i = 0; i < n; ++i) {
    Point p(d);
    for (int c = 0; c < d; ++c) p(c) = rng.normal() + (c == 0 ? shift : 0.0);
    out.push_back(p);
  }
  return out;
}

}  // namespace

TEST_CASE("Hill estimator") {
  // Deterministic Pareto(alpha) quantile sample: x_i = (i / N)^{-1/alpha}.
  for (double alpha : {1.2, 1.5, 1.8}) {
    std::vector<double> xs;
    const int n = 100000;
    for (int i = 1; i <= n; ++i) xs.push_back(std::pow((i - 0.5) / n, -1.0 / alpha));
    const TailEstimate t = hill_estimator(xs, default_hill_k(xs.size()));
    CHECK(t.k == static_cast<int>(std::floor(std::pow(1e5, 0.6))));
    CHECK(std::abs(t.alpha_hat - alpha) < 2.0 * t.standard_error);
    CHECK(t.standard_error == doctest::Approx(t.alpha_hat / std::sqrt(t.k)));

    std::vector<double> scaled = xs;
    for (double& x : scaled) x *= 7.5;
    CHECK(hill_estimator(scaled, t.k).alpha_hat == doctest::Approx(t.alpha_hat).epsilon(1e-12));
    std::vector<double> shuffled = xs;
    std::reverse(shuffled.begin(), shuffled.end());
    CHECK(hill_estimator(shuffled, t.k).alpha_hat == t.alpha_hat);
  }
  CHECK_THROWS_AS(hill_estimator(std::vector<double>(100, 3.0), 10), DegenerateSample);
  CHECK_THROWS_AS(hill_estimator({1.0, 2.0}, 5), std::invalid_argument);
}

TEST_CASE("empirical characteristic function distance") {
  const StableLaw law(1.5, SpectralMeasure({{vec({1.0}), 0.8}}));
  Philox rng(1, 0);
  std::vector<Point> xs;
  for (int i = 0; i < 20000; ++i) xs.push_back(sample_stable_vector(law, rng));
  std::vector<Point> grid = default_u_grid(law);
  CHECK(grid.size() == 10);
  grid.push_back(vec({0.0}));
  const EcfReport r = ecf_distance(xs, law, grid);
  CHECK(r.abs_gap.back() < 1e-12);
  CHECK(r.max_gap_in_se < 3.5);

  std::vector<Point> permuted(xs.rbegin(), xs.rend());
  const EcfReport p = ecf_distance(permuted, law, grid);
  CHECK(p.max_abs_gap == doctest::Approx(r.max_abs_gap).epsilon(1e-12));

  // All-zero sample: ECF is 1 everywhere, so the gap at u is 1 - |phi(u)|.
  const std::vector<Point> zeros(2000, vec({0.0}));
  const EcfReport z = ecf_distance(zeros, law, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(z.abs_gap[i] == doctest::Approx(std::abs(1.0 - char_function(law, grid[i]))).epsilon(1e-12));
  }
  CHECK(z.max_gap_in_se > 100.0);
  CHECK_THROWS_AS(ecf_distance(std::vector<Point>(999, vec({0.0})), law, grid), std::invalid_argument);
}

TEST_CASE("energy distance and permutation test") {
  Philox rng(2, 0);
  const auto a = normals(rng, 300, 2);
  const auto b = normals(rng, 300, 2);
  const auto shifted = normals(rng, 300, 2, 1.0);
  CHECK(energy_distance(a, a) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(energy_distance(a, b) == doctest::Approx(energy_distance(b, a)).epsilon(1e-12));
  CHECK(energy_distance(a, b) >= 0.0);
  // sqrt of the energy distance is a metric on distributions.
  const double ab = std::sqrt(energy_distance(a, b)), bc = std::sqrt(energy_distance(b, shifted)),
               ac = std::sqrt(energy_distance(a, shifted));
  CHECK(ac <= ab + bc + 1e-12);

  Philox prng(3, 0);
  const PermutationTest same = energy_permutation_test(a, b, 99, prng);
  const PermutationTest diff = energy_permutation_test(a, shifted, 99, prng);
  CHECK(diff.statistic > diff.quantile99);
  CHECK(diff.p_value == doctest::Approx(0.01));
  CHECK(same.null_distribution.size() == 99);
  CHECK(std::is_sorted(same.null_distribution.begin(), same.null_distribution.end()));
  CHECK(same.quantile95 <= same.quantile99);
  CHECK(same.p_value > 0.01);
}

TEST_CASE("quantiles and stability") {
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.5) == 2.5);
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 1.0) == 4.0);
  CHECK(quantile({5.0, 1.0, 3.0}, 0.25) == 2.0);

  std::map<std::int64_t, std::vector<double>> constant{{10, std::vector<double>(50, 2.0)}, {100, std::vector<double>(50, 2.0)}};
  const QuantileStability c = quantile_stability(constant, 0.95, 0.25);
  CHECK(c.spread == 0.0);
  CHECK(c.pass);

  Philox rng(4, 0);
  std::map<std::int64_t, std::vector<double>> iid, growing;
  for (std::int64_t n : {1000, 10000, 100000}) {
    for (int i = 0; i < 2000; ++i) {
      const double x = std::abs(rng.normal());
      iid[n].push_back(x);
      growing[n].push_back(x * std::log(static_cast<double>(n)));
    }
  }
  CHECK(quantile_stability(iid, 0.95, 0.25).pass);
  const QuantileStability g = quantile_stability(growing, 0.95, 0.25);
  CHECK_FALSE(g.pass);
  CHECK(g.spread > 0.6);
}

TEST_CASE("two-sample KS") {
  Philox rng(5, 0);
  std::vector<double> a, b, c;
  for (int i = 0; i < 5000; ++i) {
    a.push_back(rng.normal());
    b.push_back(rng.normal());
    c.push_back(rng.normal() + 0.2);
  }
  const KsResult same = ks_two_sample(a, b);
  CHECK_FALSE(same.reject_1pct);
  CHECK(same.critical_1pct == doctest::Approx(1.628 * std::sqrt(2.0 / 5000.0)));
  CHECK(ks_two_sample(a, c).reject_1pct);
  CHECK(ks_two_sample({0.0, 1.0}, {2.0, 3.0}).statistic == 1.0);
}

TEST_CASE("digests and reports") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const auto r = make_report("hill", "abc", {{"alpha_hat", 1.5}}, true, {{"half_width", 0.1}}, 7);
  CHECK(r["estimator"] == "hill");
  CHECK(r["seed"] == 7);
  CHECK(r["pass"] == true);
}
