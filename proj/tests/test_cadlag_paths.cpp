#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "marcuslab/cadlag_path.hpp"
#include "marcuslab/errors.hpp"
#include "marcuslab/path_function.hpp"
#include "marcuslab/pvariation.hpp"
#include "marcuslab/rng.hpp"
#include "marcuslab/skorokhod.hpp"
#include "marcuslab/vector_field.hpp"

using namespace marcuslab;

namespace {

CadlagPath scalar_path(std::vector<double> t, const std::vector<double>& x, double horizon = 1.0) {
  Eigen::MatrixXd v(1, static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) v(0, static_cast<Eigen::Index>(i)) = x[i];
  return CadlagPath(std::move(t), v, horizon);
}

// Random step path on a uniform grid.
CadlagPath random_path(Philox& rng, int n, int d) {
  std::vector<double> t(static_cast<std::size_t>(n));
  Eigen::MatrixXd v(d, n);
  v.col(0).setZero();
  for (int i = 0; i < n; ++i) {
    t[static_cast<std::size_t>(i)] = static_cast<double>(i) / n;
    if (i > 0) {
      for (int c = 0; c < d; ++c) v(c, i) = v(c, i - 1) + rng.normal();
    }
  }
  return CadlagPath(t, v, 1.0);
}

// Exhaustive p-variation written independently of the library: recursive
// enumeration of all kept subsets.
double exhaustive(const Eigen::MatrixXd& x, double p, Eigen::Index last, Eigen::Index i) {
  const Eigen::Index n = x.cols();
  if (i == n - 1) return std::pow((x.col(n - 1) - x.col(last)).norm(), p);
  const double skip = exhaustive(x, p, last, i + 1);
  const double keep = std::pow((x.col(i) - x.col(last)).norm(), p) + exhaustive(x, p, i, i + 1);
  return std::max(skip, keep);
}

}  // namespace

TEST_CASE("CadlagPath evaluation") {
  const CadlagPath w = scalar_path({0.0, 0.5, 0.75}, {0.0, 1.0, 3.0});
  CHECK(w.at(0.0)(0) == 0.0);
  CHECK(w.at(0.49)(0) == 0.0);
  CHECK(w.at(0.5)(0) == 1.0);
  CHECK(w.at(1.0)(0) == 3.0);
  CHECK(w.left_limit(0.5)(0) == 0.0);
  CHECK(w.left_limit(0.0)(0) == 0.0);
  CHECK(w.jump_size(0) == 0.0);
  CHECK(w.jump_size(2) == 2.0);
  CHECK(w.scaled(-2.0).value(2)(0) == -6.0);
  const CadlagPath r = w.restricted(1, 2);
  CHECK(r.size() == 2);
  CHECK(r.time(0) == 0.0);
  const CadlagPath s = CadlagPath::stack(w, w.scaled(2.0));
  CHECK(s.dimension() == 2);
  CHECK(s.components(1, 1).value(2)(0) == 6.0);
  CHECK(CadlagPath::constant(Point::Ones(3)).dimension() == 3);
}

TEST_CASE("CadlagPath rejects bad grids") {
  CHECK_THROWS_AS(scalar_path({0.1, 0.5}, {0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(scalar_path({0.0, 0.5, 0.5}, {0.0, 1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(scalar_path({0.0, 0.5}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(scalar_path({0.0, 2.0}, {0.0, 1.0}, 1.0), std::invalid_argument);
}

TEST_CASE("CSV round trip is exact") {
  Philox rng(1, 0);
  const CadlagPath w = random_path(rng, 50, 2);
  std::stringstream ss;
  write_csv(ss, w);
  const std::string text = ss.str();
  CHECK(text.rfind("t,x1,x2\n", 0) == 0);
  const CadlagPath back = read_csv(ss);
  CHECK(back.times() == w.times());
  CHECK(back.values() == w.values());
  std::stringstream named;
  write_csv(named, w, {"a", "b"});
  CHECK(named.str().rfind("t,a,b\n", 0) == 0);
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("p-variation examples") {
  const CadlagPath up_down = scalar_path({0.0, 0.5, 1.0}, {0.0, 1.0, 0.0});
  CHECK(p_variation(up_down, 1.0) == doctest::Approx(2.0));
  CHECK(p_variation(up_down, 2.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(p_variation(scalar_path({0.0, 0.5, 1.0}, {0.0, 1.0, 2.0}), 2.0) == doctest::Approx(2.0));
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    CHECK(p_variation_bruteforce(scalar_path({0.0, 0.5}, {0.0, 2.5}), p) == doctest::Approx(2.5));
    CHECK(p_variation_bruteforce(CadlagPath::constant(Point::Ones(2)), p) == 0.0);
    CHECK(p_variation(CadlagPath::constant(Point::Ones(2)), p) == 0.0);
  }
  CHECK_THROWS(p_variation(up_down, 0.5));
}

TEST_CASE("p-variation oracle equivalence on random step paths") {
  Philox rng(2, 0);
  int equal = 0;
  for (int i = 0; i < 200; ++i) {
    const int n = 2 + static_cast<int>(rng() % 11);
    const int d = 1 + static_cast<int>(rng() % 3);
    const CadlagPath w = random_path(rng, n, d);
    bool ok = true;
    for (double p : {1.0, 1.3, 1.7, 2.0}) {
      const double bf = p_variation_bruteforce(w, p);
      ok = ok && p_variation(w, p) == bf && p_variation_tree(w.values(), p, 1) == bf &&
           p_variation_quadratic(w.values(), p) == bf;
      // Independent recursive enumeration; summation order may differ so compare to rounding.
      const double ref = std::pow(exhaustive(w.values(), p, 0, 1), 1.0 / p);
      CHECK(bf == doctest::Approx(ref).epsilon(1e-12));
    }
    if (ok) ++equal;
  }
  CHECK(equal == 200);
  CHECK_THROWS_AS(p_variation_bruteforce(random_path(rng, 15, 1), 2.0), TooLarge);
}

TEST_CASE("pruned programme equals the unpruned one on long paths") {
  Philox rng(3, 0);
  for (int n : {65, 500, 3000}) {
    for (double p : {1.0, 1.3, 1.7, 2.5}) {
      const CadlagPath w = random_path(rng, n, 2);
      const double q = p_variation_quadratic(w.values(), p);
      CHECK(p_variation(w, p) == q);
      CHECK(p_variation_tree(w.values(), p, 4) == q);
    }
  }
}

TEST_CASE("p-variation properties") {
  Philox rng(4, 0);
  for (int i = 0; i < 20; ++i) {
    const CadlagPath w = random_path(rng, 200, 2);
    double tv = 0.0;
    for (std::size_t k = 1; k < w.size(); ++k) tv += w.jump_size(k);
    CHECK(p_variation(w, 1.0) == doctest::Approx(tv));
    double prev = p_variation(w, 1.0);
    for (double p : {1.2, 1.5, 2.0, 3.0}) {
      const double v = p_variation(w, p);
      CHECK(v <= prev * (1.0 + 1e-12));
      prev = v;
      CHECK(p_variation(w.scaled(-3.0), p) == doctest::Approx(3.0 * v));
      CHECK(p_variation(w.restricted(20, 120), p) <= v * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("jump_sum_sq") {
  CHECK(jump_sum_sq(scalar_path({0.0, 0.3, 0.6}, {0.0, 3.0, 7.0})) == 25.0);
  CHECK(jump_sum_sq(CadlagPath::constant(Point::Zero(2))) == 0.0);
}

TEST_CASE("embedding: single jump, constant path, round trip") {
  const CadlagPath jump = scalar_path({0.0, 0.4}, {0.0, 1.7});
  const EmbeddedPath e = embed(jump, PathFunction::linear());
  for (std::size_t i = 1; i < e.times.size(); ++i) {
    CHECK(e.times[i] >= e.times[i - 1]);
    CHECK(e.values(0, static_cast<Eigen::Index>(i)) >= e.values(0, static_cast<Eigen::Index>(i - 1)));
  }
  CHECK(e.values(0, e.values.cols() - 1) == doctest::Approx(1.7));
  for (double p : {1.0, 1.5, 2.0}) CHECK(p_variation(e.values, p) == doctest::Approx(1.7));
  CHECK(e.times.back() == doctest::Approx(1.0));

  const EmbeddedPath c = embed(CadlagPath::constant(Point::Ones(2)), PathFunction::linear());
  CHECK((c.values.colwise() - Point::Ones(2)).norm() == 0.0);

  Philox rng(5, 0);
  for (int i = 0; i < 10; ++i) {
    const CadlagPath w = random_path(rng, 300, 2);
    EmbedOptions opts;
    opts.max_jumps = 40;
    const CadlagPath back = embed(w, PathFunction::linear(), opts).remove_fictitious_time();
    CHECK(back.times() == w.times());
    CHECK(back.values() == w.values());
  }
}

TEST_CASE("embedding: jump order and invariance of p-variation") {
  const CadlagPath w = scalar_path({0.0, 0.2, 0.4, 0.6}, {0.0, 1.0, 2.0, 0.5});
  const EmbeddedPath e = embed(w, PathFunction::linear());
  REQUIRE(e.jump_order.size() == 3);
  CHECK(e.jump_order[0] == 3);  // |-1.5|
  CHECK(e.jump_order[1] == 1);  // tie at 1.0, earlier time first
  CHECK(e.jump_order[2] == 2);

  Philox rng(6, 0);
  const CadlagPath r = random_path(rng, 60, 2);
  const double ref = p_variation(r, 1.5);
  for (double delta : {1.0, 0.1}) {
    for (RWeights rule : {RWeights::Geometric, RWeights::InverseSquare}) {
      EmbedOptions opts;
      opts.delta = delta;
      opts.weights = rule;
      CHECK(p_variation(embed(r, PathFunction::linear(), opts).values, 1.5) == doctest::Approx(ref).epsilon(1e-12));
    }
  }
  CHECK(r_weight(RWeights::Geometric, 3) == 0.125);
}

TEST_CASE("flow path function endpoints and domain") {
  const VectorField rot = rotation_field(1, 2.0);
  const PathFunction phi = PathFunction::flow_bridge(rot, 64);
  Point from(3), to(3);
  from << 0.0, 1.0, 0.0;
  to << std::acos(-1.0) / 2.0, 0.0, 1.0;
  CHECK(phi.admissible(from, to));
  const Eigen::MatrixXd b = phi.bridge(from, to);
  CHECK((b.col(0) - from).norm() == 0.0);
  CHECK((b.col(b.cols() - 1) - to).norm() < 1e-8);
  Point bad = to;
  bad(1) = 0.5;
  CHECK_FALSE(phi.admissible(from, bad));
  CHECK_THROWS_AS(phi.bridge(from, bad), DomainViolation);
  Eigen::MatrixXd v(3, 2);
  v.col(0) = from;
  v.col(1) = bad;
  CHECK_THROWS_AS(embed(CadlagPath({0.0, 0.5}, v, 1.0), phi), DomainViolation);
  const Eigen::MatrixXd lin = PathFunction::linear().bridge(from, bad);
  CHECK(lin.cols() == 2);
}

TEST_CASE("Skorokhod distance examples") {
  const CadlagPath step = scalar_path({0.0, 0.5}, {0.0, 1.0});
  CHECK(sj1_distance(step, step, 0.01) == 0.0);
  CHECK(sm1_distance(step, step, 0.01) == 0.0);
  const double eps = 0.01;
  const CadlagPath shifted = scalar_path({0.0, 0.5 + eps}, {0.0, 1.0});
  CHECK(sj1_distance(step, shifted, 0.001) <= eps + 1e-12);
  CHECK(sj1_distance(step, CadlagPath::constant(Point::Zero(1)), 0.01) >= 0.5);

  for (int n : {10, 100, 1000}) {
    std::vector<double> t{0.0, 0.5};
    std::vector<double> x{0.0, 0.0};
    for (int j = 1; j <= 32; ++j) {
      t.push_back(0.5 + j / (32.0 * n));
      x.push_back(j / 32.0);
    }
    const CadlagPath ramp = scalar_path(t, x);
    CHECK(sm1_distance(step, ramp, 0.001) <= 1.0 / n + 0.001 + 1e-12);
  }
}

TEST_CASE("SM1 is dominated by SJ1; both symmetric") {
  Philox rng(7, 0);
  for (int i = 0; i < 100; ++i) {
    const CadlagPath a = random_path(rng, 8, 1).scaled(0.3);
    const CadlagPath b = random_path(rng, 5, 1).scaled(0.3);
    const double j = sj1_distance(a, b, 0.05);
    const double m = sm1_distance(a, b, 0.05);
    CHECK(m <= j + 1e-12);
    CHECK(sj1_distance(b, a, 0.05) == doctest::Approx(j));
    CHECK(sm1_distance(b, a, 0.05) == doctest::Approx(m));
  }
}

TEST_CASE("Skorokhod triangle inequality on sampled grids") {
  Philox rng(8, 0);
  for (int i = 0; i < 30; ++i) {
    const CadlagPath a = random_path(rng, 6, 1).scaled(0.2);
    const CadlagPath b = random_path(rng, 6, 1).scaled(0.2);
    const CadlagPath c = random_path(rng, 6, 1).scaled(0.2);
    const double res = 0.02;
    CHECK(sj1_distance(a, c, res) <= sj1_distance(a, b, res) + sj1_distance(b, c, res) + 2 * res);
    CHECK(sm1_distance(a, c, res) <= sm1_distance(a, b, res) + sm1_distance(b, c, res) + 2 * res);
  }
}
