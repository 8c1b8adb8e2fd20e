#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "marcuslab/errors.hpp"
#include "marcuslab/rde.hpp"
#include "marcuslab/rng.hpp"
#include "marcuslab/vector_field.hpp"

using namespace marcuslab;

namespace {

Point vec(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) p(i++) = x;
  return p;
}

CadlagPath random_walk(Philox& rng, int n, int d, double scale) {
  std::vector<double> t(static_cast<std::size_t>(n) + 1);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(d, n + 1);
  for (int i = 0; i <= n; ++i) {
    t[static_cast<std::size_t>(i)] = static_cast<double>(i) / (n + 1);
    if (i > 0) {
      for (int c = 0; c < d; ++c) v(c, i) = v(c, i - 1) + scale * rng.normal();
    }
  }
  return CadlagPath(t, v, 1.0);
}

}  // namespace

TEST_CASE("flow bridge and Marcus jump examples") {
  const VectorField lin = scalar_linear_field(100.0);
  // For y' = h y one RK4 step multiplies by R(h/N); 64 steps give R(h/64)^64
  // exactly, which is 1.3e-9 away from e^1. 128 steps reach 1e-10.
  auto rk4_factor = [](double z) { return 1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0; };
  for (double h : {-1.0, 0.3, 0.9, 1.0}) {
    const Eigen::MatrixXd b = flow_bridge(lin, vec({1.0}), vec({0.0}), vec({h}), 64);
    CHECK(b.cols() == 65);
    CHECK(b(0, 0) == 1.0);
    CHECK(b(0, 64) == doctest::Approx(std::pow(rk4_factor(h / 64.0), 64)).epsilon(1e-14));
    CHECK(std::abs(b(0, 64) - std::exp(h)) < 2e-9);
    CHECK(std::abs(marcus_jump(lin, vec({1.0}), vec({h}), 128)(0) - std::exp(h)) < 1e-10);
  }
  const Eigen::MatrixXd flat = flow_bridge(lin, vec({2.0}), vec({0.4}), vec({0.4}), 8);
  CHECK((flat.array() == 2.0).all());
  CHECK(marcus_jump(lin, vec({2.0}), vec({0.0}))(0) == 2.0);
  CHECK_THROWS_AS(flow_bridge(lin, vec({1.0}), vec({0.0}), vec({1.0}), 0), std::invalid_argument);

  const VectorField rot = rotation_field(1, 10.0);
  const Point quarter = marcus_jump(rot, vec({1.0, 0.0}), vec({std::numbers::pi / 2.0}), 256);
  CHECK((quarter - vec({0.0, 1.0})).norm() < 1e-10);
  const Point full = marcus_jump(rot, vec({0.3, -0.4}), vec({2.0 * std::numbers::pi}), 256);
  CHECK((full - vec({0.3, -0.4})).norm() < 1e-8);

  Eigen::MatrixXd b(2, 2);
  b << 1.0, 2.0, -0.5, 0.25;
  const VectorField cst = constant_noise_field(b);
  const Point x = vec({0.1, 0.2}), dw = vec({0.7, -1.3});
  CHECK((marcus_jump(cst, x, dw) - (x + b * dw)).norm() < 1e-12);
  CHECK((forward_jump(cst, x, dw) - (x + b * dw)).norm() == 0.0);
  CHECK((forward_jump(rot, vec({1.0, 0.0}), vec({0.5})) - vec({1.0, 0.5})).norm() == 0.0);
}

TEST_CASE("forward solver examples") {
  Philox rng(1, 0);
  Eigen::MatrixXd b(2, 3);
  b << 1.0, 0.0, 2.0, 0.5, -1.0, 0.0;
  const CadlagPath w = random_walk(rng, 200, 3, 0.1);
  const Point xi = vec({1.0, -2.0});
  const SolutionPair fw = forward_solve(DriverPath(w), constant_noise_field(b), xi);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK((fw.solution.value(i) - (xi + b * (w.value(i) - w.value(0)))).norm() < 1e-12);
  }
  const SolutionPair mc = marcus_solve(DriverPath(w), constant_noise_field(b), xi);
  CHECK((mc.solution.value(w.size() - 1) - fw.solution.value(w.size() - 1)).norm() < 1e-12);

  // Pure decay drift with a zero driver.
  const VectorField decay = constant_noise_field(Eigen::MatrixXd::Zero(1, 1)).with_drift(decay_drift(1.0), "decay");
  const CadlagPath zero({0.0, 0.5, 1.0}, Eigen::MatrixXd::Zero(1, 3), 1.0);
  CHECK(std::abs(forward_solve(DriverPath(zero), decay, vec({1.0})).solution.at(1.0)(0) - std::exp(-1.0)) < 1e-8);
  CHECK(std::abs(marcus_solve(DriverPath(zero), decay, vec({1.0})).solution.at(1.0)(0) - std::exp(-1.0)) < 1e-8);
}

TEST_CASE("stepped clock reproduces the explicit iteration") {
  Philox rng(2, 0);
  const VectorField field = rotation_dilation_field(50.0).with_drift(decay_drift(0.7), "decay");
  const int n = 500;
  const CadlagPath w = random_walk(rng, n, 2, std::pow(static_cast<double>(n), -1.0 / 1.5));
  const Point xi = vec({0.5, 0.25});
  const SolutionPair fw = forward_solve(DriverPath(w, DriftClock::Stepped), field, xi);
  Point x = xi;
  for (std::size_t i = 1; i < w.size(); ++i) {
    const double dt = w.time(i) - w.time(i - 1);
    x = x + field.drift(x) * dt + field.noise(x) * (w.value(i) - w.value(i - 1));
    CHECK((fw.solution.value(i) - x).norm() <= 1e-12 * (1.0 + x.norm()));
  }
}

TEST_CASE("Marcus solution of a scalar linear equation is a product of exponentials") {
  Philox rng(3, 0);
  const VectorField lin = scalar_linear_field(1e6);
  const CadlagPath w = random_walk(rng, 100, 1, 0.2);
  const SolutionPair mc = marcus_solve(DriverPath(w), lin, vec({2.0}));
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double exact = 2.0 * std::exp(w.value(i)(0) - w.value(0)(0));
    CHECK(std::abs(mc.solution.value(i)(0) - exact) < 1e-9 * exact);
  }
}

TEST_CASE("rotation: Marcus preserves the norm, forward does not") {
  Philox rng(4, 0);
  const VectorField rot = rotation_field(1, 1e6);
  const CadlagPath w = random_walk(rng, 100, 1, 0.5);
  const Point xi = vec({0.6, 0.8});
  const SolutionPair mc = marcus_solve(DriverPath(w), rot, xi);
  const SolutionPair fw = forward_solve(DriverPath(w), rot, xi);
  double max_dev = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) max_dev = std::max(max_dev, std::abs(mc.solution.value(i).norm() - 1.0));
  CHECK(max_dev < 1e-8);
  CHECK(fw.solution.value(w.size() - 1).norm() > 1.5);
}

TEST_CASE("embedded and per-jump Marcus solutions agree") {
  Philox rng(5, 0);
  for (int k = 0; k < 50; ++k) {
    const int m = 1 + k % 3, d = 1 + (k / 3) % 2;
    const VectorField field = random_trig_field(m, d, rng);
    const CadlagPath w = random_walk(rng, 8 + k % 5, d, 0.5);
    Point xi(m);
    for (int i = 0; i < m; ++i) xi(i) = rng.normal();
    SolverOptions opts;
    opts.refine_tol = 1e-11;
    const SolutionPair a = marcus_solve(DriverPath(w), field, xi, opts);
    const SolutionPair b = marcus_solve_embedded(DriverPath(w), field, xi, opts);
    REQUIRE(a.solution.size() == b.solution.size());
    double err = 0.0;
    for (std::size_t i = 0; i < a.solution.size(); ++i) {
      err = std::max(err, (a.solution.value(i) - b.solution.value(i)).norm());
    }
    CHECK(err < 1e-8);
  }
}

TEST_CASE("forward and Marcus gap scales with the squared jump") {
  const VectorField lin = scalar_linear_field(100.0);
  std::vector<double> ratios;
  for (double h : {0.1, 0.01}) {
    const CadlagPath w({0.0, 0.5}, (Eigen::MatrixXd(1, 2) << 0.0, h).finished(), 1.0);
    const GapReport g = marcus_forward_gap(DriverPath(w), lin, vec({1.0}), 1.5);
    CHECK(g.jump_sum_sq == doctest::Approx(h * h));
    // Single jump: exp(h) - (1 + h) = h^2 / 2 + O(h^3).
    CHECK(g.sup_gap == doctest::Approx(std::exp(h) - 1.0 - h).epsilon(1e-8));
    CHECK(g.pvar_gap == doctest::Approx(g.sup_gap).epsilon(1e-8));
    CHECK(g.pvar_gap <= g.bound);
    ratios.push_back(g.jump_sum_sq / g.pvar_gap);
  }
  CHECK(ratios[1] / ratios[0] == doctest::Approx(1.0).epsilon(0.1));
  CHECK(ratios[0] == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("sampled bounds stay below recorded bounds") {
  Philox rng(6, 0);
  std::vector<VectorField> fields = {rotation_field(2, 3.0), rotation_dilation_field(3.0), scalar_linear_field(3.0),
                                     tanh_damped(rotation_dilation_field(3.0)), random_trig_field(2, 2, rng)};
  for (const VectorField& f : fields) {
    const double radius = std::isfinite(f.box_radius()) ? f.box_radius() : 10.0;
    const SampledBounds s = sample_bounds(f, radius, 2000, rng);
    CHECK(s.sup <= f.sup_bound() * (1.0 + 1e-9));
    CHECK(s.lip <= f.lip_bound() * (1.0 + 1e-6));
    CHECK(s.sup > 0.0);
  }
  const VectorField damped = tanh_damped(rotation_dilation_field(3.0));
  const SampledBounds far = sample_bounds(damped, 1000.0, 2000, rng);
  CHECK(far.sup <= damped.sup_bound() * (1.0 + 1e-9));
}

TEST_CASE("blow-up is reported") {
  const VectorField lin = scalar_linear_field(1e300);
  const CadlagPath w({0.0, 0.5}, (Eigen::MatrixXd(1, 2) << 0.0, 1000.0).finished(), 1.0);
  CHECK_THROWS_AS(marcus_solve(DriverPath(w), lin, vec({1.0})), NonFinite);
  CHECK_THROWS_AS(forward_solve(DriverPath(w), lin, vec({1.0, 2.0})), std::invalid_argument);
}
