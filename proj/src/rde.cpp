#include "marcuslab/rde.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "marcuslab/errors.hpp"
#include "marcuslab/pvariation.hpp"

namespace marcuslab {

DriverPath::DriverPath(CadlagPath w_, DriftClock clock_) : w(std::move(w_)), clock(clock_) {
  if (w.value(0).norm() != 0.0) throw std::invalid_argument("DriverPath: driver must start at 0");
}

namespace {

// RK4 integrator for dPi/ds = b(Pi) dw + a(Pi) dt on s in [0, 1] with
// preallocated work vectors.
class Flow {
 public:
  explicit Flow(const VectorField& field)
      : field_(field), k1_(field.state_dim()), k2_(k1_), k3_(k1_), k4_(k1_), tmp_(k1_), drift_(k1_) {}

  void rhs(const Point& x, const Point& dw, double dt, Point& out) {
    field_.noise_apply(x, dw, out);
    if (dt != 0.0) {
      field_.drift(x, drift_);
      out += dt * drift_;
    }
  }

  // Advances x in place; the optional trace receives steps + 1 columns.
  void integrate(Point& x, const Point& dw, double dt, int steps, Eigen::MatrixXd* trace = nullptr) {
    if (steps < 1) throw std::invalid_argument("flow: ode steps must be >= 1");
    const double h = 1.0 / steps;
    if (trace) {
      trace->resize(x.size(), steps + 1);
      trace->col(0) = x;
    }
    for (int s = 0; s < steps; ++s) {
      rhs(x, dw, dt, k1_);
      tmp_ = x + 0.5 * h * k1_;
      rhs(tmp_, dw, dt, k2_);
      tmp_ = x + 0.5 * h * k2_;
      rhs(tmp_, dw, dt, k3_);
      tmp_ = x + h * k3_;
      rhs(tmp_, dw, dt, k4_);
      x += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
      if (!x.allFinite()) throw NonFinite("flow: solution left the representable range");
      if (trace) trace->col(s + 1) = x;
    }
  }

  // Doubles the step count until successive endpoints agree to opts.refine_tol.
  void integrate_refined(Point& x, const Point& dw, double dt, int steps, const SolverOptions& opts) {
    Point coarse = x;
    integrate(coarse, dw, dt, steps);
    if (!opts.refine) {
      x = coarse;
      return;
    }
    for (int k = 0; k < opts.max_doublings; ++k) {
      steps *= 2;
      Point fine = x;
      integrate(fine, dw, dt, steps);
      const bool done = (fine - coarse).norm() < opts.refine_tol;
      coarse = std::move(fine);
      if (done) break;
    }
    x = coarse;
  }

  void forward_step(Point& x, const Point& dw, double dt) {
    rhs(x, dw, dt, k1_);
    x += k1_;
    if (!x.allFinite()) throw NonFinite("forward step: solution left the representable range");
  }

 private:
  const VectorField& field_;
  Point k1_, k2_, k3_, k4_, tmp_, drift_;
};

void check_dims(const DriverPath& driver, const VectorField& field, const Point& xi) {
  if (driver.dimension() != field.noise_dim()) throw std::invalid_argument("driver dimension != noise dimension");
  if (xi.size() != field.state_dim()) throw std::invalid_argument("initial condition dimension != state dimension");
}

enum class JumpRule { Forward, Marcus };

CadlagPath solve(const DriverPath& driver, const VectorField& field, const Point& xi, const SolverOptions& opts,
                 JumpRule rule) {
  check_dims(driver, field, xi);
  const CadlagPath& w = driver.w;
  Flow flow(field);
  Eigen::MatrixXd out(field.state_dim(), static_cast<Eigen::Index>(w.size()));
  Point x = xi;
  out.col(0) = x;
  Point dw(w.dimension());
  for (std::size_t i = 1; i < w.size(); ++i) {
    const auto j = static_cast<Eigen::Index>(i);
    const double dt = w.time(i) - w.time(i - 1);
    dw = w.values().col(j) - w.values().col(j - 1);
    if (driver.clock == DriftClock::Continuous) {
      if (dt > 0.0) flow.integrate_refined(x, Point::Zero(dw.size()), dt, opts.drift_steps, opts);
      if (dw.squaredNorm() > 0.0) {
        if (rule == JumpRule::Forward) {
          flow.forward_step(x, dw, 0.0);
        } else {
          flow.integrate_refined(x, dw, 0.0, opts.bridge_steps, opts);
        }
      }
    } else if (rule == JumpRule::Forward) {
      flow.forward_step(x, dw, dt);
    } else {
      flow.integrate_refined(x, dw, dt, opts.bridge_steps, opts);
    }
    out.col(j) = x;
  }
  return CadlagPath(w.times(), std::move(out), w.horizon());
}

}  // namespace

Eigen::MatrixXd flow_bridge(const VectorField& field, const Point& x, const Point& w1, const Point& w2, int ode_steps) {
  Flow flow(field);
  Point y = x;
  Eigen::MatrixXd trace;
  flow.integrate(y, w2 - w1, 0.0, ode_steps, &trace);
  return trace;
}

Point flow_endpoint(const VectorField& field, const Point& x, const Point& dw, double dt, int ode_steps) {
  Flow flow(field);
  Point y = x;
  flow.integrate(y, dw, dt, ode_steps);
  return y;
}

Point marcus_jump(const VectorField& field, const Point& x, const Point& dw, int ode_steps) {
  if (dw.squaredNorm() == 0.0) return x;
  return flow_endpoint(field, x, dw, 0.0, ode_steps);
}

Point forward_jump(const VectorField& field, const Point& x, const Point& dw) {
  Point out(x.size());
  field.noise_apply(x, dw, out);
  return x + out;
}

SolutionPair forward_solve(const DriverPath& driver, const VectorField& field, const Point& xi,
                           const SolverOptions& opts) {
  return {driver, solve(driver, field, xi, opts, JumpRule::Forward), PathFunction::linear()};
}

SolutionPair marcus_solve(const DriverPath& driver, const VectorField& field, const Point& xi,
                          const SolverOptions& opts) {
  return {driver, solve(driver, field, xi, opts, JumpRule::Marcus), PathFunction::flow_bridge(field, opts.bridge_steps)};
}

SolutionPair marcus_solve_embedded(const DriverPath& driver, const VectorField& field, const Point& xi,
                                   const SolverOptions& opts, const EmbedOptions& embed_opts) {
  check_dims(driver, field, xi);
  const CadlagPath& w = driver.w;
  const bool stepped = driver.clock == DriftClock::Stepped;
  const int d = w.dimension();

  // Stepped clock: embed the pair (V, W) with V(t_i) = t_i so time jumps with W.
  CadlagPath base = w;
  if (stepped) {
    Eigen::MatrixXd v(1, static_cast<Eigen::Index>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) v(0, static_cast<Eigen::Index>(i)) = w.time(i);
    base = CadlagPath::stack(CadlagPath(w.times(), v, w.horizon()), w);
  }
  const EmbeddedPath emb = embed(base, PathFunction::linear(), embed_opts);

  Flow flow(field);
  Point x = xi;
  std::vector<Point> at_vertex;
  at_vertex.reserve(emb.clock.size());
  at_vertex.push_back(x);
  for (std::size_t k = 1; k < emb.clock.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const Point inc = emb.values.col(kk) - emb.values.col(kk - 1);
    double dt = 0.0;
    Point dw;
    if (stepped) {
      dt = inc[0];
      dw = inc.tail(d);
    } else {
      dt = emb.clock[k] - emb.clock[k - 1];
      dw = inc;
    }
    if (dw.squaredNorm() > 0.0) {
      flow.integrate_refined(x, dw, dt, opts.bridge_steps, opts);
    } else if (dt != 0.0) {
      flow.integrate_refined(x, dw, dt, stepped ? opts.bridge_steps : opts.drift_steps, opts);
    }
    at_vertex.push_back(x);
  }
  Eigen::MatrixXd out(field.state_dim(), static_cast<Eigen::Index>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = at_vertex[emb.anchors[i]];
  return {driver, CadlagPath(w.times(), std::move(out), w.horizon()),
          PathFunction::flow_bridge(field, opts.bridge_steps)};
}

GapReport marcus_forward_gap(const DriverPath& driver, const VectorField& field, const Point& xi, double p,
                             double k_hat, const SolverOptions& opts) {
  const CadlagPath fwd = forward_solve(driver, field, xi, opts).solution;
  const CadlagPath mar = marcus_solve(driver, field, xi, opts).solution;
  const Eigen::MatrixXd diff = fwd.values() - mar.values();
  GapReport r;
  r.pvar_gap = p_variation(diff, p);
  r.sup_gap = diff.colwise().norm().maxCoeff();
  r.jump_sum_sq = jump_sum_sq(driver.w);
  if (driver.clock == DriftClock::Stepped) {
    for (std::size_t i = 1; i < driver.w.size(); ++i) {
      const double dt = driver.w.time(i) - driver.w.time(i - 1);
      r.jump_sum_sq += dt * dt;
    }
  }
  r.bound = field.lip_bound() * field.sup_bound() * k_hat * r.jump_sum_sq;
  return r;
}

}  // namespace marcuslab
