#pragma once

#include <Eigen/Dense>

#include "marcuslab/cadlag_path.hpp"
#include "marcuslab/path_function.hpp"
#include "marcuslab/vector_field.hpp"

namespace marcuslab {

/// How the drift clock enters a step driver.
///  Continuous: dX = a(X) dt between driver jumps (RK4), jumps only in W.
///  Stepped: the clock is the step path V(t) = t_i on [t_i, t_{i+1}); its
///  increment is applied together with the W increment at every sample time,
///  which makes the forward scheme the explicit iteration
///  x_{i} = x_{i-1} + a(x_{i-1}) dt_i + b(x_{i-1}) dW_i.
enum class DriftClock { Continuous, Stepped };

struct DriverPath {
  DriverPath(CadlagPath w, DriftClock clock = DriftClock::Continuous);
  CadlagPath w;
  DriftClock clock;
  int dimension() const { return w.dimension(); }
};

struct SolverOptions {
  int bridge_steps = 64;     // RK4 steps per jump bridge
  int drift_steps = 16;      // RK4 steps per inter-jump drift cell
  bool refine = true;        // double steps until successive results agree
  double refine_tol = 1e-9;
  int max_doublings = 10;
};

struct SolutionPair {
  DriverPath driver;
  CadlagPath solution;
  PathFunction path_function;
  /// (W, X) side by side on the common grid.
  CadlagPath pair() const { return CadlagPath::stack(driver.w, solution); }
};

/// Classical RK4 for dPi/ds = b(Pi)(w2 - w1) on s in [0, 1]; returns the
/// ode_steps + 1 samples as columns. Throws NonFinite on blow-up.
Eigen::MatrixXd flow_bridge(const VectorField& field, const Point& x, const Point& w1, const Point& w2, int ode_steps);

/// Time-1 value of the flow above with an additional drift increment dt:
/// dPi/ds = b(Pi) dw + a(Pi) dt.
Point flow_endpoint(const VectorField& field, const Point& x, const Point& dw, double dt, int ode_steps);

/// Geometric jump: endpoint of flow_bridge across dw.
Point marcus_jump(const VectorField& field, const Point& x, const Point& dw, int ode_steps = 64);

/// Forward jump x + b(x) dw.
Point forward_jump(const VectorField& field, const Point& x, const Point& dw);

/// Forward (Ito-type) solution of dX = a(X) dt + b(X^-) dW.
SolutionPair forward_solve(const DriverPath& driver, const VectorField& field, const Point& xi,
                           const SolverOptions& opts = {});

/// Marcus solution dX = a(X) dt + b(X) <> dW via per-jump flow bridges.
SolutionPair marcus_solve(const DriverPath& driver, const VectorField& field, const Point& xi,
                          const SolverOptions& opts = {});

/// Marcus solution by the fictitious-time route: embed (t, W) with linear
/// bridges, integrate the continuous ODE along the embedded polyline, then
/// read the solution back at the original sample times.
SolutionPair marcus_solve_embedded(const DriverPath& driver, const VectorField& field, const Point& xi,
                                   const SolverOptions& opts = {}, const EmbedOptions& embed_opts = {});

struct GapReport {
  double pvar_gap = 0.0;     // ||X_forward - X_marcus||_{p-var}
  double bound = 0.0;        // lip * sup * K * sum |dW|^2
  double jump_sum_sq = 0.0;
  double sup_gap = 0.0;      // max_t |X_forward(t) - X_marcus(t)|
};

GapReport marcus_forward_gap(const DriverPath& driver, const VectorField& field, const Point& xi, double p = 1.5,
                             double k_hat = 1.0, const SolverOptions& opts = {});

}  // namespace marcuslab
