#pragma once

#include <Eigen/Dense>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "marcuslab/cadlag_path.hpp"

namespace marcuslab {

class Philox;

/// Drift coefficient a : R^m -> R^m.
class DriftModel {
 public:
  virtual ~DriftModel() = default;
  virtual void eval(const Point& x, Point& out) const = 0;
};

/// Noise coefficient b : R^m -> R^{m x d}. `apply` computes b(x) h without
/// materialising the matrix; it is the hot path of every flow solve.
class NoiseModel {
 public:
  virtual ~NoiseModel() = default;
  virtual int state_dim() const = 0;
  virtual int noise_dim() const = 0;
  virtual Eigen::MatrixXd matrix(const Point& x) const = 0;
  virtual void apply(const Point& x, const Point& h, Point& out) const { out.noalias() = matrix(x) * h; }
};

/// Slow-equation coefficients (a, b) together with analytic bounds for b:
/// sup_bound >= sup |b(x)| and lip_bound >= sup |b(x) - b(y)| / |x - y|,
/// operator norms, over the recorded domain (all of R^m for bounded fields,
/// the ball |x| <= box_radius otherwise).
class VectorField {
 public:
  VectorField(std::shared_ptr<const DriftModel> drift, std::shared_ptr<const NoiseModel> noise, double sup_bound,
              double lip_bound, std::string name, double box_radius = std::numeric_limits<double>::infinity());

  int state_dim() const { return noise_->state_dim(); }
  int noise_dim() const { return noise_->noise_dim(); }

  void drift(const Point& x, Point& out) const { drift_->eval(x, out); }
  Point drift(const Point& x) const;
  Eigen::MatrixXd noise(const Point& x) const { return noise_->matrix(x); }
  void noise_apply(const Point& x, const Point& h, Point& out) const { noise_->apply(x, h, out); }

  double sup_bound() const { return sup_bound_; }
  double lip_bound() const { return lip_bound_; }
  double box_radius() const { return box_radius_; }
  const std::string& name() const { return name_; }

  const std::shared_ptr<const DriftModel>& drift_model() const { return drift_; }
  const std::shared_ptr<const NoiseModel>& noise_model() const { return noise_; }

  /// Same noise with a different drift.
  VectorField with_drift(std::shared_ptr<const DriftModel> drift, const std::string& drift_name) const;

 private:
  std::shared_ptr<const DriftModel> drift_;
  std::shared_ptr<const NoiseModel> noise_;
  double sup_bound_;
  double lip_bound_;
  std::string name_;
  double box_radius_;
};

// Drift catalog.
std::shared_ptr<const DriftModel> zero_drift(int m);
std::shared_ptr<const DriftModel> decay_drift(double rate);              // a(x) = -rate x
std::shared_ptr<const DriftModel> constant_drift(const Point& c);        // a(x) = c

// Noise catalog. Unbounded fields carry bounds over the ball |x| <= box_radius.
VectorField rotation_field(int noise_dim, double box_radius);            // every column (-x2, x1)
VectorField rotation_dilation_field(double box_radius);                            // columns (-x2, x1) and (x1, x2)
VectorField affine_field(const Eigen::MatrixXd& b0, const std::vector<Eigen::MatrixXd>& slopes, double box_radius);
VectorField scalar_linear_field(double box_radius);                      // m = d = 1, b(x) = x
VectorField constant_noise_field(const Eigen::MatrixXd& b);

/// Globally bounded smooth modification: b evaluated at the radial squash
/// s(x) = R tanh(|x|/R) x/|x|. s is 1-Lipschitz into the open ball of radius
/// R, so the boxed bounds of `inner` become global bounds.
VectorField tanh_damped(const VectorField& inner);

/// b_ij(x) = amp_ij sin(freq_ij . x + phase_ij); sup <= |amp|_F and
/// lip <= sqrt(sum amp_ij^2 |freq_ij|^2), globally.
VectorField trig_field(const Eigen::MatrixXd& amp, const std::vector<Eigen::MatrixXd>& freq,
                       const Eigen::MatrixXd& phase);
VectorField random_trig_field(int m, int d, Philox& rng);

/// Builds a field from catalog names: noise in {rotation, rotation-dilation, affine,
/// linear, constant} optionally prefixed `tanh-damped-`; drift in {zero, decay, constant}.
struct FieldSpec {
  std::string noise = "rotation-dilation";
  std::string drift = "zero";
  int noise_dim = 2;
  double box_radius = 4.0;
  double drift_rate = 1.0;
  Point drift_constant;
  Eigen::MatrixXd affine_b0;
  std::vector<Eigen::MatrixXd> affine_slopes;
};
VectorField make_field(const FieldSpec& spec);

/// Finite-difference spot estimates of sup |b| and Lip(b) over random points of
/// the ball |x| <= radius.
struct SampledBounds {
  double sup = 0.0;
  double lip = 0.0;
};
SampledBounds sample_bounds(const VectorField& field, double radius, int samples, Philox& rng);

double operator_norm(const Eigen::MatrixXd& m);

}  // namespace marcuslab
