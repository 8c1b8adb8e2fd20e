#include "marcuslab/vector_field.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "marcuslab/errors.hpp"
#include "marcuslab/rng.hpp"

namespace marcuslab {

double operator_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

VectorField::VectorField(std::shared_ptr<const DriftModel> drift, std::shared_ptr<const NoiseModel> noise,
                         double sup_bound, double lip_bound, std::string name, double box_radius)
    : drift_(std::move(drift)),
      noise_(std::move(noise)),
      sup_bound_(sup_bound),
      lip_bound_(lip_bound),
      name_(std::move(name)),
      box_radius_(box_radius) {
  if (!drift_ || !noise_) throw std::invalid_argument("VectorField: null coefficient");
}

Point VectorField::drift(const Point& x) const {
  Point out(x.size());
  drift_->eval(x, out);
  return out;
}

VectorField VectorField::with_drift(std::shared_ptr<const DriftModel> drift, const std::string& drift_name) const {
  return VectorField(std::move(drift), noise_, sup_bound_, lip_bound_, name_ + "+" + drift_name, box_radius_);
}

namespace {

class ZeroDrift final : public DriftModel {
 public:
  void eval(const Point& x, Point& out) const override { out.setZero(x.size()); }
};

class DecayDrift final : public DriftModel {
 public:
  explicit DecayDrift(double rate) : rate_(rate) {}
  void eval(const Point& x, Point& out) const override { out = -rate_ * x; }

 private:
  double rate_;
};

class ConstantDrift final : public DriftModel {
 public:
  explicit ConstantDrift(Point c) : c_(std::move(c)) {}
  void eval(const Point&, Point& out) const override { out = c_; }

 private:
  Point c_;
};

class RotationNoise final : public NoiseModel {
 public:
  explicit RotationNoise(int d) : d_(d) {}
  int state_dim() const override { return 2; }
  int noise_dim() const override { return d_; }
  Eigen::MatrixXd matrix(const Point& x) const override {
    Eigen::MatrixXd b(2, d_);
    b.row(0).setConstant(-x[1]);
    b.row(1).setConstant(x[0]);
    return b;
  }
  void apply(const Point& x, const Point& h, Point& out) const override {
    const double s = h.sum();
    out.resize(2);
    out << -x[1] * s, x[0] * s;
  }

 private:
  int d_;
};

class RotationDilationNoise final : public NoiseModel {
 public:
  int state_dim() const override { return 2; }
  int noise_dim() const override { return 2; }
  Eigen::MatrixXd matrix(const Point& x) const override {
    Eigen::MatrixXd b(2, 2);
    b << -x[1], x[0], x[0], x[1];
    return b;
  }
  void apply(const Point& x, const Point& h, Point& out) const override {
    out.resize(2);
    out << -x[1] * h[0] + x[0] * h[1], x[0] * h[0] + x[1] * h[1];
  }
};

class AffineNoise final : public NoiseModel {
 public:
  AffineNoise(Eigen::MatrixXd b0, std::vector<Eigen::MatrixXd> slopes) : b0_(std::move(b0)), slopes_(std::move(slopes)) {}
  int state_dim() const override { return static_cast<int>(b0_.rows()); }
  int noise_dim() const override { return static_cast<int>(b0_.cols()); }
  Eigen::MatrixXd matrix(const Point& x) const override {
    Eigen::MatrixXd b = b0_;
    for (std::size_t i = 0; i < slopes_.size(); ++i) b += x[static_cast<Eigen::Index>(i)] * slopes_[i];
    return b;
  }

 private:
  Eigen::MatrixXd b0_;
  std::vector<Eigen::MatrixXd> slopes_;
};

class SquashedNoise final : public NoiseModel {
 public:
  SquashedNoise(std::shared_ptr<const NoiseModel> inner, double radius) : inner_(std::move(inner)), radius_(radius) {}
  int state_dim() const override { return inner_->state_dim(); }
  int noise_dim() const override { return inner_->noise_dim(); }
  Eigen::MatrixXd matrix(const Point& x) const override { return inner_->matrix(squash(x)); }
  void apply(const Point& x, const Point& h, Point& out) const override { inner_->apply(squash(x), h, out); }

 private:
  Point squash(const Point& x) const {
    const double r = x.norm();
    if (r == 0.0) return x;
    return (radius_ * std::tanh(r / radius_) / r) * x;
  }
  std::shared_ptr<const NoiseModel> inner_;
  double radius_;
};

class TrigNoise final : public NoiseModel {
 public:
  TrigNoise(Eigen::MatrixXd amp, std::vector<Eigen::MatrixXd> freq, Eigen::MatrixXd phase)
      : amp_(std::move(amp)), freq_(std::move(freq)), phase_(std::move(phase)) {}
  int state_dim() const override { return static_cast<int>(amp_.rows()); }
  int noise_dim() const override { return static_cast<int>(amp_.cols()); }
  Eigen::MatrixXd matrix(const Point& x) const override {
    Eigen::MatrixXd arg = phase_;
    for (std::size_t k = 0; k < freq_.size(); ++k) arg += x[static_cast<Eigen::Index>(k)] * freq_[k];
    return amp_.cwiseProduct(arg.array().sin().matrix());
  }

 private:
  Eigen::MatrixXd amp_;
  std::vector<Eigen::MatrixXd> freq_;
  Eigen::MatrixXd phase_;
};

}  // namespace

std::shared_ptr<const DriftModel> zero_drift(int) { return std::make_shared<ZeroDrift>(); }
std::shared_ptr<const DriftModel> decay_drift(double rate) { return std::make_shared<DecayDrift>(rate); }
std::shared_ptr<const DriftModel> constant_drift(const Point& c) { return std::make_shared<ConstantDrift>(c); }

VectorField rotation_field(int noise_dim, double box_radius) {
  const double sd = std::sqrt(static_cast<double>(noise_dim));
  return VectorField(zero_drift(2), std::make_shared<RotationNoise>(noise_dim), box_radius * sd, sd, "rotation",
                     box_radius);
}

VectorField rotation_dilation_field(double box_radius) {
  return VectorField(zero_drift(2), std::make_shared<RotationDilationNoise>(), box_radius, 1.0, "rotation-dilation", box_radius);
}

VectorField affine_field(const Eigen::MatrixXd& b0, const std::vector<Eigen::MatrixXd>& slopes, double box_radius) {
  if (!slopes.empty() && static_cast<Eigen::Index>(slopes.size()) != b0.rows()) {
    throw std::invalid_argument("affine_field: need one slope matrix per state coordinate");
  }
  double lip2 = 0.0;
  for (const auto& s : slopes) {
    if (s.rows() != b0.rows() || s.cols() != b0.cols()) throw std::invalid_argument("affine_field: shape mismatch");
    const double n = operator_norm(s);
    lip2 += n * n;
  }
  const double lip = std::sqrt(lip2);
  const double box = slopes.empty() ? std::numeric_limits<double>::infinity() : box_radius;
  const double sup = operator_norm(b0) + (slopes.empty() ? 0.0 : box_radius * lip);
  return VectorField(zero_drift(static_cast<int>(b0.rows())), std::make_shared<AffineNoise>(b0, slopes), sup, lip,
                     "affine", box);
}

VectorField scalar_linear_field(double box_radius) {
  VectorField f = affine_field(Eigen::MatrixXd::Zero(1, 1), {Eigen::MatrixXd::Ones(1, 1)}, box_radius);
  return VectorField(zero_drift(1), f.noise_model(), f.sup_bound(), f.lip_bound(), "linear", box_radius);
}

VectorField constant_noise_field(const Eigen::MatrixXd& b) {
  VectorField f = affine_field(b, {}, 0.0);
  return VectorField(zero_drift(static_cast<int>(b.rows())), f.noise_model(), f.sup_bound(), 0.0, "constant");
}

VectorField tanh_damped(const VectorField& inner) {
  if (!std::isfinite(inner.box_radius())) return inner;
  auto noise = std::make_shared<SquashedNoise>(inner.noise_model(), inner.box_radius());
  return VectorField(inner.drift_model(), std::move(noise), inner.sup_bound(), inner.lip_bound(),
                     "tanh-damped-" + inner.name());
}

VectorField trig_field(const Eigen::MatrixXd& amp, const std::vector<Eigen::MatrixXd>& freq,
                       const Eigen::MatrixXd& phase) {
  if (static_cast<Eigen::Index>(freq.size()) != amp.rows()) {
    throw std::invalid_argument("trig_field: need one frequency matrix per state coordinate");
  }
  double lip2 = 0.0;
  for (Eigen::Index i = 0; i < amp.rows(); ++i) {
    for (Eigen::Index j = 0; j < amp.cols(); ++j) {
      double w2 = 0.0;
      for (const auto& f : freq) w2 += f(i, j) * f(i, j);
      lip2 += amp(i, j) * amp(i, j) * w2;
    }
  }
  return VectorField(zero_drift(static_cast<int>(amp.rows())), std::make_shared<TrigNoise>(amp, freq, phase),
                     amp.norm(), std::sqrt(lip2), "trig");
}

VectorField random_trig_field(int m, int d, Philox& rng) {
  Eigen::MatrixXd amp(m, d), phase(m, d);
  std::vector<Eigen::MatrixXd> freq(static_cast<std::size_t>(m), Eigen::MatrixXd(m, d));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < d; ++j) {
      amp(i, j) = rng.uniform(-1.0, 1.0);
      phase(i, j) = rng.uniform(0.0, 2.0 * std::numbers::pi);
      for (auto& f : freq) f(i, j) = rng.uniform(-2.0, 2.0);
    }
  }
  return trig_field(amp, freq, phase);
}

VectorField make_field(const FieldSpec& spec) {
  std::string noise = spec.noise;
  bool damped = false;
  const std::string prefix = "tanh-damped-";
  if (noise.rfind(prefix, 0) == 0) {
    damped = true;
    noise = noise.substr(prefix.size());
  }
  VectorField f = [&]() -> VectorField {
    if (noise == "rotation") return rotation_field(spec.noise_dim, spec.box_radius);
    if (noise == "rotation-dilation") return rotation_dilation_field(spec.box_radius);
    if (noise == "linear") return scalar_linear_field(spec.box_radius);
    if (noise == "affine") {
      if (spec.affine_b0.size() == 0) throw ConfigError("affine field requires fields.b0");
      return affine_field(spec.affine_b0, spec.affine_slopes, spec.box_radius);
    }
    if (noise == "constant") {
      if (spec.affine_b0.size() == 0) throw ConfigError("constant field requires fields.b0");
      return constant_noise_field(spec.affine_b0);
    }
    throw ConfigError("unknown noise field '" + spec.noise + "'");
  }();
  if (damped) f = tanh_damped(f);
  const int m = f.state_dim();
  if (spec.drift == "zero") return f;
  if (spec.drift == "decay") return f.with_drift(decay_drift(spec.drift_rate), "decay");
  if (spec.drift == "constant") {
    if (spec.drift_constant.size() != m) throw ConfigError("constant drift requires fields.a_constant of length m");
    return f.with_drift(constant_drift(spec.drift_constant), "constant");
  }
  throw ConfigError("unknown drift '" + spec.drift + "'");
}

SampledBounds sample_bounds(const VectorField& field, double radius, int samples, Philox& rng) {
  const int m = field.state_dim();
  auto draw = [&]() {
    Point x(m);
    for (int i = 0; i < m; ++i) x[i] = rng.normal();
    return Point(x * (radius * std::pow(rng.uniform(), 1.0 / m) / x.norm()));
  };
  SampledBounds out;
  for (int s = 0; s < samples; ++s) {
    const Point x = draw();
    const Eigen::MatrixXd bx = field.noise(x);
    out.sup = std::max(out.sup, operator_norm(bx));
    Point y = s % 2 == 0 ? draw() : Point(x + 1e-5 * radius * Point::NullaryExpr(m, [&] { return rng.normal(); }));
    const double dist = (x - y).norm();
    if (dist > 0.0) out.lip = std::max(out.lip, operator_norm(bx - field.noise(y)) / dist);
  }
  return out;
}

}  // namespace marcuslab
