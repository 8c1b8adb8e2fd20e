#include "marcuslab/stable_levy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "marcuslab/errors.hpp"
#include "marcuslab/rng.hpp"

namespace marcuslab {

SpectralMeasure::SpectralMeasure(std::vector<SpectralAtom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw std::invalid_argument("SpectralMeasure: at least one atom required");
  const auto d = atoms_.front().direction.size();
  for (const auto& a : atoms_) {
    if (a.direction.size() != d || d == 0) throw std::invalid_argument("SpectralMeasure: mixed dimensions");
    if (std::abs(a.direction.norm() - 1.0) > 1e-12) throw std::invalid_argument("SpectralMeasure: non-unit direction");
    if (!(a.weight > 0.0)) throw std::invalid_argument("SpectralMeasure: weights must be positive");
  }
}

double SpectralMeasure::total_mass() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.weight;
  return m;
}

SpectralMeasure SpectralMeasure::scaled(double factor) const {
  auto atoms = atoms_;
  for (auto& a : atoms) a.weight *= factor;
  return SpectralMeasure(std::move(atoms));
}

StableLaw::StableLaw(double alpha, SpectralMeasure spectral) : alpha_(alpha), spectral_(std::move(spectral)) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("StableLaw: alpha must lie in (1, 2)");
}

double sample_scalar_stable(double alpha, double sigma, double beta, Philox& rng) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("sample_scalar_stable: alpha must lie in (1, 2)");
  if (!(sigma > 0.0)) throw std::invalid_argument("sample_scalar_stable: scale must be positive");
  if (!(beta >= -1.0 && beta <= 1.0)) throw std::invalid_argument("sample_scalar_stable: skew must lie in [-1, 1]");
  const double t = beta * std::tan(0.5 * std::numbers::pi * alpha);
  const double b = std::atan(t) / alpha;
  const double s = std::pow(1.0 + t * t, 0.5 / alpha);
  const double v = std::numbers::pi * (rng.uniform() - 0.5);
  const double w = rng.exponential();
  const double x = s * std::sin(alpha * (v + b)) / std::pow(std::cos(v), 1.0 / alpha) *
                   std::pow(std::cos(v - alpha * (v + b)) / w, (1.0 - alpha) / alpha);
  return sigma * x;
}

std::complex<double> scalar_char_function(double alpha, double sigma, double beta, double u) {
  if (u == 0.0) return 1.0;
  const double mag = std::pow(sigma * std::abs(u), alpha);
  const double sgn = u > 0.0 ? 1.0 : -1.0;
  return std::exp(std::complex<double>(-mag, mag * beta * sgn * std::tan(0.5 * std::numbers::pi * alpha)));
}

Point sample_stable_vector(const StableLaw& law, Philox& rng) {
  Point x = Point::Zero(law.dimension());
  const double inv_alpha = 1.0 / law.alpha();
  for (const auto& atom : law.spectral().atoms()) {
    x += sample_scalar_stable(law.alpha(), std::pow(atom.weight, inv_alpha), 1.0, rng) * atom.direction;
  }
  return x;
}

std::complex<double> char_function(const StableLaw& law, const Point& u) {
  if (u.size() != law.dimension()) throw std::invalid_argument("char_function: dimension mismatch");
  const double tan_term = std::tan(0.5 * std::numbers::pi * law.alpha());
  std::complex<double> exponent = 0.0;
  for (const auto& atom : law.spectral().atoms()) {
    const double dot = u.dot(atom.direction);
    if (dot == 0.0) continue;
    const double mag = std::pow(std::abs(dot), law.alpha()) * atom.weight;
    exponent += std::complex<double>(-mag, mag * (dot > 0.0 ? 1.0 : -1.0) * tan_term);
  }
  return std::exp(exponent);
}

double stable_prefactor(double alpha) {
  return std::cos(0.5 * std::numbers::pi * alpha) * std::tgamma(1.0 - alpha);
}

LimitLaw limit_spectral_measure(const IntermittentMap& map, const Point& v0, const Point& v1, double h_boundary,
                                double tau_bar) {
  const double a = map.alpha();
  if (!(h_boundary > 0.0)) throw std::invalid_argument("limit_spectral_measure: density must be positive");
  if (!(tau_bar > 1.0)) throw std::invalid_argument("limit_spectral_measure: mean return time must exceed 1");
  if (v0.norm() == 0.0) throw DegenerateObservable("observable vanishes at the neutral fixed point 0");
  const double pow_a = std::pow(a, a);
  std::vector<SpectralAtom> atoms;
  double c = 0.0;
  if (map.kind() == MapKind::LSV) {
    atoms.push_back({v0 / v0.norm(), 1.0});
    c = 0.25 * std::pow(v0.norm(), a) * pow_a * h_boundary * tau_bar;
  } else {
    if (v1.size() != v0.size()) throw std::invalid_argument("limit_spectral_measure: v(0), v(1) dimensions differ");
    if (v1.norm() == 0.0) throw DegenerateObservable("observable vanishes at the neutral fixed point 1");
    const double m0 = std::pow(v0.norm(), a);
    const double m1 = std::pow(v1.norm(), a);
    atoms.push_back({v0 / v0.norm(), m0 / (m0 + m1)});
    atoms.push_back({v1 / v1.norm(), m1 / (m0 + m1)});
    c = (m0 + m1) * pow_a * h_boundary * tau_bar / 9.0;
  }
  const double prefactor = stable_prefactor(a);
  if (!(prefactor > 0.0)) throw std::logic_error("limit_spectral_measure: non-positive stable prefactor");
  SpectralMeasure sigma(atoms);
  return {StableLaw(a, sigma.scaled(c * prefactor / tau_bar)), sigma, c, prefactor};
}

LevyPathSample sample_levy_path(const StableLaw& law, int n, Philox& rng) {
  if (n < 1) throw std::invalid_argument("sample_levy_path: n must be >= 1");
  const double scale = std::pow(1.0 / n, 1.0 / law.alpha());
  std::vector<double> times(static_cast<std::size_t>(n) + 1);
  Eigen::MatrixXd values(law.dimension(), n + 1);
  values.col(0).setZero();
  for (int k = 1; k <= n; ++k) {
    times[static_cast<std::size_t>(k)] = static_cast<double>(k) / n;
    values.col(k) = values.col(k - 1) + scale * sample_stable_vector(law, rng);
  }
  return {law, n, CadlagPath(std::move(times), std::move(values), 1.0)};
}

}  // namespace marcuslab
