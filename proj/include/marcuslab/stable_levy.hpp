#pragma once

#include <complex>
#include <vector>

#include "marcuslab/cadlag_path.hpp"
#include "marcuslab/intermittent_maps.hpp"

namespace marcuslab {

class Philox;

struct SpectralAtom {
  Point direction;  // unit vector
  double weight;    // > 0
};

/// Finite atomic measure on the unit sphere S^{d-1}.
class SpectralMeasure {
 public:
  /// Throws std::invalid_argument on an empty atom list, non-unit directions
  /// (tolerance 1e-12), non-positive weights or mixed dimensions.
  explicit SpectralMeasure(std::vector<SpectralAtom> atoms);

  int dimension() const { return static_cast<int>(atoms_.front().direction.size()); }
  const std::vector<SpectralAtom>& atoms() const { return atoms_; }
  double total_mass() const;
  SpectralMeasure scaled(double factor) const;

 private:
  std::vector<SpectralAtom> atoms_;
};

/// Mean-zero alpha-stable law on R^d, 1 < alpha < 2, with characteristic function
///   E exp(i u.X) = exp{ - sum_s |u.s|^alpha (1 - i sgn(u.s) tan(pi alpha / 2)) Lambda(s) }.
class StableLaw {
 public:
  StableLaw(double alpha, SpectralMeasure spectral);
  double alpha() const { return alpha_; }
  const SpectralMeasure& spectral() const { return spectral_; }
  int dimension() const { return spectral_.dimension(); }

 private:
  double alpha_;
  SpectralMeasure spectral_;
};

/// Chambers-Mallows-Stuck draw with characteristic function
/// exp{-sigma^alpha |u|^alpha (1 - i beta sgn(u) tan(pi alpha / 2))}.
double sample_scalar_stable(double alpha, double scale_sigma, double skew_beta, Philox& rng);

/// X = sum_i lambda_i^{1/alpha} Z_i s_i with independent totally skewed (beta = 1) Z_i.
Point sample_stable_vector(const StableLaw& law, Philox& rng);

std::complex<double> char_function(const StableLaw& law, const Point& u);

/// Closed-form characteristic function of the scalar law above.
std::complex<double> scalar_char_function(double alpha, double scale_sigma, double skew_beta, double u);

/// Limit law of n^{-1/alpha} sum_{j<n} v(f^j y) for the intermittent maps:
///   sigma = delta_{v0/|v0|}                                    (LSV)
///         = (|v0|^a delta_{v0/|v0|} + |v1|^a delta_{v1/|v1|}) / (|v0|^a + |v1|^a)   (PM)
///   c     = |v0|^a a^a h(1/2) tau_bar / 4                        (LSV)
///         = (|v0|^a + |v1|^a) a^a h(1/3) tau_bar / 9             (PM)
///   Lambda = c cos(pi a / 2) Gamma(1 - a) sigma / tau_bar.
struct LimitLaw {
  StableLaw law;
  SpectralMeasure sigma;
  double c;
  double prefactor;  // cos(pi a / 2) Gamma(1 - a), positive on (1, 2)
};

/// Throws DegenerateObservable when v0 = 0 (or v1 = 0 for PM).
LimitLaw limit_spectral_measure(const IntermittentMap& map, const Point& v0, const Point& v1, double h_boundary,
                                double tau_bar);

/// cos(pi a / 2) Gamma(1 - a).
double stable_prefactor(double alpha);

struct LevyPathSample {
  StableLaw law;
  int n;
  CadlagPath path;  // grid k/n, k = 0..n, path(0) = 0
};

/// Increments i.i.d. as n^{-1/alpha} sample_stable_vector(law); exact in law at grid times.
LevyPathSample sample_levy_path(const StableLaw& law, int n, Philox& rng);

}  // namespace marcuslab
