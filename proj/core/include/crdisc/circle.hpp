#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "crdisc/errors.hpp"

namespace crdisc {

using cxd = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Normalized discrete Fourier coefficients of a circle function, stored in
// FFT bin order: bin k holds mode k for k < N/2 and mode k-N for k > N/2.
// Bin N/2 is the shared +-N/2 Nyquist bin; it is not addressable through
// at() and is excluded from the negative-mode energy.
class FourierCoeffs {
 public:
  FourierCoeffs() = default;
  explicit FourierCoeffs(std::vector<cxd> fft_order_bins);

  std::size_t grid_size() const { return bins_.size(); }
  int max_mode() const { return static_cast<int>(bins_.size()) / 2 - 1; }

  // \hat c(n) for |n| <= max_mode(); 0 outside that range.
  cxd at(int n) const;
  cxd nyquist() const { return bins_.empty() ? cxd{} : bins_[bins_.size() / 2]; }

  double total_energy() const;
  double negative_energy() const;  // modes n in [-N/2+1, -1]

  // \hat c(-n) == conj(\hat c(n)) within tol * max amplitude, for all n.
  bool conjugate_symmetric(double tol = 1e-12) const;

  // Largest |n| whose amplitude exceeds rel_tol * max amplitude.
  int significant_mode(double rel_tol = 1e-17) const;

  const std::vector<cxd>& fft_order() const { return bins_; }

 private:
  std::vector<cxd> bins_;
};

// Function on the unit circle held as uniform samples at theta_k = 2 pi k / n
// together with its discrete Fourier coefficients. The grid size must be a
// power of two >= 64. Instances are immutable after construction; every
// operation below is a pure function of its inputs and safe to call
// concurrently.
class CircleFunction {
 public:
  CircleFunction() = default;

  static CircleFunction from_samples(std::vector<cxd> values);
  static CircleFunction from_real(std::vector<double> values);
  static CircleFunction from_spectrum(std::vector<cxd> fft_order_bins);
  static CircleFunction constant(cxd value, std::size_t n);

  template <typename F>
  static CircleFunction sample(std::size_t n, F&& f) {
    std::vector<cxd> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = f(angle(k, n));
    return from_samples(std::move(v));
  }

  static double angle(std::size_t k, std::size_t n) {
    return kTwoPi * static_cast<double>(k) / static_cast<double>(n);
  }

  bool empty() const { return values_.empty(); }
  std::size_t size() const { return values_.size(); }
  double theta(std::size_t k) const { return angle(k, size()); }
  const std::vector<cxd>& samples() const { return values_; }
  cxd operator[](std::size_t k) const { return values_[k]; }

  // True when max |Im f| < 1e-12 * (1 + max |f|).
  bool is_real() const { return real_; }

  const FourierCoeffs& coeffs() const { return coeffs_; }
  cxd coeff(int n) const { return coeffs_.at(n); }
  cxd mean() const { return coeffs_.at(0); }

  double max_modulus() const;
  double min_modulus() const;
  double sup_norm() const { return max_modulus(); }

  CircleFunction real_part() const;
  CircleFunction imag_part() const;
  CircleFunction conjugated() const;

  // Value of the band-limited trigonometric interpolant at an arbitrary angle.
  cxd interpolate(double theta) const;

 private:
  std::vector<cxd> values_;
  FourierCoeffs coeffs_;
  bool real_ = false;
  int interp_modes_ = 0;
};

// Pointwise arithmetic; operands must share a grid size.
CircleFunction operator+(const CircleFunction& a, const CircleFunction& b);
CircleFunction operator-(const CircleFunction& a, const CircleFunction& b);
CircleFunction operator*(const CircleFunction& a, const CircleFunction& b);
CircleFunction operator*(cxd c, const CircleFunction& f);
CircleFunction operator*(const CircleFunction& f, cxd c);
CircleFunction operator+(const CircleFunction& f, cxd c);
CircleFunction operator+(cxd c, const CircleFunction& f);

// Conjugation operator: Fourier multiplier -i sgn(n), zero mean. Requires a
// real input; the output is again real.
CircleFunction hilbert(const CircleFunction& f);

// psi + i * hilbert(psi): boundary values of the holomorphic extension whose
// real part is psi. No negative modes; mode 0 equals the mean of psi.
CircleFunction analytic_completion(const CircleFunction& psi);

// Total argument increment / 2 pi for a curve avoiding the origin. The grid
// is doubled (trigonometric interpolation) until every consecutive argument
// increment is below pi/2, up to max_doublings.
int winding_number(const CircleFunction& gamma, double tol_zero_rel = 1e-9,
                   int max_doublings = 4);

// Sup norm plus a lower estimate of the alpha-Hoelder seminorm over all pairs
// on a <=256-point subgrid (circular distance). A diagnostic estimate, not a
// certified norm.
double holder_norm(const CircleFunction& f, double alpha);

// Truncated power series sum_{n>=0} \hat f(n) zeta^n for |zeta| <= 1.
// Requires negative-mode energy below 1e-10 of the total.
cxd extend_inside(const CircleFunction& f, cxd zeta);

// Spectral d/dtheta.
CircleFunction derivative(const CircleFunction& f);

// Spectral resampling (zero padding / truncation) to a new grid size.
CircleFunction resample(const CircleFunction& f, std::size_t n);

struct CircleExtremum {
  double theta = 0.0;
  double value = 0.0;
};

// Extrema of the trigonometric interpolant of a real function, refined from
// the best grid point by golden-section search.
CircleExtremum refine_max(const CircleFunction& f);
CircleExtremum refine_min(const CircleFunction& f);
// max_theta |f(theta)| for complex f, refined the same way on |f|^2.
CircleExtremum refine_max_modulus(const CircleFunction& f);

}  // namespace crdisc
