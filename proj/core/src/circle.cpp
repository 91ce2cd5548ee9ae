#include "crdisc/circle.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace crdisc {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void validate_grid(std::size_t n) {
  if (n < 64 || !is_pow2(n))
    throw std::invalid_argument(
        "circle grid size must be a power of two >= 64, got " +
        std::to_string(n));
}

// Process-wide FFTW plan cache. The planner is not thread-safe, so plan
// creation is serialized; fftw_execute_dft on caller-owned buffers is safe
// to run concurrently. Plans are created with FFTW_UNALIGNED so they can be
// executed on std::vector storage.
class FftEngine {
 public:
  static FftEngine& instance() {
    static FftEngine engine;
    return engine;
  }

  void forward(const std::vector<cxd>& in, std::vector<cxd>& out) {
    execute(plans(in.size()).fwd, in, out);
  }
  void inverse(const std::vector<cxd>& in, std::vector<cxd>& out) {
    execute(plans(in.size()).bwd, in, out);
  }

 private:
  struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
  };

  PlanPair& plans(std::size_t n) {
    std::scoped_lock lock(mutex_);
    auto it = cache_.find(n);
    if (it == cache_.end()) {
      std::vector<cxd> a(n), b(n);
      auto* pa = reinterpret_cast<fftw_complex*>(a.data());
      auto* pb = reinterpret_cast<fftw_complex*>(b.data());
      PlanPair p;
      p.fwd = fftw_plan_dft_1d(static_cast<int>(n), pa, pb, FFTW_FORWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
      p.bwd = fftw_plan_dft_1d(static_cast<int>(n), pa, pb, FFTW_BACKWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
      it = cache_.emplace(n, p).first;
    }
    return it->second;
  }

  static void execute(fftw_plan plan, const std::vector<cxd>& in,
                      std::vector<cxd>& out) {
    out.resize(in.size());
    // Out-of-place c2c transforms leave the input intact.
    fftw_execute_dft(plan,
                     reinterpret_cast<fftw_complex*>(
                         const_cast<cxd*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
  }

  std::mutex mutex_;
  std::map<std::size_t, PlanPair> cache_;
};

bool detect_real(const std::vector<cxd>& v) {
  double max_im = 0.0, max_mod = 0.0;
  for (const auto& z : v) {
    max_im = std::max(max_im, std::abs(z.imag()));
    max_mod = std::max(max_mod, std::abs(z));
  }
  return max_im < 1e-12 * (1.0 + max_mod);
}

double circular_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), kTwoPi);
  return std::min(d, kTwoPi - d);
}

void check_same_grid(const CircleFunction& a, const CircleFunction& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("circle functions live on different grids (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
}

}  // namespace

// ---------------------------------------------------------------------------
// FourierCoeffs
// ---------------------------------------------------------------------------

FourierCoeffs::FourierCoeffs(std::vector<cxd> fft_order_bins)
    : bins_(std::move(fft_order_bins)) {
  validate_grid(bins_.size());
}

cxd FourierCoeffs::at(int n) const {
  if (n > max_mode() || n < -max_mode()) return {};
  return n >= 0 ? bins_[static_cast<std::size_t>(n)]
                : bins_[bins_.size() + static_cast<std::size_t>(n)];
}

double FourierCoeffs::total_energy() const {
  double e = 0.0;
  for (const auto& c : bins_) e += std::norm(c);
  return e;
}

double FourierCoeffs::negative_energy() const {
  double e = 0.0;
  for (std::size_t k = bins_.size() / 2 + 1; k < bins_.size(); ++k)
    e += std::norm(bins_[k]);
  return e;
}

bool FourierCoeffs::conjugate_symmetric(double tol) const {
  double amp = 0.0;
  for (const auto& c : bins_) amp = std::max(amp, std::abs(c));
  for (int n = 0; n <= max_mode(); ++n)
    if (std::abs(at(-n) - std::conj(at(n))) > tol * (1.0 + amp)) return false;
  return true;
}

int FourierCoeffs::significant_mode(double rel_tol) const {
  double amp = 0.0;
  for (const auto& c : bins_) amp = std::max(amp, std::abs(c));
  const double floor = rel_tol * amp;
  int top = 0;
  for (int n = 1; n <= max_mode(); ++n)
    if (std::abs(at(n)) > floor || std::abs(at(-n)) > floor) top = n;
  return top;
}

// ---------------------------------------------------------------------------
// CircleFunction
// ---------------------------------------------------------------------------

CircleFunction CircleFunction::from_samples(std::vector<cxd> values) {
  validate_grid(values.size());
  std::vector<cxd> bins;
  FftEngine::instance().forward(values, bins);
  const double inv = 1.0 / static_cast<double>(values.size());
  for (auto& c : bins) c *= inv;

  CircleFunction f;
  f.values_ = std::move(values);
  f.coeffs_ = FourierCoeffs(std::move(bins));
  f.real_ = detect_real(f.values_);
  f.interp_modes_ = f.coeffs_.significant_mode();
  return f;
}

CircleFunction CircleFunction::from_real(std::vector<double> values) {
  std::vector<cxd> v(values.size());
  std::transform(values.begin(), values.end(), v.begin(),
                 [](double x) { return cxd(x, 0.0); });
  return from_samples(std::move(v));
}

CircleFunction CircleFunction::from_spectrum(std::vector<cxd> fft_order_bins) {
  validate_grid(fft_order_bins.size());
  std::vector<cxd> values;
  FftEngine::instance().inverse(fft_order_bins, values);

  CircleFunction f;
  f.values_ = std::move(values);
  f.coeffs_ = FourierCoeffs(std::move(fft_order_bins));
  f.real_ = detect_real(f.values_);
  f.interp_modes_ = f.coeffs_.significant_mode();
  return f;
}

CircleFunction CircleFunction::constant(cxd value, std::size_t n) {
  return from_samples(std::vector<cxd>(n, value));
}

double CircleFunction::max_modulus() const {
  double m = 0.0;
  for (const auto& z : values_) m = std::max(m, std::abs(z));
  return m;
}

double CircleFunction::min_modulus() const {
  double m = values_.empty() ? 0.0 : std::abs(values_[0]);
  for (const auto& z : values_) m = std::min(m, std::abs(z));
  return m;
}

CircleFunction CircleFunction::real_part() const {
  std::vector<cxd> v(size());
  std::transform(values_.begin(), values_.end(), v.begin(),
                 [](cxd z) { return cxd(z.real(), 0.0); });
  return from_samples(std::move(v));
}

CircleFunction CircleFunction::imag_part() const {
  std::vector<cxd> v(size());
  std::transform(values_.begin(), values_.end(), v.begin(),
                 [](cxd z) { return cxd(z.imag(), 0.0); });
  return from_samples(std::move(v));
}

CircleFunction CircleFunction::conjugated() const {
  std::vector<cxd> v(size());
  std::transform(values_.begin(), values_.end(), v.begin(),
                 [](cxd z) { return std::conj(z); });
  return from_samples(std::move(v));
}

cxd CircleFunction::interpolate(double theta) const {
  const cxd e = std::polar(1.0, theta);
  cxd ep = 1.0;
  cxd acc = coeffs_.at(0);
  for (int n = 1; n <= interp_modes_; ++n) {
    ep *= e;
    acc += coeffs_.at(n) * ep + coeffs_.at(-n) * std::conj(ep);
  }
  acc += coeffs_.nyquist() *
         std::cos(0.5 * static_cast<double>(size()) * theta);
  return acc;
}

// ---------------------------------------------------------------------------
// Arithmetic
// ---------------------------------------------------------------------------

namespace {
template <typename Op>
CircleFunction zip(const CircleFunction& a, const CircleFunction& b, Op op) {
  check_same_grid(a, b);
  std::vector<cxd> v(a.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = op(a[k], b[k]);
  return CircleFunction::from_samples(std::move(v));
}
}  // namespace

CircleFunction operator+(const CircleFunction& a, const CircleFunction& b) {
  return zip(a, b, [](cxd x, cxd y) { return x + y; });
}
CircleFunction operator-(const CircleFunction& a, const CircleFunction& b) {
  return zip(a, b, [](cxd x, cxd y) { return x - y; });
}
CircleFunction operator*(const CircleFunction& a, const CircleFunction& b) {
  return zip(a, b, [](cxd x, cxd y) { return x * y; });
}
CircleFunction operator*(cxd c, const CircleFunction& f) {
  std::vector<cxd> v(f.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = c * f[k];
  return CircleFunction::from_samples(std::move(v));
}
CircleFunction operator*(const CircleFunction& f, cxd c) { return c * f; }
CircleFunction operator+(const CircleFunction& f, cxd c) {
  std::vector<cxd> v(f.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = f[k] + c;
  return CircleFunction::from_samples(std::move(v));
}
CircleFunction operator+(cxd c, const CircleFunction& f) { return f + c; }

// ---------------------------------------------------------------------------
// Operators on the circle
// ---------------------------------------------------------------------------

CircleFunction hilbert(const CircleFunction& f) {
  if (!f.is_real())
    throw NonRealInput("hilbert: input must be real-valued on the grid");
  const std::size_t n = f.size();
  const auto& c = f.coeffs();
  std::vector<cxd> bins(n, cxd{});
  const cxd neg_i(0.0, -1.0), pos_i(0.0, 1.0);
  for (int k = 1; k <= c.max_mode(); ++k) {
    bins[static_cast<std::size_t>(k)] = neg_i * c.at(k);
    bins[n - static_cast<std::size_t>(k)] = pos_i * c.at(-k);
  }
  // mode 0 and the Nyquist bin are annihilated
  return CircleFunction::from_spectrum(std::move(bins));
}

CircleFunction analytic_completion(const CircleFunction& psi) {
  if (!psi.is_real())
    throw NonRealInput("analytic_completion: input must be real-valued");
  return psi + cxd(0.0, 1.0) * hilbert(psi);
}

int winding_number(const CircleFunction& gamma, double tol_zero_rel,
                   int max_doublings) {
  CircleFunction g = gamma;
  for (int attempt = 0;; ++attempt) {
    const double mx = g.max_modulus();
    if (!(g.min_modulus() > tol_zero_rel * mx))
      throw CurveThroughOrigin(
          "winding_number: curve passes within tolerance of the origin");

    const auto& v = g.samples();
    const std::size_t n = v.size();
    double total = 0.0;
    bool resolved = true;
    for (std::size_t k = 0; k < n; ++k) {
      const double inc = std::arg(v[(k + 1) % n] / v[k]);
      if (std::abs(inc) >= std::numbers::pi / 2.0) {
        resolved = false;
        break;
      }
      total += inc;
    }
    if (resolved) {
      const double w = total / kTwoPi;
      const long rounded = std::lround(w);
      if (std::abs(w - static_cast<double>(rounded)) > 1e-6)
        throw UnresolvedWinding(
            "winding_number: argument increments do not close up to an "
            "integer");
      return static_cast<int>(rounded);
    }
    if (attempt == max_doublings)
      throw UnresolvedWinding(
          "winding_number: grid doublings exhausted before resolving the "
          "argument increments");
    g = resample(g, 2 * n);
  }
}

double holder_norm(const CircleFunction& f, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("holder_norm: alpha must lie in (0,1)");
  const std::size_t n = f.size();
  const std::size_t stride = n > 256 ? n / 256 : 1;

  std::vector<cxd> pts;
  std::vector<double> angles;
  for (std::size_t k = 0; k < n; k += stride) {
    pts.push_back(f[k]);
    angles.push_back(f.theta(k));
  }
  double semi = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d = circular_distance(angles[i], angles[j]);
      if (d <= 0.0) continue;
      semi = std::max(semi, std::abs(pts[i] - pts[j]) / std::pow(d, alpha));
    }
  return f.max_modulus() + semi;
}

cxd extend_inside(const CircleFunction& f, cxd zeta) {
  if (std::abs(zeta) > 1.0 + 1e-12)
    throw std::invalid_argument("extend_inside: |zeta| must be <= 1");
  const auto& c = f.coeffs();
  const double total = c.total_energy();
  if (c.negative_energy() > 1e-10 * total && total > 0.0)
    throw NotAnalytic(
        "extend_inside: input carries negative Fourier modes beyond "
        "tolerance");
  cxd acc{};
  for (int n = c.max_mode(); n >= 0; --n) acc = acc * zeta + c.at(n);
  return acc;
}

CircleFunction derivative(const CircleFunction& f) {
  const std::size_t n = f.size();
  const auto& c = f.coeffs();
  std::vector<cxd> bins(n, cxd{});
  for (int k = 1; k <= c.max_mode(); ++k) {
    bins[static_cast<std::size_t>(k)] = cxd(0.0, k) * c.at(k);
    bins[n - static_cast<std::size_t>(k)] = cxd(0.0, -k) * c.at(-k);
  }
  // Nyquist bin dropped
  return CircleFunction::from_spectrum(std::move(bins));
}

CircleFunction resample(const CircleFunction& f, std::size_t m) {
  validate_grid(m);
  const std::size_t n = f.size();
  if (m == n) return f;
  const auto& c = f.coeffs();
  std::vector<cxd> bins(m, cxd{});
  const int keep = static_cast<int>(std::min(n, m)) / 2 - 1;
  bins[0] = c.at(0);
  for (int k = 1; k <= keep; ++k) {
    bins[static_cast<std::size_t>(k)] = c.at(k);
    bins[m - static_cast<std::size_t>(k)] = c.at(-k);
  }
  if (m > n) {
    // split the source Nyquist bin across the now-distinct +-n/2 modes
    bins[n / 2] = 0.5 * c.nyquist();
    bins[m - n / 2] = 0.5 * c.nyquist();
  } else {
    // fold the +-m/2 source modes into the destination Nyquist bin
    bins[m / 2] = c.at(static_cast<int>(m) / 2) + c.at(-static_cast<int>(m) / 2);
  }
  return CircleFunction::from_spectrum(std::move(bins));
}

namespace {

// Golden-section refinement of an extremum of h around theta0 +- width.
CircleExtremum golden_refine(const CircleFunction& f, double theta0,
                             double width, bool maximize) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto h = [&](double t) {
    const double v = f.interpolate(t).real();
    return maximize ? -v : v;
  };
  double a = theta0 - width, b = theta0 + width;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double h1 = h(x1), h2 = h(x2);
  for (int it = 0; it < 80 && (b - a) > 1e-13; ++it) {
    if (h1 < h2) {
      b = x2;
      x2 = x1;
      h2 = h1;
      x1 = b - phi * (b - a);
      h1 = h(x1);
    } else {
      a = x1;
      x1 = x2;
      h1 = h2;
      x2 = a + phi * (b - a);
      h2 = h(x2);
    }
  }
  const double t = 0.5 * (a + b);
  double v = f.interpolate(t).real();
  return {std::fmod(t + kTwoPi, kTwoPi), v};
}

}  // namespace

CircleExtremum refine_max(const CircleFunction& f) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < f.size(); ++k)
    if (f[k].real() > f[best].real()) best = k;
  return golden_refine(f, f.theta(best), kTwoPi / f.size(), true);
}

CircleExtremum refine_min(const CircleFunction& f) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < f.size(); ++k)
    if (f[k].real() < f[best].real()) best = k;
  return golden_refine(f, f.theta(best), kTwoPi / f.size(), false);
}

CircleExtremum refine_max_modulus(const CircleFunction& f) {
  CircleExtremum e = refine_max(f * f.conjugated());
  e.value = std::sqrt(std::max(0.0, e.value));
  return e;
}

}  // namespace crdisc
