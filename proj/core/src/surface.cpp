#include "crdisc/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace crdisc {

namespace {

constexpr double kDropTol = 0.0;  // exact-zero coefficients only

cxd ipow(cxd z, int k) {
  cxd acc(1.0, 0.0);
  while (k-- > 0) acc *= z;
  return acc;
}

std::string pair_str(int mu, int nu) {
  std::ostringstream os;
  os << "(" << mu << ", " << nu << ")";
  return os.str();
}

// Profile of a real-valued (Hermitian-symmetric) polynomial on the unit
// circle; realness asserted against the coefficient scale.
CircleFunction real_profile(const PolyZZbar& p, std::size_t n,
                            const char* what) {
  CircleFunction raw = p.eval_on(
      CircleFunction::sample(n, [](double t) { return std::polar(1.0, t); }));
  if (!raw.is_real())
    throw NonRealProfile(std::string(what) +
                         ": profile has a non-negligible imaginary part "
                         "(broken Hermitian symmetry)");
  return raw.real_part();
}

}  // namespace

// ---------------------------------------------------------------------------
// PolyZZbar
// ---------------------------------------------------------------------------

PolyZZbar PolyZZbar::from_terms(const std::vector<Term>& terms) {
  PolyZZbar p;
  for (const auto& t : terms) p.add_term(t.mu, t.nu, t.coeff);
  return p;
}

void PolyZZbar::add_term(int mu, int nu, cxd coeff) {
  if (mu < 0 || nu < 0)
    throw std::invalid_argument("polynomial exponents must be nonnegative");
  const Key key{mu, nu};
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    if (std::abs(coeff) > kDropTol) terms_.emplace(key, coeff);
    return;
  }
  it->second += coeff;
  if (std::abs(it->second) <= kDropTol) terms_.erase(it);
}

int PolyZZbar::degree() const {
  int d = -1;
  for (const auto& [key, c] : terms_) d = std::max(d, key.first + key.second);
  return d;
}

int PolyZZbar::min_order() const {
  if (terms_.empty()) return -1;
  int d = std::numeric_limits<int>::max();
  for (const auto& [key, c] : terms_) d = std::min(d, key.first + key.second);
  return d;
}

double PolyZZbar::coeff_scale() const {
  double s = 0.0;
  for (const auto& [key, c] : terms_) s = std::max(s, std::abs(c));
  return s;
}

cxd PolyZZbar::eval(cxd z) const {
  const cxd zb = std::conj(z);
  cxd acc{};
  for (const auto& [key, c] : terms_)
    acc += c * ipow(z, key.first) * ipow(zb, key.second);
  return acc;
}

CircleFunction PolyZZbar::eval_on(const CircleFunction& z) const {
  std::vector<cxd> v(z.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = eval(z[k]);
  return CircleFunction::from_samples(std::move(v));
}

PolyZZbar PolyZZbar::dz() const {
  PolyZZbar out;
  for (const auto& [key, c] : terms_)
    if (key.first > 0)
      out.add_term(key.first - 1, key.second,
                   c * static_cast<double>(key.first));
  return out;
}

PolyZZbar PolyZZbar::dzbar() const {
  PolyZZbar out;
  for (const auto& [key, c] : terms_)
    if (key.second > 0)
      out.add_term(key.first, key.second - 1,
                   c * static_cast<double>(key.second));
  return out;
}

PolyZZbar PolyZZbar::conjugated() const {
  PolyZZbar out;
  for (const auto& [key, c] : terms_)
    out.add_term(key.second, key.first, std::conj(c));
  return out;
}

bool PolyZZbar::is_real_valued(double tol) const {
  const double scale = coeff_scale();
  for (const auto& [key, c] : terms_) {
    auto it = terms_.find({key.second, key.first});
    const cxd mirror = it == terms_.end() ? cxd{} : it->second;
    if (std::abs(mirror - std::conj(c)) > tol * (1.0 + scale)) return false;
  }
  return true;
}

PolyZZbar& PolyZZbar::operator+=(const PolyZZbar& other) {
  for (const auto& [key, c] : other.terms_)
    add_term(key.first, key.second, c);
  return *this;
}

PolyZZbar& PolyZZbar::operator*=(cxd c) {
  if (c == cxd{}) {
    terms_.clear();
    return *this;
  }
  for (auto& [key, coeff] : terms_) coeff *= c;
  return *this;
}

// ---------------------------------------------------------------------------
// HermitianHomPoly
// ---------------------------------------------------------------------------

HermitianHomPoly HermitianHomPoly::from_poly(int m, const PolyZZbar& p,
                                             double tol) {
  if (m < 2)
    throw ParameterOutOfRange("homogeneous degree must be >= 2, got " +
                              std::to_string(m));
  const double scale = p.coeff_scale();
  PolyZZbar sym;
  for (const auto& [key, c] : p.terms()) {
    const auto [mu, nu] = key;
    if (mu + nu != m)
      throw HermitianViolation("term " + pair_str(mu, nu) +
                               " is not homogeneous of degree " +
                               std::to_string(m));
    auto it = p.terms().find({nu, mu});
    const cxd mirror = it == p.terms().end() ? cxd{} : it->second;
    if (std::abs(mirror - std::conj(c)) > tol * (1.0 + scale))
      throw HermitianViolation(
          "coefficient at " + pair_str(nu, mu) +
          " is not the conjugate of the coefficient at " + pair_str(mu, nu));
    if (mu > nu) {
      const cxd avg = 0.5 * (c + std::conj(mirror));
      sym.add_term(mu, nu, avg);
      sym.add_term(nu, mu, std::conj(avg));
    } else if (mu == nu) {
      sym.add_term(mu, nu, cxd(c.real(), 0.0));
    }
  }
  return HermitianHomPoly(m, std::move(sym));
}

HermitianHomPoly HermitianHomPoly::from_terms(
    int m, const std::vector<PolyZZbar::Term>& terms, double tol) {
  return from_poly(m, PolyZZbar::from_terms(terms), tol);
}

// ---------------------------------------------------------------------------
// SurfaceGerm
// ---------------------------------------------------------------------------

SurfaceGerm SurfaceGerm::make(HermitianHomPoly leading, PolyZZbar remainder,
                              double radius) {
  if (!(radius > 0.0))
    throw ParameterOutOfRange("radius of validity must be positive");
  const int m = leading.degree();
  if (!remainder.empty() && remainder.min_order() <= m) {
    std::ostringstream os;
    os << "remainder must be O(|z|^" << m + 1 << "); found a term of order "
       << remainder.min_order();
    throw RemainderOrderTooLow(os.str());
  }
  const SingularityCheck chk = is_isolated_cr_singularity(leading);
  if (!chk.isolated) {
    std::ostringstream os;
    os << "leading term does not have an isolated CR singularity at 0 "
          "(margin "
       << chk.margin << " at theta = " << chk.witness_theta << ")";
    throw DegenerateSingularity(os.str());
  }
  return SurfaceGerm(std::move(leading), std::move(remainder), radius);
}

PolyZZbar SurfaceGerm::full() const {
  PolyZZbar p = leading_.poly();
  p += remainder_;
  return p;
}

// ---------------------------------------------------------------------------
// Profile and checks
// ---------------------------------------------------------------------------

CircleFunction angular_profile(const HermitianHomPoly& F, std::size_t n) {
  return real_profile(F.poly(), n, "angular_profile");
}

SingularityCheck is_isolated_cr_singularity(const HermitianHomPoly& F) {
  const std::size_t n = 4096;
  const CircleFunction f = angular_profile(F, n);
  const CircleFunction fp = derivative(f);
  const double m = static_cast<double>(F.degree());

  SingularityCheck out;
  out.scale = F.coeff_scale();
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double mf = m * f[k].real();
    const double d = fp[k].real();
    const double val = mf * mf + d * d;
    if (val < best) {
      best = val;
      arg = k;
    }
  }
  out.margin = best;
  out.witness_theta = f.theta(arg);
  out.isolated = best > 1e-9 * out.scale * out.scale;
  return out;
}

SubharmonicityReport subharmonicity_report(const HermitianHomPoly& F) {
  const PolyZZbar lap = F.poly().dz().dzbar();
  SubharmonicityReport out;
  if (lap.empty()) {
    // harmonic leading term: Laplacian identically zero
    out.everywhere_subharmonic = true;
    return out;
  }
  const std::size_t n = 4096;
  const CircleFunction prof = real_profile(lap, n, "subharmonicity_report");
  const CircleExtremum mn = refine_min(prof);
  out.min_value = mn.value;
  out.argmin_theta = mn.theta;
  const double tol = 1e-12 * (1.0 + lap.coeff_scale());
  out.everywhere_subharmonic = mn.value >= -tol;
  if (out.everywhere_subharmonic) return out;

  // locate the arcs where the profile is negative and report their midpoints
  std::vector<double> crossings;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = prof[k].real();
    const double b = prof[(k + 1) % n].real();
    if ((a > 0.0 && b < 0.0) || (a < 0.0 && b > 0.0)) {
      double lo = prof.theta(k), hi = prof.theta(k) + kTwoPi / n;
      double flo = a;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = prof.interpolate(mid).real();
        if ((flo < 0.0) == (fm < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      crossings.push_back(std::fmod(0.5 * (lo + hi), kTwoPi));
    }
  }
  std::sort(crossings.begin(), crossings.end());
  if (crossings.empty()) {
    // negative everywhere
    out.fails_at.push_back(mn.theta);
    return out;
  }
  for (std::size_t i = 0; i < crossings.size(); ++i) {
    const double a = crossings[i];
    const double b = i + 1 < crossings.size() ? crossings[i + 1]
                                              : crossings[0] + kTwoPi;
    const double mid = std::fmod(0.5 * (a + b), kTwoPi);
    if (prof.interpolate(mid).real() < 0.0) out.fails_at.push_back(mid);
  }
  std::sort(out.fails_at.begin(), out.fails_at.end());
  return out;
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

SurfaceGerm make_bishop_quadric(double gamma, PolyZZbar remainder,
                                double radius) {
  if (!(gamma >= 0.0))
    throw ParameterOutOfRange("bishop quadric requires gamma >= 0");
  if (std::abs(gamma - 0.5) < 1e-12)
    throw ParabolicInput(
        "gamma = 1/2 is the parabolic case and is excluded");
  PolyZZbar lead;
  lead.add_term(1, 1, 1.0);
  if (gamma != 0.0) {
    lead.add_term(2, 0, gamma);
    lead.add_term(0, 2, gamma);
  }
  return SurfaceGerm::make(HermitianHomPoly::from_poly(2, lead),
                           std::move(remainder), radius);
}

SurfaceGerm make_example_4_1(double eps, double C, PolyZZbar remainder,
                             double radius) {
  if (!(C > 1.0 / 3.0 && C < 2.0 / 3.0))
    throw ParameterOutOfRange("C must lie in (1/3, 2/3), got " +
                              std::to_string(C));
  PolyZZbar lead;
  lead.add_term(4, 0, 0.5 * C);
  lead.add_term(0, 4, 0.5 * C);
  lead.add_term(3, 1, eps);
  lead.add_term(1, 3, eps);
  lead.add_term(2, 2, 1.0);
  return SurfaceGerm::make(HermitianHomPoly::from_poly(4, lead),
                           std::move(remainder), radius);
}

SurfaceGerm make_power_germ(int m, PolyZZbar remainder, double radius) {
  if (m < 2 || m % 2 != 0)
    throw ParameterOutOfRange(
        "power germ |z|^m requires even m >= 2, got " + std::to_string(m));
  PolyZZbar lead;
  lead.add_term(m / 2, m / 2, 1.0);
  return SurfaceGerm::make(HermitianHomPoly::from_poly(m, lead),
                           std::move(remainder), radius);
}

}  // namespace crdisc
