#pragma once

#include <map>
#include <utility>
#include <vector>

#include "crdisc/circle.hpp"
#include "crdisc/errors.hpp"

namespace crdisc {

// Polynomial in (z, zbar): a finite map (mu, nu) -> complex coefficient.
// Zero coefficients are never stored.
class PolyZZbar {
 public:
  using Key = std::pair<int, int>;

  PolyZZbar() = default;

  struct Term {
    int mu = 0;
    int nu = 0;
    cxd coeff;
  };
  static PolyZZbar from_terms(const std::vector<Term>& terms);

  void add_term(int mu, int nu, cxd coeff);

  bool empty() const { return terms_.empty(); }
  // max (mu + nu); -1 for the zero polynomial
  int degree() const;
  // min (mu + nu); -1 for the zero polynomial
  int min_order() const;
  double coeff_scale() const;  // max |c|

  cxd eval(cxd z) const;
  CircleFunction eval_on(const CircleFunction& z) const;

  PolyZZbar dz() const;     // formal d/dz
  PolyZZbar dzbar() const;  // formal d/dzbar
  PolyZZbar conjugated() const;

  // c(nu, mu) == conj(c(mu, nu)) within tol * scale for every term, which is
  // equivalent to the polynomial being real-valued.
  bool is_real_valued(double tol = 1e-12) const;

  PolyZZbar& operator+=(const PolyZZbar& other);
  friend PolyZZbar operator+(PolyZZbar a, const PolyZZbar& b) {
    a += b;
    return a;
  }
  PolyZZbar& operator*=(cxd c);

  const std::map<Key, cxd>& terms() const { return terms_; }

 private:
  std::map<Key, cxd> terms_;
};

// Real-valued polynomial homogeneous of degree m in (z, zbar). Construction
// validates mu + nu == m for every term and the conjugate pairing
// c(nu, mu) == conj(c(mu, nu)), then symmetrizes exactly so realness holds to
// rounding. Violations name the offending (mu, nu) pair.
class HermitianHomPoly {
 public:
  static HermitianHomPoly from_poly(int m, const PolyZZbar& p,
                                    double tol = 1e-12);
  static HermitianHomPoly from_terms(int m,
                                     const std::vector<PolyZZbar::Term>& terms,
                                     double tol = 1e-12);

  int degree() const { return m_; }
  const PolyZZbar& poly() const { return poly_; }
  double coeff_scale() const { return poly_.coeff_scale(); }
  double eval(cxd z) const { return poly_.eval(z).real(); }

 private:
  HermitianHomPoly(int m, PolyZZbar p) : m_(m), poly_(std::move(p)) {}
  int m_ = 0;
  PolyZZbar poly_;
};

// Local graph model w = F_m(z) + R(z): real leading homogeneous term plus a
// (possibly complex-valued) remainder of order >= m+1, valid on |z| < radius.
class SurfaceGerm {
 public:
  static SurfaceGerm make(HermitianHomPoly leading, PolyZZbar remainder = {},
                          double radius = 1.0);

  const HermitianHomPoly& leading() const { return leading_; }
  const PolyZZbar& remainder() const { return remainder_; }
  double radius() const { return radius_; }
  int degree() const { return leading_.degree(); }

  PolyZZbar full() const;  // leading + remainder
  cxd eval(cxd z) const { return leading_.eval(z) + remainder_.eval(z); }

 private:
  SurfaceGerm(HermitianHomPoly leading, PolyZZbar remainder, double radius)
      : leading_(std::move(leading)),
        remainder_(std::move(remainder)),
        radius_(radius) {}
  HermitianHomPoly leading_;
  PolyZZbar remainder_;
  double radius_ = 1.0;
};

// f(theta) = F(e^{i theta}), so that F(r e^{i theta}) = r^m f(theta).
// Throws NonRealProfile if the samples fail the realness tolerance.
CircleFunction angular_profile(const HermitianHomPoly& F, std::size_t n = 1024);

struct SingularityCheck {
  bool isolated = false;
  double margin = 0.0;         // min over theta of (m f)^2 + f'^2
  double witness_theta = 0.0;  // minimizing angle (meaningful on failure)
  double scale = 0.0;
};

// The origin is an isolated CR singularity of the graph of F iff f and f'
// never vanish simultaneously; checked on a 4096-point grid.
SingularityCheck is_isolated_cr_singularity(const HermitianHomPoly& F);

struct SubharmonicityReport {
  bool everywhere_subharmonic = false;
  std::vector<double> fails_at;  // midpoints of the arcs where it fails
  double min_value = 0.0;        // min of the angular profile of d2F/dz dzbar
  double argmin_theta = 0.0;
};

SubharmonicityReport subharmonicity_report(const HermitianHomPoly& F);

// w = |z|^2 + gamma (z^2 + zbar^2) + remainder, gamma >= 0, gamma != 1/2.
SurfaceGerm make_bishop_quadric(double gamma, PolyZZbar remainder = {},
                                double radius = 1.0);

// w = (C/2)(z^4 + zbar^4) + eps (z^3 zbar + z zbar^3) + |z|^4 + remainder,
// C in (1/3, 2/3).
SurfaceGerm make_example_4_1(double eps, double C, PolyZZbar remainder = {},
                             double radius = 1.0);

// w = |z|^m + remainder for even m >= 2.
SurfaceGerm make_power_germ(int m, PolyZZbar remainder = {},
                            double radius = 1.0);

}  // namespace crdisc
