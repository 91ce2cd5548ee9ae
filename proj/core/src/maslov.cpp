#include "crdisc/maslov.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace crdisc {

namespace {

std::size_t grid_for_degree(int degree) {
  std::size_t n = 1024;
  while (n < 8 * static_cast<std::size_t>(std::max(degree, 1))) n *= 2;
  return n;
}

int winding_at_radius(const PolyZZbar& dzbar, double r, std::size_t n) {
  const CircleFunction curve = CircleFunction::sample(
      n, [&](double t) { return dzbar.eval(std::polar(r, t)); });
  return winding_number(curve);
}

}  // namespace

int index_via_winding(const SurfaceGerm& germ, double r) {
  if (!(r > 0.0 && r < germ.radius()))
    throw ParameterOutOfRange(
        "index_via_winding: r must lie in (0, radius of validity)");
  const PolyZZbar dzbar = germ.full().dzbar();
  const std::size_t n = grid_for_degree(std::max(germ.full().degree(), 2));

  int w[3];
  int i = 0;
  for (double rr : {r, r / 2.0, r / 4.0}) {
    try {
      w[i++] = winding_at_radius(dzbar, rr, n);
    } catch (const CurveThroughOrigin&) {
      std::ostringstream os;
      os << "index_via_winding: dF/dzbar vanishes on the circle |z| = " << rr;
      throw CurveThroughOrigin(os.str());
    }
  }
  if (w[0] != w[1] || w[1] != w[2]) {
    std::ostringstream os;
    os << "index_via_winding: windings at r, r/2, r/4 disagree (" << w[0]
       << ", " << w[1] << ", " << w[2] << "); r is not small enough";
    throw Unstable(os.str());
  }
  return w[0];
}

ZeroCountIndex index_via_zero_count(const HermitianHomPoly& F) {
  const SingularityCheck chk = is_isolated_cr_singularity(F);
  if (!chk.isolated) {
    std::ostringstream os;
    os << "index_via_zero_count: CR singularity is not isolated (margin "
       << chk.margin << " at theta = " << chk.witness_theta << ")";
    throw DegenerateSingularity(os.str());
  }

  const std::size_t n = 4096;
  const CircleFunction f = angular_profile(F, n);
  const CircleFunction fp = derivative(f);

  ZeroCountIndex out;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = f[k].real();
    const double b = f[(k + 1) % n].real();
    double root;
    if (a == 0.0) {
      // grid point lands exactly on a zero; the neighbours must straddle it
      const double prev = f[(k + n - 1) % n].real();
      if (prev * b >= 0.0)
        throw NonSimpleZero(
            "index_via_zero_count: profile touches zero without a sign "
            "change");
      root = f.theta(k);
    } else if (a * b < 0.0) {
      double lo = f.theta(k), hi = f.theta(k) + kTwoPi / n;
      double flo = a;
      for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f.interpolate(mid).real();
        if ((flo < 0.0) == (fm < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      root = 0.5 * (lo + hi);
    } else {
      continue;
    }
    // simple-zero guard: |f'| at the root is bounded below by the
    // singularity margin, since (m f)^2 + f'^2 >= margin and f(root) = 0
    if (std::abs(fp.interpolate(root).real()) < 0.5 * std::sqrt(chk.margin))
      throw NonSimpleZero(
          "index_via_zero_count: profile derivative vanishes at a zero of "
          "the profile");
    out.zero_angles.push_back(std::fmod(root, kTwoPi));
  }
  std::sort(out.zero_angles.begin(), out.zero_angles.end());
  out.zero_count = static_cast<int>(out.zero_angles.size());
  if (out.zero_count % 2 != 0)
    throw Error("index_via_zero_count: odd number of profile zeros");
  out.index = -out.zero_count / 2 + 1;
  return out;
}

int index_via_roots(const PolyZZbar& F, int m) {
  const PolyZZbar dzbar = F.dzbar();
  // Q(z, w) substitutes w for zbar; on w = 1 the polynomial collapses to
  // p(z) = sum over terms c * z^mu.
  std::vector<cxd> coeff(static_cast<std::size_t>(std::max(m, 1)), cxd{});
  for (const auto& [key, c] : dzbar.terms()) {
    if (key.first + key.second != m - 1)
      throw ParameterOutOfRange(
          "index_via_roots: input is not homogeneous of degree m");
    coeff[static_cast<std::size_t>(key.first)] += c;
  }
  const std::size_t n = grid_for_degree(m);
  const CircleFunction p = CircleFunction::sample(n, [&](double t) {
    const cxd z = std::polar(1.0, t);
    cxd acc{};
    for (std::size_t k = coeff.size(); k-- > 0;) acc = acc * z + coeff[k];
    return acc;
  });
  int roots_inside;
  try {
    roots_inside = winding_number(p);
  } catch (const Error& e) {
    throw RootOnCircle(std::string("index_via_roots: ") + e.what());
  }
  return 2 * roots_inside - (m - 1);
}

int index_via_roots(const HermitianHomPoly& F) {
  return index_via_roots(F.poly(), F.degree());
}

IndexReport index_report(const SurfaceGerm& germ, double r) {
  IndexReport rep;
  rep.ind_winding = index_via_winding(germ, r);
  const ZeroCountIndex zc = index_via_zero_count(germ.leading());
  rep.ind_zero_count = zc.index;
  rep.zero_count = zc.zero_count;
  rep.ind_roots = index_via_roots(germ.leading());
  rep.agree =
      rep.ind_winding == rep.ind_zero_count && rep.ind_winding == rep.ind_roots;
  if (!rep.agree) {
    std::ostringstream os;
    os << "index formulas disagree: winding " << rep.ind_winding
       << ", zero-count " << rep.ind_zero_count << ", roots " << rep.ind_roots;
    throw Disagreement(os.str());
  }
  rep.classification = rep.ind_winding > 0 ? Classification::positive_index
                                           : Classification::nonpositive_index;
  if (germ.degree() == 2)
    rep.nondegenerate_class = rep.ind_winding > 0 ? ConicClass::elliptic
                                                  : ConicClass::hyperbolic;
  return rep;
}

}  // namespace crdisc
