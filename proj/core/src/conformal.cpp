#include "crdisc/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace crdisc {

CircleFunction level_curve(const HermitianHomPoly& F, std::size_t n) {
  const CircleFunction f = angular_profile(F, n);
  const CircleExtremum mn = refine_min(f);
  if (!(mn.value > 1e-12 * (1.0 + F.coeff_scale()))) {
    std::ostringstream os;
    os << "level_curve: angular profile is not strictly positive (min "
       << mn.value << " at theta = " << mn.theta
       << "); the index is not positive and the level set F = 1 does not "
          "enclose the singularity";
    throw ProfileNotPositive(os.str());
  }
  const double inv_m = -1.0 / static_cast<double>(F.degree());
  std::vector<double> rho(n);
  for (std::size_t k = 0; k < n; ++k)
    rho[k] = std::pow(f[k].real(), inv_m);
  return CircleFunction::from_real(std::move(rho));
}

namespace {

struct TheodorsenResult {
  std::vector<double> u;
  int iterations = 0;
  double damping = 0.0;
  std::string method;
};

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// conj[w] as raw samples
std::vector<double> conjugate_samples(const std::vector<double>& w) {
  const CircleFunction h = hilbert(CircleFunction::from_real(w));
  std::vector<double> out(w.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = h[k].real();
  return out;
}

// GMRES (full orthogonalization, Givens rotations) for the Newton systems
// (I - conj . diag(w)) x = b. The matvec costs one conjugation.
template <typename MatVec>
std::vector<double> gmres(const MatVec& A, const std::vector<double>& b,
                          double rtol, int max_m) {
  const std::size_t n = b.size();
  const auto dot = [n](const std::vector<double>& x,
                       const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += x[k] * y[k];
    return s;
  };
  const double beta = std::sqrt(dot(b, b));
  std::vector<double> x(n, 0.0);
  if (beta == 0.0) return x;

  std::vector<std::vector<double>> V;
  V.push_back(b);
  for (double& z : V[0]) z /= beta;
  std::vector<std::vector<double>> cols;  // rotated Hessenberg columns
  std::vector<double> cs, sn, g{beta};

  int m = 0;
  for (int j = 0; j < max_m; ++j) {
    std::vector<double> w = A(V[static_cast<std::size_t>(j)]);
    std::vector<double> col(static_cast<std::size_t>(j) + 2, 0.0);
    for (int pass = 0; pass < 2; ++pass)  // CGS with one re-orthogonalization
      for (int i = 0; i <= j; ++i) {
        const double c = dot(w, V[static_cast<std::size_t>(i)]);
        col[static_cast<std::size_t>(i)] += c;
        for (std::size_t k = 0; k < n; ++k)
          w[k] -= c * V[static_cast<std::size_t>(i)][k];
      }
    col[static_cast<std::size_t>(j) + 1] = std::sqrt(dot(w, w));

    for (int i = 0; i < j; ++i) {
      const double t = cs[i] * col[i] + sn[i] * col[i + 1];
      col[static_cast<std::size_t>(i) + 1] =
          -sn[i] * col[i] + cs[i] * col[i + 1];
      col[static_cast<std::size_t>(i)] = t;
    }
    const double a = col[static_cast<std::size_t>(j)];
    const double h = col[static_cast<std::size_t>(j) + 1];
    const double r = std::hypot(a, h);
    const double c = r == 0.0 ? 1.0 : a / r;
    const double s = r == 0.0 ? 0.0 : h / r;
    cs.push_back(c);
    sn.push_back(s);
    col[static_cast<std::size_t>(j)] = r;
    col[static_cast<std::size_t>(j) + 1] = 0.0;
    g.push_back(-s * g[static_cast<std::size_t>(j)]);
    g[static_cast<std::size_t>(j)] *= c;
    cols.push_back(std::move(col));
    m = j + 1;

    if (std::abs(g[static_cast<std::size_t>(m)]) < rtol * beta || h == 0.0 ||
        r == 0.0)
      break;
    for (double& z : w) z /= h;
    V.push_back(std::move(w));
  }

  std::vector<double> y(static_cast<std::size_t>(m), 0.0);
  for (int i = m - 1; i >= 0; --i) {
    double s = g[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < m; ++j)
      s -= cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] *
           y[static_cast<std::size_t>(j)];
    y[static_cast<std::size_t>(i)] =
        s / cols[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
  }
  for (int j = 0; j < m; ++j)
    for (std::size_t k = 0; k < n; ++k)
      x[k] += y[static_cast<std::size_t>(j)] * V[static_cast<std::size_t>(j)][k];
  return x;
}

// Newton-GMRES for F(u) = u - conj[sigma(theta + u)] = 0. Backtracking line
// search on the sup norm of the residual. Returns false when stuck.
bool newton_theodorsen(std::size_t n, const std::function<double(double)>& sigma,
                       const std::function<double(double)>& dsigma,
                       std::vector<double>& u, int& iterations) {
  const auto residual = [&](const std::vector<double>& uu) {
    std::vector<double> s(n);
    for (std::size_t k = 0; k < n; ++k)
      s[k] = sigma(CircleFunction::angle(k, n) + uu[k]);
    std::vector<double> r = conjugate_samples(s);
    for (std::size_t k = 0; k < n; ++k) r[k] = uu[k] - r[k];
    return r;
  };

  std::vector<double> f = residual(u);
  double fnorm = sup_abs(f);
  int slow = 0;
  for (int it = 0; it < 40; ++it) {
    if (fnorm < 1e-12) return true;
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k)
      w[k] = dsigma(CircleFunction::angle(k, n) + u[k]);
    const auto jac = [&](const std::vector<double>& v) {
      std::vector<double> wv(n);
      for (std::size_t k = 0; k < n; ++k) wv[k] = w[k] * v[k];
      std::vector<double> hv = conjugate_samples(wv);
      for (std::size_t k = 0; k < n; ++k) hv[k] = v[k] - hv[k];
      return hv;
    };
    std::vector<double> rhs(n);
    for (std::size_t k = 0; k < n; ++k) rhs[k] = -f[k];
    const std::vector<double> delta = gmres(jac, rhs, 1e-3, 150);

    bool accepted = false;
    double step = 1.0;
    for (int ls = 0; ls < 25; ++ls) {
      std::vector<double> u_try(n);
      for (std::size_t k = 0; k < n; ++k) u_try[k] = u[k] + step * delta[k];
      std::vector<double> f_try = residual(u_try);
      const double fn_try = sup_abs(f_try);
      if (fn_try < (1.0 - 0.25 * step) * fnorm || fn_try < 1e-12) {
        slow = fn_try > 0.7 * fnorm ? slow + 1 : 0;
        u = std::move(u_try);
        f = std::move(f_try);
        fnorm = fn_try;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++iterations;
    // bail out when globally stuck (crowded domains the Newton basin never
    // reaches); the caller reacts by refining or reporting
    if (!accepted || slow >= 5) return false;
  }
  return fnorm < 1e-11;
}

// Solve the Theodorsen equation u = conj[sigma(theta + u)]. The damped
// Picard iteration is the first choice; crowded domains where it stalls are
// finished by Newton-GMRES from the best Picard iterate.
TheodorsenResult theodorsen_iterate(
    std::size_t n, const std::function<double(double)>& sigma,
    const std::function<double(double)>& dsigma, std::vector<double> u0) {
  const int picard_budget = n <= 4096 ? 600 : 400;
  const double tol = 1e-11;

  TheodorsenResult out;
  out.damping = 0.5;
  out.method = "picard";
  std::vector<double> u = std::move(u0), s(n), u_next(n);
  u.resize(n, 0.0);

  std::vector<double> best_u = u;
  double best_diff = std::numeric_limits<double>::infinity();
  for (int it = 0; it < picard_budget; ++it) {
    for (std::size_t k = 0; k < n; ++k)
      s[k] = sigma(CircleFunction::angle(k, n) + u[k]);
    const CircleFunction conj_s = hilbert(CircleFunction::from_real(s));
    double diff = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      u_next[k] = (1.0 - out.damping) * u[k] + out.damping * conj_s[k].real();
      diff = std::max(diff, std::abs(u_next[k] - u[k]));
    }
    u.swap(u_next);
    ++out.iterations;
    if (!std::isfinite(diff)) break;
    if (diff < best_diff) {
      best_diff = diff;
      best_u = u;
    }
    if (diff < tol) {
      out.u = std::move(u);
      return out;
    }
  }

  // Newton finisher for profiles where the damped iteration stalls; kept to
  // moderate grids, larger ones restart from the refined warm start instead.
  if (n <= 4096) {
    out.method = "picard+newton";
    u = std::move(best_u);
    if (newton_theodorsen(n, sigma, dsigma, u, out.iterations)) {
      out.u = std::move(u);
      return out;
    }
  }
  throw NoConvergence(
      "riemann_map: neither the damped Theodorsen iteration nor the Newton "
      "stage reached the 1e-11 tolerance");
}

// Assembles the map from a converged correspondence; throws NonUnivalent /
// NotAnalytic when the certificates fail (the caller reacts by refining).
ConformalMap assemble_map(const CircleFunction& rho,
                          const std::function<double(double)>& log_rho,
                          const TheodorsenResult& thr) {
  const std::size_t n = rho.size();
  const auto& u = thr.u;

  ConformalMap map;
  map.rho = rho;
  map.iterations = thr.iterations;
  map.damping = thr.damping;
  map.method = thr.method;
  map.phi_offset = CircleFunction::from_real(std::vector<double>(u));

  // univalence: phi(theta) = theta + u(theta) must be strictly increasing
  const double step = kTwoPi / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double dphi = step + u[(k + 1) % n] - u[k];
    if (!(dphi > 0.0))
      throw NonUnivalent(
          "riemann_map: boundary correspondence is not strictly increasing");
  }

  std::vector<cxd> g(n);
  double mean_log = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double phi_k = CircleFunction::angle(k, n) + u[k];
    const double lr = log_rho(phi_k);
    g[k] = std::polar(std::exp(lr), phi_k);
    mean_log += lr;
  }
  map.g_boundary = CircleFunction::from_samples(std::move(g));
  map.g_prime_at_0 = std::exp(mean_log / static_cast<double>(n));

  // conformality certificate: boundary values of a holomorphic G carry no
  // negative Fourier modes
  const double total = map.g_boundary.coeffs().total_energy();
  if (map.g_boundary.coeffs().negative_energy() > 1e-9 * total)
    throw NotAnalytic(
        "riemann_map: boundary data carries negative-mode energy above "
        "1e-9 of total (under-resolved correspondence)");

  // G'(zeta) = (d/dtheta G(e^{i theta})) / (i e^{i theta}); nonvanishing on
  // the boundary for an analytic level curve
  const CircleFunction dg = derivative(map.g_boundary);
  std::vector<cxd> gp(n);
  for (std::size_t k = 0; k < n; ++k) {
    const cxd izeta = cxd(0.0, 1.0) * std::polar(1.0, map.g_boundary.theta(k));
    gp[k] = dg[k] / izeta;
  }
  map.g_deriv = CircleFunction::from_samples(std::move(gp));
  if (!(map.g_deriv.min_modulus() > 0.0))
    throw NonUnivalent("riemann_map: G' vanishes on the boundary grid");

  map.kappa = kappa_of(map);
  return map;
}

ConformalMap riemann_map_impl(const CircleFunction& rho_in,
                              const std::function<double(double)>& log_rho,
                              const std::function<double(double)>& dlog_rho) {
  if (!rho_in.is_real())
    throw NonRealInput("riemann_map: rho must be real-valued");
  if (!(rho_in.min_modulus() > 0.0) || refine_min(rho_in).value <= 0.0)
    throw ParameterOutOfRange("riemann_map: rho must be strictly positive");

  constexpr std::size_t kMaxGrid = 16384;
  CircleFunction rho = rho_in;
  std::vector<double> warm;
  std::string last_error;
  for (std::size_t n = rho_in.size(); n <= kMaxGrid; n *= 2) {
    if (n != rho.size()) rho = resample(rho_in, n);
    TheodorsenResult thr;
    try {
      thr = theodorsen_iterate(n, log_rho, dlog_rho, std::move(warm));
    } catch (const NoConvergence& e) {
      last_error = e.what();
      warm.clear();
      continue;
    }
    try {
      return assemble_map(rho, log_rho, thr);
    } catch (const Error& e) {
      // under-resolved: double the grid, restarting from this solution
      last_error = e.what();
      if (2 * n <= kMaxGrid) {
        const CircleFunction fine =
            resample(CircleFunction::from_real(thr.u), 2 * n);
        warm.resize(2 * n);
        for (std::size_t k = 0; k < 2 * n; ++k) warm[k] = fine[k].real();
      }
    }
  }
  throw NoConvergence(
      "riemann_map: no certified boundary correspondence up to the " +
      std::to_string(kMaxGrid) +
      "-point grid (the level curve is too crowded for a uniform grid); "
      "last failure: " +
      last_error);
}

}  // namespace

ConformalMap riemann_map(const CircleFunction& rho) {
  std::vector<double> lr(rho.size());
  for (std::size_t k = 0; k < rho.size(); ++k)
    lr[k] = std::log(rho[k].real());
  // capture-by-value keeps the interpolants alive inside the callables
  const CircleFunction sigma = CircleFunction::from_real(std::move(lr));
  const CircleFunction dsigma = derivative(sigma);
  return riemann_map_impl(
      rho, [sigma](double t) { return sigma.interpolate(t).real(); },
      [dsigma](double t) { return dsigma.interpolate(t).real(); });
}

ConformalMap riemann_map(const CircleFunction& rho,
                         const std::function<double(double)>& log_rho_eval) {
  if (!log_rho_eval) return riemann_map(rho);
  std::vector<double> dlr(rho.size());
  for (std::size_t k = 0; k < rho.size(); ++k)
    dlr[k] = log_rho_eval(rho.theta(k));
  const CircleFunction dsigma =
      derivative(CircleFunction::from_real(std::move(dlr)));
  return riemann_map_impl(
      rho, log_rho_eval,
      [dsigma](double t) { return dsigma.interpolate(t).real(); });
}

ConformalMap riemann_map_for(const HermitianHomPoly& F, std::size_t n) {
  const CircleFunction rho = level_curve(F, n);
  const PolyZZbar poly = F.poly();
  const PolyZZbar dzF = poly.dz();
  const double m = static_cast<double>(F.degree());
  // log rho = -(1/m) log f with f(t) = F(e^{it});
  // f'(t) = 2 Re(i e^{it} dF/dz(e^{it}))
  const auto log_rho = [poly, m](double t) {
    return -std::log(poly.eval(std::polar(1.0, t)).real()) / m;
  };
  const auto dlog_rho = [poly, dzF, m](double t) {
    const cxd z = std::polar(1.0, t);
    const double f = poly.eval(z).real();
    const double fp = 2.0 * (cxd(0.0, 1.0) * z * dzF.eval(z)).real();
    return -fp / (m * f);
  };
  return riemann_map_impl(rho, log_rho, dlog_rho);
}

double kappa_of(const ConformalMap& map) {
  return 0.5 / refine_max_modulus(map.g_boundary).value;
}

CircleFunction aux_R(const HermitianHomPoly& F, const ConformalMap& map) {
  const PolyZZbar dzF = F.poly().dz();
  const std::size_t n = map.g_boundary.size();
  std::vector<cxd> vals(n);
  for (std::size_t k = 0; k < n; ++k) {
    const cxd zeta = std::polar(1.0, map.g_boundary.theta(k));
    vals[k] =
        map.kappa * zeta * map.g_deriv[k] * dzF.eval(map.kappa * map.g_boundary[k]);
  }
  const CircleFunction raw = CircleFunction::from_samples(std::move(vals));
  double max_im = 0.0, min_re = std::numeric_limits<double>::infinity(),
         max_abs = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    max_im = std::max(max_im, std::abs(raw[k].imag()));
    min_re = std::min(min_re, raw[k].real());
    max_abs = std::max(max_abs, std::abs(raw[k]));
  }
  if (max_im > 1e-8 * max_abs || !(min_re > 0.0)) {
    std::ostringstream os;
    os << "aux_R: R is not a positive real function (max |Im| = " << max_im
       << ", min Re = " << min_re << "); the map or the profile is broken";
    throw RNotPositiveReal(os.str());
  }
  return raw.real_part();
}

void export_map_csv(const ConformalMap& map, const CircleFunction& R,
                    std::ostream& os) {
  os << "theta,re_g,im_g,rho,phi,R\n";
  os.precision(17);
  const std::size_t n = map.g_boundary.size();
  for (std::size_t k = 0; k < n; ++k) {
    os << map.g_boundary.theta(k) << ',' << map.g_boundary[k].real() << ','
       << map.g_boundary[k].imag() << ',' << map.rho[k].real() << ','
       << map.phi(k) << ',' << R[k].real() << '\n';
  }
}

}  // namespace crdisc
