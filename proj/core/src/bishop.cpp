#include "crdisc/bishop.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <utility>

namespace crdisc {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

CircleFunction scaled_g(const ConformalMap& map, double r) {
  return cxd(map.kappa * r, 0.0) * map.g_boundary;
}

struct GateResult {
  std::optional<ConformalMap> map;
  CircleFunction R;
  std::string error;
};

// Positive-index gate shared by the family/probe drivers: the construction
// starts from the level curve F_m = 1, which exists iff the profile is
// strictly positive.
GateResult build_gate(const SurfaceGerm& germ, std::size_t grid) {
  GateResult out;
  try {
    ConformalMap map = riemann_map_for(germ.leading(), grid);
    out.R = aux_R(germ.leading(), map);
    out.map = std::move(map);
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

void SolveConfig::validate() const {
  if (!(delta > 0.5 && delta < 1.0))
    throw ParameterOutOfRange("SolveConfig: delta must lie in (1/2, 1)");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ParameterOutOfRange("SolveConfig: alpha must lie in (0, 1)");
  if (!(tol > 0.0))
    throw ParameterOutOfRange("SolveConfig: tol must be positive");
  if (max_iter < 1)
    throw ParameterOutOfRange("SolveConfig: max_iter must be >= 1");
  if (grid < 64 || !is_pow2(grid))
    throw ParameterOutOfRange(
        "SolveConfig: grid must be a power of two >= 64");
}

HoloPerturbation HoloPerturbation::wrap(CircleFunction f) {
  const auto& c = f.coeffs();
  const double total = c.total_energy();
  if (total > 0.0 && c.negative_energy() > 1e-10 * total)
    throw NotAnalytic(
        "HoloPerturbation: negative-mode energy exceeds 1e-10 of total");
  const double scale = 1.0 + f.max_modulus();
  if (std::abs(c.at(0).imag()) > 1e-10 * scale)
    throw NotAnalytic("HoloPerturbation: mode 0 is not real");
  return HoloPerturbation{std::move(f)};
}

HoloPerturbation HoloPerturbation::zero(std::size_t n) {
  return HoloPerturbation{CircleFunction::constant(0.0, n)};
}

CircleFunction taylor_tail_Q(const HermitianHomPoly& F, const CircleFunction& X,
                             const CircleFunction& Y) {
  if (X.size() != Y.size())
    throw std::invalid_argument("taylor_tail_Q: X and Y grids differ");
  const int m = F.degree();

  // mixed Wirtinger derivatives d^mu_z d^nu_zbar F for mu + nu <= m
  std::vector<std::vector<PolyZZbar>> d(static_cast<std::size_t>(m) + 1);
  for (auto& row : d) row.resize(static_cast<std::size_t>(m) + 1);
  d[0][0] = F.poly();
  for (int mu = 1; mu <= m; ++mu) d[mu][0] = d[mu - 1][0].dz();
  for (int mu = 0; mu <= m; ++mu)
    for (int nu = 1; mu + nu <= m; ++nu) d[mu][nu] = d[mu][nu - 1].dzbar();

  std::vector<double> fact(static_cast<std::size_t>(m) + 1, 1.0);
  for (int j = 1; j <= m; ++j) fact[j] = fact[j - 1] * j;

  const std::size_t n = X.size();
  std::vector<cxd> out(n);
  std::vector<cxd> ypow(static_cast<std::size_t>(m) + 1);
  std::vector<cxd> ybpow(static_cast<std::size_t>(m) + 1);
  for (std::size_t k = 0; k < n; ++k) {
    const cxd x = X[k], y = Y[k], yb = std::conj(y);
    ypow[0] = ybpow[0] = 1.0;
    for (int j = 1; j <= m; ++j) {
      ypow[j] = ypow[j - 1] * y;
      ybpow[j] = ybpow[j - 1] * yb;
    }
    cxd acc{};
    for (int j = 2; j <= m; ++j)
      for (int mu = 0; mu <= j; ++mu) {
        const int nu = j - mu;
        if (d[mu][nu].empty()) continue;
        acc += d[mu][nu].eval(x) * ypow[mu] * ybpow[nu] / (fact[mu] * fact[nu]);
      }
    out[k] = acc;
  }
  CircleFunction q = CircleFunction::from_samples(std::move(out));
  if (!q.is_real())
    throw Error("taylor_tail_Q: tail failed the realness assertion");
  return q.real_part();
}

CircleFunction apply_lambda(const HermitianHomPoly& F, const ConformalMap& map,
                            double r, const CircleFunction& a) {
  const PolyZZbar dzF = F.poly().dz();
  const CircleFunction g_r = scaled_g(map, r);
  if (a.size() != g_r.size())
    throw std::invalid_argument("apply_lambda: grid mismatch");
  std::vector<double> vals(a.size());
  for (std::size_t k = 0; k < vals.size(); ++k)
    vals[k] = 2.0 * (dzF.eval(g_r[k]) * a[k]).real();
  return CircleFunction::from_real(std::move(vals));
}

HoloPerturbation apply_A_inv(const ConformalMap& map, const CircleFunction& R,
                             double r, int m, const CircleFunction& f) {
  if (!f.is_real())
    throw NonRealInput("apply_A_inv: datum must be real-valued");
  if (!(r > 0.0)) throw ParameterOutOfRange("apply_A_inv: r must be positive");
  if (!R.is_real() || !(R.min_modulus() > 0.0))
    throw RNotPositiveReal("apply_A_inv: R must be strictly positive");
  const std::size_t n = f.size();
  if (R.size() != n || map.g_deriv.size() != n)
    throw std::invalid_argument("apply_A_inv: grid mismatch");

  std::vector<double> u(n);
  for (std::size_t k = 0; k < n; ++k) u[k] = f[k].real() / R[k].real();
  const CircleFunction au = analytic_completion(CircleFunction::from_real(u));

  const double denom = 2.0 * std::pow(r, m - 1);
  std::vector<cxd> vals(n);
  for (std::size_t k = 0; k < n; ++k) {
    const cxd zeta = std::polar(1.0, f.theta(k));
    vals[k] = zeta * (map.kappa * map.g_deriv[k] / denom) * au[k];
  }
  return HoloPerturbation::wrap(CircleFunction::from_samples(std::move(vals)));
}

std::pair<HoloPerturbation, SolveDiagnostics> iterate_H(
    const SurfaceGerm& germ, const ConformalMap& map, const CircleFunction& R,
    double r, const SolveConfig& config) {
  config.validate();
  if (!(r > 0.0 && r < 0.75 * germ.radius()))
    throw ParameterOutOfRange(
        "iterate_H: r must lie in (0, 3/4 * radius of validity)");

  const HermitianHomPoly& F = germ.leading();
  const int m = germ.degree();
  const std::size_t n = map.g_boundary.size();
  const CircleFunction g_r = scaled_g(map, r);

  SolveDiagnostics diag;
  diag.ball_radius = std::pow(r, 1.0 + config.delta);

  // Guard the operator pair before iterating: Lambda o A_inv must be the
  // identity up to 1e-8 relative.
  {
    const CircleFunction probe = CircleFunction::sample(n, [](double t) {
      return cxd(1.0 + std::cos(t) + 0.5 * std::sin(2.0 * t), 0.0);
    });
    const HoloPerturbation ap = apply_A_inv(map, R, r, m, probe);
    const CircleFunction back = apply_lambda(F, map, r, ap.a);
    diag.round_trip_rel = (back - probe).max_modulus() / probe.max_modulus();
    if (diag.round_trip_rel > 1e-8) {
      std::ostringstream os;
      os << "iterate_H: operator round trip failed (relative error "
         << diag.round_trip_rel << "); grid too coarse or R invalid";
      throw RoundTripFailure(os.str());
    }
  }

  HoloPerturbation a = HoloPerturbation::zero(n);
  const bool has_remainder = !germ.remainder().empty();
  double prev_diff = -1.0;
  for (int it = 1; it <= config.max_iter; ++it) {
    CircleFunction rhs = taylor_tail_Q(F, g_r, a.a);
    if (has_remainder) {
      const CircleFunction rem = germ.remainder().eval_on(g_r + a.a);
      rhs = rhs + rem.real_part() + hilbert(rem.imag_part());
    }
    HoloPerturbation next = apply_A_inv(map, R, r, m, cxd(-1.0, 0.0) * rhs);

    const double diff = (next.a - a.a).max_modulus();
    diag.iterations = it;
    if (prev_diff > 0.0) {
      diag.last_ratio = diff / prev_diff;
      diag.contraction_ratios.push_back(diag.last_ratio);
    }
    a = std::move(next);
    if (holder_norm(a.a, config.alpha) > diag.ball_radius)
      diag.ball_escape = true;  // warning only; the discrete norm is a lower
                                // estimate of the true Hoelder norm
    if (diff < config.tol) {
      diag.converged = true;
      diag.final_diff = diff;
      break;
    }
    prev_diff = diff;
  }
  if (!diag.converged) {
    std::ostringstream os;
    os << "iterate_H: no convergence within " << config.max_iter
       << " iterations at r = " << r << " (last contraction ratio "
       << diag.last_ratio << "); r is above the contraction threshold";
    throw NoConvergence(os.str());
  }
  diag.holder_norm_est = holder_norm(a.a, config.alpha);
  return {std::move(a), std::move(diag)};
}

BishopDisc assemble_disc(const SurfaceGerm& germ, const ConformalMap& map,
                         double r, const HoloPerturbation& a) {
  const int m = germ.degree();
  const std::size_t n = map.g_boundary.size();
  const CircleFunction f1 = scaled_g(map, r) + a.a;
  const double level = std::pow(map.kappa * r, m);

  CircleFunction f2;
  if (germ.remainder().empty()) {
    f2 = CircleFunction::constant(level, n);
  } else {
    const CircleFunction im_rem = germ.remainder().eval_on(f1).imag_part();
    f2 = cxd(level, 0.0) + cxd(0.0, 1.0) * analytic_completion(im_rem);
  }

  BishopDisc disc;
  disc.r = r;
  disc.f1_boundary = f1;
  disc.f2_boundary = f2;

  const AttachmentReport rep = verify_attachment(disc, germ);
  disc.residual = rep.residual;
  disc.f1_neg_energy = rep.f1_neg_energy;
  disc.f2_neg_energy = rep.f2_neg_energy;

  double sup = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    sup = std::max(sup, std::sqrt(std::norm(f1[k]) + std::norm(f2[k])));
  disc.sup_norm = sup;

  // the construction must not collapse to a point
  if (!((f1 + (-f1.mean())).max_modulus() > 0.0))
    throw Error("assemble_disc: disc degenerated to a constant");
  return disc;
}

AttachmentReport verify_attachment(const BishopDisc& disc,
                                   const SurfaceGerm& germ) {
  const std::size_t n = disc.f1_boundary.size();
  double residual = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const cxd surface = germ.eval(disc.f1_boundary[k]);
    residual = std::max(residual, std::abs(disc.f2_boundary[k] - surface));
  }
  AttachmentReport rep;
  rep.residual = residual;
  const auto ratio = [](const CircleFunction& f) {
    const double total = f.coeffs().total_energy();
    return total > 0.0 ? f.coeffs().negative_energy() / total : 0.0;
  };
  rep.f1_neg_energy = ratio(disc.f1_boundary);
  rep.f2_neg_energy = ratio(disc.f2_boundary);
  return rep;
}

DiscFamily disc_family(const SurfaceGerm& germ, double r_min, double r_max,
                       int steps, const SolveConfig& config) {
  config.validate();
  if (!(r_min > 0.0) || !(r_max >= r_min) || steps < 1)
    throw ParameterOutOfRange(
        "disc_family: need 0 < r_min <= r_max and steps >= 1");

  DiscFamily fam;
  for (int i = 0; i < steps; ++i) {
    const double t = steps == 1 ? 0.0
                                : static_cast<double>(i) /
                                      static_cast<double>(steps - 1);
    fam.r_grid.push_back(r_min + t * (r_max - r_min));
  }

  const GateResult gate = build_gate(germ, config.grid);
  for (double r : fam.r_grid) {
    FamilyEntry ent;
    ent.r = r;
    if (!gate.map) {
      ent.error = gate.error;
    } else {
      try {
        auto [a, diag] = iterate_H(germ, *gate.map, gate.R, r, config);
        ent.disc = assemble_disc(germ, *gate.map, r, a);
        ent.correction = std::move(a);
        ent.diag = std::move(diag);
        ent.ok = true;
      } catch (const Error& e) {
        ent.error = e.what();
      }
    }
    fam.entries.push_back(std::move(ent));
  }

  for (std::size_t k = 0; k + 1 < fam.entries.size(); ++k) {
    const auto& lo = fam.entries[k];
    const auto& hi = fam.entries[k + 1];
    if (lo.ok && hi.ok) {
      const double dr = hi.r - lo.r;
      if (dr > 0.0)
        fam.smoothness_diag.push_back(
            (hi.correction.a - lo.correction.a).max_modulus() / dr);
    }
  }

  double largest_ok = -1.0;
  for (const auto& e : fam.entries)
    if (e.ok) largest_ok = std::max(largest_ok, e.r);
  bool failed_above = false;
  for (const auto& e : fam.entries)
    if (!e.ok && e.r > largest_ok) failed_above = true;
  if (largest_ok > 0.0 && failed_above) fam.empirical_r0 = largest_ok;

  return fam;
}

double estimate_R0(const SurfaceGerm& germ, const SolveConfig& config) {
  config.validate();
  const GateResult gate = build_gate(germ, config.grid);
  if (!gate.map) throw ProfileNotPositive(gate.error);

  const auto attempt = [&](double r) {
    try {
      iterate_H(germ, *gate.map, gate.R, r, config);
      return true;
    } catch (const Error&) {
      return false;
    }
  };

  double hi = 0.75 * germ.radius() * 0.999;
  if (attempt(hi)) return hi;
  double lo = hi;
  do {
    lo *= 0.5;
    if (lo < 1e-8 * germ.radius())
      throw NoConvergence("estimate_R0: no convergent radius found");
  } while (!attempt(lo));
  for (int it = 0; it < 20 && hi - lo > 0.01 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (attempt(mid) ? lo : hi) = mid;
  }
  return lo;
}

NonexistenceReport nonexistence_probe(const SurfaceGerm& germ) {
  const IndexReport rep = index_report(germ, germ.radius() / 8.0);
  if (rep.classification == Classification::positive_index)
    throw IndexPositive(
        "nonexistence_probe: the index is positive; the disc construction "
        "applies and the probe does not");

  NonexistenceReport out;
  out.index = rep.ind_zero_count;
  out.sign_change_angles =
      index_via_zero_count(germ.leading()).zero_angles;
  try {
    level_curve(germ.leading(), 1024);
  } catch (const ProfileNotPositive&) {
    out.level_curve_fails = true;
  }
  out.remainder_real = germ.remainder().is_real_valued();
  out.locally_polynomially_convex = out.remainder_real;
  return out;
}

void export_family_csv(const DiscFamily& family, std::ostream& os) {
  os << "r,residual,sup_norm,contraction_ratio,iterations,ok,error\n";
  os.precision(17);
  for (const auto& e : family.entries) {
    os << e.r << ',';
    if (e.ok)
      os << e.disc.residual << ',' << e.disc.sup_norm << ',' << e.diag.last_ratio
         << ',' << e.diag.iterations << ",1,\n";
    else
      os << ",,,,0,\"" << e.error << "\"\n";
  }
}

void export_family_boundary_csv(const DiscFamily& family, std::ostream& os) {
  os << "r,theta,re_f1,im_f1,re_f2,im_f2\n";
  os.precision(17);
  for (const auto& e : family.entries) {
    if (!e.ok) continue;
    const auto& f1 = e.disc.f1_boundary;
    const auto& f2 = e.disc.f2_boundary;
    for (std::size_t k = 0; k < f1.size(); ++k)
      os << e.r << ',' << f1.theta(k) << ',' << f1[k].real() << ','
         << f1[k].imag() << ',' << f2[k].real() << ',' << f2[k].imag() << '\n';
  }
}

}  // namespace crdisc
