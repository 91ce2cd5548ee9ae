#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crdisc/conformal.hpp"
#include "crdisc/maslov.hpp"
#include "crdisc/surface.hpp"

namespace crdisc {

// Solver parameters. delta is the ball exponent (the iterates are expected
// to stay in the ball of radius r^{1+delta}); alpha is the Hoelder exponent
// used for diagnostics only.
struct SolveConfig {
  double delta = 0.75;  // in (1/2, 1)
  double tol = 1e-10;
  int max_iter = 200;
  double alpha = 0.5;       // in (0, 1)
  std::size_t grid = 1024;  // power of two >= 64

  void validate() const;
};

// Boundary value of a holomorphic correction: no negative Fourier modes and
// a real mode 0.
struct HoloPerturbation {
  CircleFunction a;

  static HoloPerturbation wrap(CircleFunction f);
  static HoloPerturbation zero(std::size_t n);
};

struct BishopDisc {
  double r = 0.0;
  CircleFunction f1_boundary;
  CircleFunction f2_boundary;
  double residual = 0.0;  // sup |F2 - (F_m + R) o F1| over the boundary grid
  double sup_norm = 0.0;  // sup of the C^2 norm of (F1, F2) over the grid
  double f1_neg_energy = 0.0;  // negative-mode energy ratios
  double f2_neg_energy = 0.0;
};

struct SolveDiagnostics {
  int iterations = 0;
  bool converged = false;
  double final_diff = 0.0;
  std::vector<double> contraction_ratios;
  double last_ratio = 0.0;
  double holder_norm_est = 0.0;  // estimated Hoelder norm of the solution
  double ball_radius = 0.0;      // r^{1+delta}
  bool ball_escape = false;      // warning only; the estimate is a lower bound
  double round_trip_rel = 0.0;   // relative Lambda o A_inv probe error
};

struct FamilyEntry {
  double r = 0.0;
  bool ok = false;
  std::string error;
  BishopDisc disc;
  HoloPerturbation correction;
  SolveDiagnostics diag;
};

struct DiscFamily {
  std::vector<double> r_grid;
  std::vector<FamilyEntry> entries;
  // ||a_{r_{k+1}} - a_{r_k}||_sup / dr between consecutive converged radii
  std::vector<double> smoothness_diag;
  std::optional<double> empirical_r0;  // largest convergent r when a larger one failed
};

// Taylor tail of F at X in direction Y:
//   Q(X, Y) = sum_{j=2}^{m} sum_{mu+nu=j} (1/(mu! nu!)) d^mu_z d^nu_zbar
//             F(X) Y^mu conj(Y)^nu,
// so that F(X+Y) = F(X) + 2 Re(dF/dz(X) Y) + Q(X, Y) exactly.
CircleFunction taylor_tail_Q(const HermitianHomPoly& F, const CircleFunction& X,
                             const CircleFunction& Y);

// Linearized boundary operator 2 Re{(dF/dz)(g_r) a} with g_r = kappa r g.
CircleFunction apply_lambda(const HermitianHomPoly& F, const ConformalMap& map,
                            double r, const CircleFunction& a);

// Inverse of apply_lambda on holomorphic data:
//   a_f = e^{i .} (kappa G' / (2 r^{m-1})) (f/R + i conj[f/R]),
// the unique solution with no negative modes and real mean.
HoloPerturbation apply_A_inv(const ConformalMap& map, const CircleFunction& R,
                             double r, int m, const CircleFunction& f);

// Picard iteration for the fixed point of
//   a = -A_inv[ Q(g_r, a) + Re R o (g_r + a) + conj[Im R o (g_r + a)] ],
// started at a = 0. A round-trip probe guards the operator pair before the
// iteration begins.
std::pair<HoloPerturbation, SolveDiagnostics> iterate_H(
    const SurfaceGerm& germ, const ConformalMap& map, const CircleFunction& R,
    double r, const SolveConfig& config = {});

// Boundary data of the attached disc: F1 = g_r + a,
// F2 = (kappa r)^m + i * (Im R o F1 + i conj[Im R o F1]).
BishopDisc assemble_disc(const SurfaceGerm& germ, const ConformalMap& map,
                         double r, const HoloPerturbation& a);

struct AttachmentReport {
  double residual = 0.0;
  double f1_neg_energy = 0.0;
  double f2_neg_energy = 0.0;
};

AttachmentReport verify_attachment(const BishopDisc& disc,
                                   const SurfaceGerm& germ);

// Solve on an increasing r grid. Per-r failures are recorded, not fatal; on
// a nonpositive-index germ every entry carries the gate error.
DiscFamily disc_family(const SurfaceGerm& germ, double r_min, double r_max,
                       int steps, const SolveConfig& config = {});

// Largest radius at which the contraction still converges, found by
// bisection below 3/4 of the radius of validity.
double estimate_R0(const SurfaceGerm& germ, const SolveConfig& config = {});

struct NonexistenceReport {
  int index = 0;
  std::vector<double> sign_change_angles;  // witnesses: zeros of the profile
  bool level_curve_fails = false;          // ProfileNotPositive confirmed
  bool remainder_real = false;
  // With a real remainder and nonpositive index the germ is locally
  // polynomially convex; with any remainder no shrinking family of attached
  // discs exists.
  bool locally_polynomially_convex = false;
};

// Probe for germs with nonpositive index; throws IndexPositive when misused.
NonexistenceReport nonexistence_probe(const SurfaceGerm& germ);

// CSV summary: one record per r. With with_boundary also streams the
// boundary samples (r, theta, Re F1, Im F1, Re F2, Im F2) to boundary_os.
void export_family_csv(const DiscFamily& family, std::ostream& os);
void export_family_boundary_csv(const DiscFamily& family, std::ostream& os);

}  // namespace crdisc
