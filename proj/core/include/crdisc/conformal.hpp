#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "crdisc/surface.hpp"

namespace crdisc {

// Normalized Riemann map G of the unit disc onto the star-shaped region
// enclosed by the level curve F_m = 1, with G(0) = 0 and G'(0) > 0, held
// through its boundary data.
struct ConformalMap {
  CircleFunction rho;  // polar radius of the boundary curve
  // Theodorsen boundary correspondence as a periodic perturbation of the
  // identity: the correspondence is phi(theta) = theta + phi_offset(theta).
  CircleFunction phi_offset;
  CircleFunction g_boundary;  // G on |zeta| = 1
  CircleFunction g_deriv;     // G' on |zeta| = 1
  double kappa = 0.0;         // (1/2) / sup |g|
  double g_prime_at_0 = 0.0;
  int iterations = 0;      // Theodorsen iterations used
  double damping = 0.0;    // damping factor of the Picard stage
  std::string method;      // "picard" or "picard+newton"

  double phi(std::size_t k) const {
    return g_boundary.theta(k) + phi_offset[k].real();
  }
};

// rho(theta) = f(theta)^(-1/m) for the angular profile f of F; requires the
// profile to be strictly positive (positive index), otherwise the level set
// is not a closed curve around 0 and ProfileNotPositive is thrown.
CircleFunction level_curve(const HermitianHomPoly& F, std::size_t n = 1024);

// Theodorsen iteration phi = id + conj[log rho o phi], damped by 0.5, until
// successive correspondences differ by < 1e-11 in sup norm. If the damped
// iteration diverges the damping is halved and the iteration restarted
// before giving up with NoConvergence. The converged map must pass its own
// certificates (strictly increasing correspondence, negative-mode energy of
// g below 1e-9 of total); on a certificate failure the grid is doubled and
// the iteration restarted from the coarse solution, up to 16384 points.
//
// log_rho_eval, when given, evaluates log rho at arbitrary angles exactly;
// without it the trigonometric interpolant of log rho is used.
ConformalMap riemann_map(const CircleFunction& rho);
ConformalMap riemann_map(const CircleFunction& rho,
                         const std::function<double(double)>& log_rho_eval);

// level_curve + riemann_map with log rho evaluated through the angular
// profile polynomial (exact and cheap for high-degree crowded curves).
ConformalMap riemann_map_for(const HermitianHomPoly& F, std::size_t n = 1024);

// (1/2) * (sup_boundary |g|)^{-1}, so that sup |kappa g| = 1/2. The sup is
// the refined maximum of the trigonometric interpolant of |g|.
double kappa_of(const ConformalMap& map);

// R(zeta) = kappa * zeta * G'(zeta) * (dF/dz)(kappa g(zeta)) on the grid;
// real and strictly positive for a valid map (asserted).
CircleFunction aux_R(const HermitianHomPoly& F, const ConformalMap& map);

// CSV export: theta, Re g, Im g, rho, phi, R.
void export_map_csv(const ConformalMap& map, const CircleFunction& R,
                    std::ostream& os);

}  // namespace crdisc
