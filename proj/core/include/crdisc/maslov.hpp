#pragma once

#include <optional>
#include <vector>

#include "crdisc/surface.hpp"

namespace crdisc {

enum class Classification { positive_index, nonpositive_index };
enum class ConicClass { elliptic, hyperbolic };

struct IndexReport {
  int ind_winding = 0;
  int ind_zero_count = 0;
  int ind_roots = 0;
  bool agree = false;
  int zero_count = 0;
  Classification classification = Classification::nonpositive_index;
  std::optional<ConicClass> nondegenerate_class;  // set for m == 2
};

// Winding number of theta -> d(F_m + R)/dzbar (r e^{i theta}). Evaluated at
// r, r/2 and r/4; the three values must agree, otherwise the radius protocol
// reports Unstable.
int index_via_winding(const SurfaceGerm& germ, double r);

struct ZeroCountIndex {
  int index = 0;
  int zero_count = 0;
  std::vector<double> zero_angles;  // refined to ~1e-12
};

// -#{f = 0 on [0, 2pi)}/2 + 1 where f is the angular profile of F. Requires
// an isolated CR singularity (which forces all zeros of f to be simple).
ZeroCountIndex index_via_zero_count(const HermitianHomPoly& F);

// Root-count form: substitute w for zbar in dF/dzbar to get Q(z, w), set
// p(z) = Q(z, 1), count roots of p in the unit disc by the argument
// principle; the index is 2 * count - (m - 1). Works for complex-valued
// homogeneous F as well.
int index_via_roots(const PolyZZbar& F, int m);
int index_via_roots(const HermitianHomPoly& F);

// Runs all three formulas and cross-checks them; throws Disagreement if the
// integers differ. For m == 2 the germ is also labelled elliptic/hyperbolic.
IndexReport index_report(const SurfaceGerm& germ, double r);

}  // namespace crdisc
