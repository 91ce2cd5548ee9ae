#pragma once

#include <iosfwd>
#include <string>

#include "crdisc/surface.hpp"

namespace crdisc {

// Text format for surface germs, used by the CLI:
//
//   {
//     "m": 2,
//     "leading":   [{"mu": 1, "nu": 1, "re": 1.0, "im": 0.0}, ...],
//     "remainder": [{"mu": 3, "nu": 0, "re": 0.05, "im": 0.0}, ...],
//     "radius": 1.0
//   }
//
// Every leading term with mu != nu must come with its conjugate mirror entry;
// violations are rejected naming the offending (mu, nu) pair.
SurfaceGerm parse_germ(const std::string& json_text);
SurfaceGerm load_germ(const std::string& path);

std::string format_germ(const SurfaceGerm& germ);
void save_germ(const SurfaceGerm& germ, const std::string& path);

}  // namespace crdisc
