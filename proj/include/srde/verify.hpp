#pragma once

#include <iosfwd>

namespace srde {

/// Analytic-oracle invariant suite: projection algebra, sine product
/// integrals against Simpson quadrature, OU stationary statistics against
/// Monte Carlo, the covariance quadrature against the closed form, the
/// averaged-equation equilibrium, and the drift Jacobian against finite
/// differences. Prints one line per check; returns true when all pass.
bool run_verification(std::ostream& out);

}  // namespace srde
