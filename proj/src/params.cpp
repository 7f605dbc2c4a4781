#include "srde/params.hpp"

#include <cmath>
#include <stdexcept>

namespace srde {

void ModelParams::validate() const {
    if (!(epsilon > 0.0) || epsilon > 1.0)
        throw std::invalid_argument("params: epsilon must lie in (0, 1]");
    if (sigma < 0.0) throw std::invalid_argument("params: sigma must be >= 0");
    if (!(c0 > 0.0)) throw std::invalid_argument("params: c0 must be > 0");
    basis.validate();
    validate_cutoff(cutoff, basis.total_modes);
    if (spectrum.modes() != basis.total_modes)
        throw std::invalid_argument("params: spectrum/basis size mismatch");
    spectrum.validate(cutoff);
}

double default_initial_amplitude(const ModelParams& p) {
    // Pitchfork equilibrium of d_t a = eps*gamma a - (3/4) c0 a^3 when
    // supercritical, otherwise rest at zero.
    const double g = p.epsilon * p.gamma;
    if (g > 0.0) return std::sqrt(4.0 * g / (3.0 * p.c0));
    return 0.0;
}

}  // namespace srde
