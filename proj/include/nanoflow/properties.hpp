#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nanoflow {

// Thermophysical triple for a pure phase. Units: kg/m^3, J/(kg K), W/(m K).
struct FluidProperties {
    double density = 0.0;
    double specific_heat = 0.0;
    double conductivity = 0.0;
};

inline void validate_fluid(const FluidProperties& fluid, std::string_view role) {
    if (!(fluid.density > 0.0) || !(fluid.specific_heat > 0.0) || !(fluid.conductivity > 0.0))
        throw std::invalid_argument("validate_fluid: " + std::string(role) +
                                    " properties must be positive");
}

inline FluidProperties builtin_fluid(std::string_view name) {
    if (name == "kerosene") return {783.0, 2090.0, 0.145};
    if (name == "swcnt") return {2600.0, 425.0, 6600.0};
    if (name == "mwcnt") return {1600.0, 796.0, 3000.0};
    throw std::invalid_argument("builtin_fluid: unknown fluid '" + std::string(name) +
                                "', expected one of kerosene, swcnt, mwcnt");
}

// Effective-to-base property ratios of the particle-laden mixture, plus the
// slip prefactor that multiplies the wall shear in the velocity slip condition.
struct MixtureRatios {
    double viscosity_ratio = 1.0;
    double density_ratio = 1.0;
    double heat_capacity_ratio = 1.0;
    double conductivity_ratio = 1.0;
    double slip_factor_a1 = 1.0;
};

inline MixtureRatios mixture_ratios(const FluidProperties& base,
                                    const FluidProperties& particle,
                                    double phi) {
    validate_fluid(base, "base");
    validate_fluid(particle, "particle");
    if (!(phi >= 0.0) || !(phi < 1.0))
        throw std::invalid_argument("mixture_ratios: volume fraction must lie in [0, 1)");

    MixtureRatios r;
    r.viscosity_ratio = std::pow(1.0 - phi, -2.5);
    r.density_ratio = (1.0 - phi) + phi * particle.density / base.density;

    const double cap_base = base.density * base.specific_heat;
    const double cap_particle = particle.density * particle.specific_heat;
    r.heat_capacity_ratio = (1.0 - phi) + phi * cap_particle / cap_base;

    const double kp = particle.conductivity;
    const double kb = base.conductivity;
    r.conductivity_ratio = ((kp + 2.0 * kb) - 2.0 * phi * (kb - kp)) /
                           ((kp + 2.0 * kb) + phi * (kb - kp));

    r.slip_factor_a1 = 1.0 / (std::pow(1.0 - phi, 2.5) * r.density_ratio);
    return r;
}

} // namespace nanoflow
