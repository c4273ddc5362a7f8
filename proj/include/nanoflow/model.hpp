#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "nanoflow/properties.hpp"

namespace nanoflow {

// The nine dimensionless groups governing the similarity-reduced system.
struct FlowParameters {
    double phi = 0.0;
    double porosity_k = 0.0;
    double forchheimer_fr = 0.0;
    double magnetic_m = 0.0;
    double radiation_r = 0.0;
    double prandtl = 1.0;
    double suction_s = 0.0;
    double velocity_slip = 0.0;
    double thermal_slip = 0.0;
};

inline void validate_parameters(const FlowParameters& p) {
    if (!(p.prandtl > 0.0) || !std::isfinite(p.prandtl))
        throw std::invalid_argument("validate_parameters: prandtl must be positive");
    if (!(p.phi >= 0.0) || !(p.phi < 0.3))
        throw std::invalid_argument("validate_parameters: phi must lie in [0, 0.3)");
    if (!(p.porosity_k >= 0.0) || !(p.forchheimer_fr >= 0.0) || !(p.magnetic_m >= 0.0) ||
        !(p.radiation_r >= 0.0) || !(p.velocity_slip >= 0.0) || !(p.thermal_slip >= 0.0))
        throw std::invalid_argument(
            "validate_parameters: porosity_k, forchheimer_fr, magnetic_m, radiation_r, "
            "velocity_slip, thermal_slip must be nonnegative");
    if (!std::isfinite(p.suction_s))
        throw std::invalid_argument("validate_parameters: suction_s must be finite");
}

// Physical configuration at one station x along the sheet, SI units throughout.
struct DimensionalScenario {
    double u0 = 1.0;
    double length_l = 1.0;
    double nu_f = 1.0;
    double permeability_k1 = 1.0;
    double drag_cb = 0.0;
    double electrical_conductivity = 0.0;
    double b0 = 0.0;
    double t0 = 1.0;
    double t_inf = 300.0;
    double v0 = 0.0;
    double n1 = 0.0;
    double d1 = 0.0;
    double stefan_boltzmann = 5.670374419e-8;
    double absorption_k = 1.0;
    double station_x = 0.0;
};

inline void validate_scenario(const DimensionalScenario& s) {
    if (!(s.u0 > 0.0) || !(s.length_l > 0.0) || !(s.nu_f > 0.0) ||
        !(s.permeability_k1 > 0.0) || !(s.stefan_boltzmann > 0.0) ||
        !(s.absorption_k > 0.0) || !(s.t_inf > 0.0))
        throw std::invalid_argument(
            "validate_scenario: u0, length_l, nu_f, permeability_k1, stefan_boltzmann, "
            "absorption_k, t_inf must be positive");
}

// Similarity state (f, f', f'', theta, theta') at one eta node.
struct StateVector {
    double f = 0.0;
    double fp = 0.0;
    double fpp = 0.0;
    double theta = 0.0;
    double thetap = 0.0;

    std::array<double, 5> as_array() const { return {f, fp, fpp, theta, thetap}; }
    static StateVector from_array(const std::array<double, 5>& a) {
        return {a[0], a[1], a[2], a[3], a[4]};
    }
};

// Coefficient multiplying f''' in the momentum equation, viscosity over density ratio.
inline double momentum_coefficient(const MixtureRatios& r) {
    return r.viscosity_ratio / r.density_ratio;
}

// Coefficient multiplying theta'' in the energy equation; the radiation term sits
// outside the Pr-scaled conductivity/heat-capacity ratio.
inline double thermal_coefficient(const FlowParameters& p, const MixtureRatios& r) {
    return (1.0 / p.prandtl) * (r.conductivity_ratio / r.heat_capacity_ratio) +
           (4.0 / 3.0) * p.radiation_r;
}

inline std::array<double, 5> rhs_first_order(const StateVector& s,
                                             const FlowParameters& p,
                                             const MixtureRatios& r) {
    const double gamma = thermal_coefficient(p, r);
    if (!(gamma > 0.0))
        throw std::invalid_argument("rhs_first_order: degenerate thermal coefficient");
    const double np = (r.density_ratio / r.viscosity_ratio) *
                      (2.0 * s.fp * s.fp - s.f * s.fpp + p.porosity_k * s.fp +
                       p.forchheimer_fr * s.fp * s.fp + p.magnetic_m * s.fp);
    const double op = (s.fp * s.theta - s.f * s.thetap) / gamma;
    return {s.fp, s.fpp, np, s.thetap, op};
}

// Residuals of the five boundary conditions; all vanish at a converged solution.
inline std::array<double, 5> boundary_residuals(const StateVector& wall,
                                                const StateVector& far,
                                                const FlowParameters& p,
                                                const MixtureRatios& r) {
    return {wall.f - p.suction_s,
            wall.fp - 1.0 - r.slip_factor_a1 * p.velocity_slip * wall.fpp,
            wall.theta - 1.0 - p.thermal_slip * wall.thetap,
            far.fp,
            far.theta};
}

// Evaluates the dimensionless groups at the scenario's station. The wall velocity
// grows with x, so these are local-similarity values, not global constants.
inline FlowParameters nondimensionalize(const DimensionalScenario& s,
                                        const FluidProperties& base,
                                        const MixtureRatios& ratios,
                                        double phi) {
    validate_scenario(s);
    validate_fluid(base, "base");
    if (!(phi >= 0.0) || !(phi < 0.3))
        throw std::invalid_argument("nondimensionalize: volume fraction must lie in [0, 0.3)");

    const double u_w = s.u0 * std::exp(s.station_x / s.length_l);
    const double nu_nf = s.nu_f * ratios.viscosity_ratio / ratios.density_ratio;
    const double b = s.b0 * std::exp(s.station_x / (2.0 * s.length_l));
    const double k_f = base.conductivity;
    const double k_nf = k_f * ratios.conductivity_ratio;

    FlowParameters p;
    p.phi = phi;
    p.porosity_k = 2.0 * nu_nf * s.length_l / (s.permeability_k1 * u_w);
    p.forchheimer_fr = s.drag_cb / (2.0 * std::sqrt(s.permeability_k1));
    p.magnetic_m = 2.0 * s.electrical_conductivity * b * b * s.length_l /
                   (base.density * u_w);
    p.radiation_r = 4.0 * s.stefan_boltzmann * s.t_inf * s.t_inf * s.t_inf /
                    (k_nf * s.absorption_k);
    p.prandtl = s.nu_f * base.density * base.specific_heat / k_f;
    p.suction_s = s.v0 / std::sqrt(s.u0 * s.nu_f / (2.0 * s.length_l));
    p.velocity_slip = s.n1 * std::sqrt(s.u0 * s.nu_f / (2.0 * s.length_l));
    p.thermal_slip = s.d1 * std::sqrt(s.u0 / (2.0 * s.nu_f * s.length_l));
    validate_parameters(p);
    return p;
}

} // namespace nanoflow
