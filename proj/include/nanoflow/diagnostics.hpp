#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nanoflow/model.hpp"
#include "nanoflow/profile.hpp"
#include "nanoflow/properties.hpp"

namespace nanoflow {

// Reduced wall quantities under the usual table conventions: positive numbers
// for attached, decaying flows.
struct WallQuantities {
    double reduced_skin_friction = 0.0;
    double reduced_nusselt = 0.0;
    double f_double_prime_0 = 0.0;
    double theta_prime_0 = 0.0;
};

inline WallQuantities wall_quantities(const SolutionProfile& profile,
                                      const MixtureRatios& ratios, double phi) {
    if (!profile.converged)
        throw std::invalid_argument("wall_quantities: profile is not converged");
    if (profile.states.empty())
        throw std::invalid_argument("wall_quantities: empty profile");
    if (!(phi >= 0.0) || !(phi < 1.0))
        throw std::invalid_argument("wall_quantities: volume fraction must lie in [0, 1)");

    const StateVector& w = profile.wall();
    WallQuantities out;
    out.f_double_prime_0 = w.fpp;
    out.theta_prime_0 = w.thetap;
    out.reduced_skin_friction = -w.fpp / std::pow(1.0 - phi, 2.5);
    out.reduced_nusselt = -ratios.conductivity_ratio * w.thetap;
    return out;
}

// Dimensional fields at the scenario's station, one sample per mesh node.
struct DimensionalField {
    std::vector<double> y;
    std::vector<double> u;
    std::vector<double> v;
    std::vector<double> temperature;
    std::vector<double> psi;
    double wall_velocity = 0.0;
    double wall_temperature = 0.0;
};

inline DimensionalField reconstruct_dimensional(const SolutionProfile& profile,
                                                const DimensionalScenario& s) {
    if (!profile.converged)
        throw std::invalid_argument("reconstruct_dimensional: profile is not converged");
    validate_profile(profile);
    validate_scenario(s);

    const double half_x = s.station_x / (2.0 * s.length_l);
    const double u_w = s.u0 * std::exp(2.0 * half_x);
    const double y_scale = std::sqrt(2.0 * s.nu_f * s.length_l / s.u0) * std::exp(-half_x);
    const double v_scale = -std::sqrt(s.nu_f * s.u0 / (2.0 * s.length_l)) * std::exp(half_x);
    const double t_scale = s.t0 * std::exp(half_x);
    const double psi_scale = std::sqrt(2.0 * s.nu_f * s.length_l * s.u0) * std::exp(half_x);

    const std::size_t n = profile.states.size();
    DimensionalField out;
    out.y.resize(n);
    out.u.resize(n);
    out.v.resize(n);
    out.temperature.resize(n);
    out.psi.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double eta = profile.mesh.nodes[j];
        const StateVector& st = profile.states[j];
        out.y[j] = eta * y_scale;
        out.u[j] = u_w * st.fp;
        out.v[j] = v_scale * (st.f + eta * st.fp);
        out.temperature[j] = s.t_inf + t_scale * st.theta;
        out.psi[j] = psi_scale * st.f;
    }
    out.wall_velocity = u_w;
    out.wall_temperature = s.t_inf + t_scale;
    return out;
}

// Velocity components at an arbitrary physical point of the given station's
// similarity solution. Points beyond the truncated domain take the far-field
// state, where the profile has already decayed.
inline std::pair<double, double> velocity_at(const SolutionProfile& profile,
                                             const DimensionalScenario& s, double x,
                                             double y) {
    if (!profile.converged)
        throw std::invalid_argument("velocity_at: profile is not converged");
    validate_scenario(s);
    if (!(y >= 0.0))
        throw std::invalid_argument("velocity_at: y must be nonnegative");

    const double half_x = x / (2.0 * s.length_l);
    double eta = y * std::sqrt(s.u0 / (2.0 * s.nu_f * s.length_l)) * std::exp(half_x);
    eta = std::min(eta, profile.mesh.eta_max());
    const StateVector st = interpolate(profile, eta);

    const double u = s.u0 * std::exp(2.0 * half_x) * st.fp;
    const double v = -std::sqrt(s.nu_f * s.u0 / (2.0 * s.length_l)) * std::exp(half_x) *
                     (st.f + eta * st.fp);
    return {u, v};
}

} // namespace nanoflow
