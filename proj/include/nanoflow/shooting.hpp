#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "nanoflow/errors.hpp"
#include "nanoflow/model.hpp"
#include "nanoflow/profile.hpp"

namespace nanoflow::shooting {

// The two wall derivatives the far-field conditions determine.
struct ShootingUnknowns {
    double wall_shear = 0.0;
    double wall_heat = 0.0;
};

struct ShootingOptions {
    double eta_max = 10.0;
    double rel_tol = 1e-8;
    double newton_tol = 1e-8;
    int max_iterations = 50;
    int max_step_halvings = 8;
    std::size_t output_intervals = 1000;
};

inline void validate_options(const ShootingOptions& o) {
    if (!(o.eta_max > 0.0) || !std::isfinite(o.eta_max))
        throw std::invalid_argument("validate_options: eta_max must be positive");
    if (!(o.rel_tol >= 1e-12) || !(o.rel_tol <= 1e-3))
        throw std::invalid_argument("validate_options: rel_tol must lie in [1e-12, 1e-3]");
    if (!(o.newton_tol > 0.0))
        throw std::invalid_argument("validate_options: newton_tol must be positive");
    if (o.max_iterations < 1)
        throw std::invalid_argument("validate_options: max_iterations must be at least 1");
    if (o.output_intervals < 8)
        throw std::invalid_argument("validate_options: at least 8 output intervals required");
}

struct IvpTrajectory {
    std::vector<double> etas;
    std::vector<StateVector> states;
    double terminal_fp = 0.0;
    double terminal_theta = 0.0;
};

namespace detail {

inline constexpr double blow_up_bound = 1e6;

inline StateVector initial_state(const ShootingUnknowns& u, const FlowParameters& p,
                                 const MixtureRatios& r) {
    StateVector s;
    s.f = p.suction_s;
    s.fpp = u.wall_shear;
    s.fp = 1.0 + r.slip_factor_a1 * p.velocity_slip * u.wall_shear;
    s.thetap = u.wall_heat;
    s.theta = 1.0 + p.thermal_slip * u.wall_heat;
    return s;
}

using Vec5 = std::array<double, 5>;

inline Vec5 axpy(const Vec5& y, double h, const Vec5& k) {
    Vec5 out;
    for (std::size_t i = 0; i < 5; ++i) out[i] = y[i] + h * k[i];
    return out;
}

// Dormand-Prince 5(4) embedded pair. When stop nodes are supplied, steps are
// clipped so the trajectory lands on each node exactly and the recorder fires
// only there; otherwise the recorder fires at every accepted step.
template <typename Recorder>
inline StateVector integrate(const ShootingUnknowns& unknowns, const FlowParameters& p,
                             const MixtureRatios& r, double eta_max, double rel_tol,
                             double max_step, const std::vector<double>* stops,
                             Recorder&& record) {
    const double abs_tol = 1e-12;
    const StateVector start = initial_state(unknowns, p, r);
    Vec5 y = start.as_array();
    double eta = 0.0;

    std::size_t next_stop = 0;
    if (stops) {
        while (next_stop < stops->size() && (*stops)[next_stop] <= 0.0) {
            record((*stops)[next_stop], start);
            ++next_stop;
        }
    } else {
        record(eta, start);
    }

    auto deriv = [&](const Vec5& v) {
        return rhs_first_order(StateVector::from_array(v), p, r);
    };

    double h_ctrl = std::min(max_step, eta_max / 100.0);
    const double h_min = 1e-12 * std::max(eta_max, 1.0);

    while (eta < eta_max) {
        double h = std::min({h_ctrl, max_step, eta_max - eta});
        if (stops && next_stop < stops->size())
            h = std::min(h, (*stops)[next_stop] - eta);
        const bool clipped = h < h_ctrl;
        if (eta + h == eta) break;

        const Vec5 k1 = deriv(y);
        const Vec5 k2 = deriv(axpy(y, h * (1.0 / 5.0), k1));
        Vec5 t;
        for (std::size_t i = 0; i < 5; ++i)
            t[i] = y[i] + h * (3.0 / 40.0 * k1[i] + 9.0 / 40.0 * k2[i]);
        const Vec5 k3 = deriv(t);
        for (std::size_t i = 0; i < 5; ++i)
            t[i] = y[i] + h * (44.0 / 45.0 * k1[i] - 56.0 / 15.0 * k2[i] +
                               32.0 / 9.0 * k3[i]);
        const Vec5 k4 = deriv(t);
        for (std::size_t i = 0; i < 5; ++i)
            t[i] = y[i] + h * (19372.0 / 6561.0 * k1[i] - 25360.0 / 2187.0 * k2[i] +
                               64448.0 / 6561.0 * k3[i] - 212.0 / 729.0 * k4[i]);
        const Vec5 k5 = deriv(t);
        for (std::size_t i = 0; i < 5; ++i)
            t[i] = y[i] + h * (9017.0 / 3168.0 * k1[i] - 355.0 / 33.0 * k2[i] +
                               46732.0 / 5247.0 * k3[i] + 49.0 / 176.0 * k4[i] -
                               5103.0 / 18656.0 * k5[i]);
        const Vec5 k6 = deriv(t);

        Vec5 y5;
        for (std::size_t i = 0; i < 5; ++i)
            y5[i] = y[i] + h * (35.0 / 384.0 * k1[i] + 500.0 / 1113.0 * k3[i] +
                                125.0 / 192.0 * k4[i] - 2187.0 / 6784.0 * k5[i] +
                                11.0 / 84.0 * k6[i]);
        const Vec5 k7 = deriv(y5);

        double err = 0.0;
        for (std::size_t i = 0; i < 5; ++i) {
            const double e4 = y[i] + h * (5179.0 / 57600.0 * k1[i] +
                                          7571.0 / 16695.0 * k3[i] +
                                          393.0 / 640.0 * k4[i] -
                                          92097.0 / 339200.0 * k5[i] +
                                          187.0 / 2100.0 * k6[i] + 1.0 / 40.0 * k7[i]);
            const double scale =
                abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err = std::max(err, std::abs(y5[i] - e4) / scale);
        }

        if (std::isfinite(err) && err <= 1.0) {
            eta += h;
            y = y5;
            double magnitude = 0.0;
            for (double v : y) magnitude = std::max(magnitude, std::abs(v));
            if (!(magnitude < blow_up_bound))
                throw blow_up_error(eta, "integrate_ivp: state magnitude exceeded 1e6 at eta = " +
                                             std::to_string(eta));
            if (stops) {
                if (next_stop < stops->size() &&
                    eta >= (*stops)[next_stop] - 1e-9 * std::max(eta_max, 1.0)) {
                    record((*stops)[next_stop], StateVector::from_array(y));
                    ++next_stop;
                }
            } else {
                record(eta, StateVector::from_array(y));
            }
            // A clipped step says nothing about the controller's preferred size.
            if (!clipped) {
                const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
                h_ctrl = h * std::clamp(grow, 0.2, 5.0);
            }
        } else {
            const double shrink =
                std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
            h_ctrl = h * std::min(shrink, 0.9);
            if (!(h_ctrl >= h_min))
                throw blow_up_error(eta, "integrate_ivp: step size underflow at eta = " +
                                             std::to_string(eta));
        }
    }
    return StateVector::from_array(y);
}

// Terminal far-field values only; no trajectory is recorded.
inline std::array<double, 2> terminal_values(const ShootingUnknowns& u,
                                             const FlowParameters& p,
                                             const MixtureRatios& r, double eta_max,
                                             double rel_tol) {
    const StateVector end = integrate(u, p, r, eta_max, rel_tol, eta_max / 16.0,
                                      nullptr, [](double, const StateVector&) {});
    return {end.fp, end.theta};
}

// Shots bracket the decaying solution: wall shear below the root makes the
// velocity undershoot through zero before the trajectory diverges, shear
// above it diverges while the velocity is still positive. The indicator is
// monotone in the shear, and a trajectory that merely crosses zero at the
// truncation point has already dipped, so bisecting on it cannot stop at
// such a crossing. Momentum decouples from the thermal state, so the probe
// runs with tame thermal settings to keep theta from aborting the
// integration in stiff thermal regimes.
inline bool momentum_dips(double wall_shear, const FlowParameters& p,
                          const MixtureRatios& r, double eta_max, double rel_tol) {
    FlowParameters probe_params = p;
    probe_params.prandtl = 1.0;
    probe_params.radiation_r = 0.0;
    const ShootingUnknowns probe{wall_shear, -1.0};
    bool dipped = false;
    try {
        integrate(probe, probe_params, r, eta_max, rel_tol, eta_max / 64.0, nullptr,
                  [&](double, const StateVector& s) {
                      if (s.fp < -1e-9) dipped = true;
                  });
    } catch (const blow_up_error&) {
        // Divergence after a dip still classifies the shot as undershooting;
        // without one the trajectory left on the positive side.
    }
    return dipped;
}

} // namespace detail

inline IvpTrajectory integrate_ivp(const ShootingUnknowns& unknowns,
                                   const FlowParameters& params,
                                   const MixtureRatios& ratios, double eta_max,
                                   double rel_tol) {
    validate_parameters(params);
    if (!(eta_max > 0.0) || !std::isfinite(eta_max))
        throw std::invalid_argument("integrate_ivp: eta_max must be positive");
    if (!(rel_tol >= 1e-12) || !(rel_tol <= 1e-3))
        throw std::invalid_argument("integrate_ivp: rel_tol must lie in [1e-12, 1e-3]");

    IvpTrajectory out;
    // Step cap keeps the trajectory dense: at least ~256 sample points.
    const StateVector end = detail::integrate(
        unknowns, params, ratios, eta_max, rel_tol, eta_max / 256.0, nullptr,
        [&](double eta, const StateVector& s) {
            out.etas.push_back(eta);
            out.states.push_back(s);
        });
    out.terminal_fp = end.fp;
    out.terminal_theta = end.theta;
    return out;
}

// Solves the far-field conditions in two phases. The raw terminal value
// m(eta_max) vanishes not only at the decaying solution but also at shots
// that happen to cross zero right at the truncation point, and the default
// guess can sit closer to such a crossing than to the decaying root, so a
// plain Newton iteration on the terminal values may converge to the wrong
// zero. Phase one therefore brackets the wall shear by bisecting the
// undershoot indicator, which no crossing shot can satisfy. Phase two is the
// damped two-unknown Newton on the terminal values themselves; seeded next
// to the decaying root it cannot wander to a crossing. The returned
// profile's correction_history records the Newton-phase terminal residual
// max-norm per iterate, which decreases monotonically by construction.
inline SolutionProfile solve_shooting(const FlowParameters& params,
                                      const MixtureRatios& ratios,
                                      const ShootingOptions& options = {}) {
    validate_parameters(params);
    validate_options(options);

    const double a1l = ratios.slip_factor_a1 * params.velocity_slip;
    const ShootingUnknowns guess{-1.3 / (1.0 + a1l),
                                 -std::sqrt(params.prandtl) / (1.0 + params.thermal_slip)};

    // Blowing cases push the edge of the boundary layer outward and the shot
    // trajectories blow up well before a generous eta_max; retry on shorter
    // domains before giving up.
    std::vector<double> domain_attempts{options.eta_max};
    if (params.suction_s < 0.0) {
        for (double fallback : {6.0, 4.0})
            if (fallback < options.eta_max) domain_attempts.push_back(fallback);
    }

    std::string blow_up_trace;
    for (std::size_t attempt = 0; attempt < domain_attempts.size(); ++attempt) {
        const double eta_max = domain_attempts[attempt];

        // Bracket the wall shear: lo undershoots, hi diverges positive.
        double lo = guess.wall_shear;
        double hi = guess.wall_shear;
        auto dips = [&](double shear) {
            return detail::momentum_dips(shear, params, ratios, eta_max,
                                         options.rel_tol);
        };
        bool bracketed = false;
        if (dips(hi)) {
            for (int widen = 0; widen < 24; ++widen) {
                hi /= 1.6;
                if (!dips(hi)) {
                    lo = hi * 1.6;
                    bracketed = true;
                    break;
                }
            }
        } else {
            for (int widen = 0; widen < 24; ++widen) {
                lo *= 1.6;
                if (dips(lo)) {
                    hi = lo / 1.6;
                    bracketed = true;
                    break;
                }
            }
        }
        if (!bracketed) {
            blow_up_trace += std::string(blow_up_trace.empty() ? "" : "; ") +
                             "no undershoot bracket on eta_max = " + std::to_string(eta_max);
            continue;
        }
        for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            if (dips(mid))
                lo = mid;
            else
                hi = mid;
        }

        ShootingUnknowns u{hi, guess.wall_heat};
        std::array<double, 2> res{};
        try {
            res = detail::terminal_values(u, params, ratios, eta_max, options.rel_tol);
        } catch (const blow_up_error& e) {
            blow_up_trace += std::string(blow_up_trace.empty() ? "" : "; ") + e.what();
            continue;
        }

        auto norm2 = [](const std::array<double, 2>& v) {
            return std::max(std::abs(v[0]), std::abs(v[1]));
        };
        double rn = norm2(res);
        std::vector<double> history{rn};
        int iterations = 0;
        bool stalled = false;

        while (rn >= options.newton_tol && iterations < options.max_iterations && !stalled) {
            // Forward-difference Jacobian of the terminal map.
            double jac[2][2];
            bool jacobian_ok = true;
            for (int col = 0; col < 2; ++col) {
                ShootingUnknowns up = u;
                double& entry = (col == 0) ? up.wall_shear : up.wall_heat;
                const double eps = 1e-7 * std::max(1.0, std::abs(entry));
                entry += eps;
                try {
                    const std::array<double, 2> rp =
                        detail::terminal_values(up, params, ratios, eta_max, options.rel_tol);
                    jac[0][col] = (rp[0] - res[0]) / eps;
                    jac[1][col] = (rp[1] - res[1]) / eps;
                } catch (const blow_up_error&) {
                    jacobian_ok = false;
                }
            }
            const double det = jacobian_ok
                                   ? jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0]
                                   : 0.0;
            if (!jacobian_ok || !(std::abs(det) > 1e-300)) {
                stalled = true;
                break;
            }
            const double dn = -(jac[1][1] * res[0] - jac[0][1] * res[1]) / det;
            const double dh = -(jac[0][0] * res[1] - jac[1][0] * res[0]) / det;

            double alpha = 1.0;
            bool accepted = false;
            for (int halve = 0; halve <= options.max_step_halvings; ++halve) {
                ShootingUnknowns trial{u.wall_shear + alpha * dn, u.wall_heat + alpha * dh};
                double trial_norm = std::numeric_limits<double>::infinity();
                std::array<double, 2> trial_res{};
                try {
                    trial_res = detail::terminal_values(trial, params, ratios, eta_max,
                                                        options.rel_tol);
                    trial_norm = norm2(trial_res);
                } catch (const blow_up_error&) {
                }
                if (trial_norm < rn) {
                    u = trial;
                    res = trial_res;
                    rn = trial_norm;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!accepted) {
                stalled = true;
                break;
            }
            ++iterations;
            history.push_back(rn);
        }

        // Resample the best iterate onto the uniform output mesh; the wall node
        // is the exact initial state, never an interpolant.
        const Mesh mesh = Mesh::uniform(eta_max, options.output_intervals);
        SolutionProfile profile;
        profile.mesh = mesh;
        profile.states.reserve(mesh.size());
        detail::integrate(u, params, ratios, eta_max, options.rel_tol,
                          std::numeric_limits<double>::infinity(), &mesh.nodes,
                          [&](double, const StateVector& s) {
                              profile.states.push_back(s);
                          });
        if (profile.states.size() != mesh.size())
            throw solver_failure(iterations, "solve_shooting: trajectory resampling "
                                             "missed output nodes");
        profile.converged = rn < options.newton_tol;
        profile.iterations = iterations;
        profile.final_correction_norm = rn;
        profile.correction_history = std::move(history);
        return profile;
    }

    throw blow_up_error(0.0, "solve_shooting: every shot blew up before the far field; "
                             "reduce eta_max (" + blow_up_trace + ")");
}

} // namespace nanoflow::shooting
