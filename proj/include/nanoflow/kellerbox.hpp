#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nanoflow/blocklinalg.hpp"
#include "nanoflow/errors.hpp"
#include "nanoflow/model.hpp"
#include "nanoflow/profile.hpp"

namespace nanoflow::kellerbox {

struct SolverConfig {
    double eta_max = 10.0;
    std::size_t intervals = 1000;
    double tolerance = 1e-6;
    int max_iterations = 40;
    int max_step_halvings = 8;
};

inline void validate_config(const SolverConfig& c) {
    if (!(c.eta_max > 0.0) || !std::isfinite(c.eta_max))
        throw std::invalid_argument("validate_config: eta_max must be positive");
    if (c.intervals < 8)
        throw std::invalid_argument("validate_config: at least 8 intervals required");
    if (!(c.tolerance > 0.0) || !(c.tolerance < 1.0))
        throw std::invalid_argument("validate_config: tolerance must lie in (0, 1)");
    if (c.max_iterations < 1)
        throw std::invalid_argument("validate_config: max_iterations must be at least 1");
    if (c.max_step_halvings < 0)
        throw std::invalid_argument("validate_config: max_step_halvings must be nonnegative");
}

// Wall-anchored exponential decay satisfying all five boundary conditions exactly.
inline SolutionProfile initial_guess(const Mesh& mesh, const FlowParameters& p,
                                     const MixtureRatios& r) {
    validate_mesh(mesh);
    validate_parameters(p);
    const double cm = 1.0 / (1.0 + r.slip_factor_a1 * p.velocity_slip);
    const double ct = 1.0 / (1.0 + p.thermal_slip);

    SolutionProfile out;
    out.mesh = mesh;
    out.states.resize(mesh.size());
    for (std::size_t j = 0; j < mesh.size(); ++j) {
        const double e = std::exp(-mesh.nodes[j]);
        out.states[j] = {p.suction_s + cm * (1.0 - e), cm * e, -cm * e, ct * e, -ct * e};
    }
    return out;
}

namespace detail {

// Box-scheme residuals of the five transport equations on interval j
// (between nodes j-1 and j), scaled by h.
struct IntervalResiduals {
    double r_f, r_m, r_theta, r_momentum, r_energy;
};

inline IntervalResiduals interval_residuals(const StateVector& a, const StateVector& b,
                                            double h, const FlowParameters& p,
                                            const MixtureRatios& r, double gamma) {
    const double coeff = momentum_coefficient(r);
    const double fm = 0.5 * (a.f + b.f);
    const double mm = 0.5 * (a.fp + b.fp);
    const double nm = 0.5 * (a.fpp + b.fpp);
    const double tm = 0.5 * (a.theta + b.theta);
    const double om = 0.5 * (a.thetap + b.thetap);

    IntervalResiduals out;
    out.r_f = b.f - a.f - h * mm;
    out.r_m = b.fp - a.fp - h * nm;
    out.r_theta = b.theta - a.theta - h * om;
    out.r_momentum = coeff * (b.fpp - a.fpp) +
                     h * (fm * nm - 2.0 * mm * mm - p.porosity_k * mm -
                          p.forchheimer_fr * mm * mm - p.magnetic_m * mm);
    out.r_energy = gamma * (b.thetap - a.thetap) + h * (fm * om - mm * tm);
    return out;
}

// Equation-to-block-row layout: row 0 carries the three wall conditions plus the
// first-interval f' and theta chains; interior row j carries interval j's f chain,
// momentum and energy equations plus interval j+1's f' and theta chains; the last
// row carries interval J's f chain, momentum, energy and the two far-field
// conditions. This placement keeps every diagonal block invertible even when both
// slip coefficients vanish.
inline std::vector<blocktri::Vec> equation_residuals(const SolutionProfile& u,
                                                     const FlowParameters& p,
                                                     const MixtureRatios& r) {
    const std::size_t n_nodes = u.states.size();
    const std::size_t j_count = n_nodes - 1;
    const double gamma = thermal_coefficient(p, r);
    const double a1l = r.slip_factor_a1 * p.velocity_slip;

    std::vector<blocktri::Vec> res(n_nodes);
    const StateVector& w = u.states.front();
    const StateVector& e = u.states.back();

    res[0][0] = w.f - p.suction_s;
    res[0][1] = w.fp - 1.0 - a1l * w.fpp;
    res[0][2] = w.theta - 1.0 - p.thermal_slip * w.thetap;

    for (std::size_t j = 1; j <= j_count; ++j) {
        const IntervalResiduals iv = interval_residuals(
            u.states[j - 1], u.states[j], u.mesh.spacing(j), p, r, gamma);
        res[j][0] = iv.r_f;
        res[j][1] = iv.r_momentum;
        res[j][2] = iv.r_energy;
        res[j - 1][3] = iv.r_m;
        res[j - 1][4] = iv.r_theta;
    }

    res[j_count][3] = e.fp;
    res[j_count][4] = e.theta;
    return res;
}

} // namespace detail

inline double residual_norm(const SolutionProfile& u, const FlowParameters& p,
                            const MixtureRatios& r) {
    double worst = 0.0;
    for (const blocktri::Vec& row : detail::equation_residuals(u, p, r))
        for (double v : row)
            worst = std::max(worst, std::abs(v));
    return worst;
}

// Builds the Newton correction system: matrix = d(residual)/d(state), rhs = -residual.
// All Jacobian entries are analytic.
inline blocktri::BlockTridiagonalSystem assemble_newton(const SolutionProfile& u,
                                                        const FlowParameters& p,
                                                        const MixtureRatios& r) {
    validate_profile(u);
    validate_parameters(p);

    const std::size_t n_nodes = u.states.size();
    const std::size_t j_count = n_nodes - 1;
    const double gamma = thermal_coefficient(p, r);
    const double coeff = momentum_coefficient(r);
    const double a1l = r.slip_factor_a1 * p.velocity_slip;

    blocktri::BlockTridiagonalSystem sys;
    sys.diag.assign(n_nodes, blocktri::Block{});
    sys.sub.assign(j_count, blocktri::Block{});
    sys.super.assign(j_count, blocktri::Block{});
    sys.rhs.assign(n_nodes, blocktri::Vec{});

    const std::vector<blocktri::Vec> res = detail::equation_residuals(u, p, r);
    for (std::size_t j = 0; j < n_nodes; ++j)
        for (std::size_t k = 0; k < blocktri::block_size; ++k)
            sys.rhs[j][k] = -res[j][k];

    auto at = [](blocktri::Block& blk, std::size_t row, std::size_t col) -> double& {
        return blk[row * blocktri::block_size + col];
    };

    // Wall rows: f, slip and thermal-slip conditions are linear in the unknowns.
    at(sys.diag[0], 0, 0) = 1.0;
    at(sys.diag[0], 1, 1) = 1.0;
    at(sys.diag[0], 1, 2) = -a1l;
    at(sys.diag[0], 2, 3) = 1.0;
    at(sys.diag[0], 2, 4) = -p.thermal_slip;

    for (std::size_t j = 1; j <= j_count; ++j) {
        const StateVector& a = u.states[j - 1];
        const StateVector& b = u.states[j];
        const double h = u.mesh.spacing(j);
        const double fm = 0.5 * (a.f + b.f);
        const double mm = 0.5 * (a.fp + b.fp);
        const double nm = 0.5 * (a.fpp + b.fpp);
        const double tm = 0.5 * (a.theta + b.theta);
        const double om = 0.5 * (a.thetap + b.thetap);

        // Interval j's chain rows live in block row j-1 (columns: diag there,
        // super toward node j); its f/momentum/energy rows live in block row j
        // (sub toward node j-1, diag at node j).
        blocktri::Block& up_d = sys.diag[j - 1];
        blocktri::Block& up_f = sys.super[j - 1];
        blocktri::Block& lo_e = sys.sub[j - 1];
        blocktri::Block& lo_d = sys.diag[j];

        at(up_d, 3, 1) = -1.0;
        at(up_d, 3, 2) = -0.5 * h;
        at(up_f, 3, 1) = 1.0;
        at(up_f, 3, 2) = -0.5 * h;

        at(up_d, 4, 3) = -1.0;
        at(up_d, 4, 4) = -0.5 * h;
        at(up_f, 4, 3) = 1.0;
        at(up_f, 4, 4) = -0.5 * h;

        at(lo_e, 0, 0) = -1.0;
        at(lo_e, 0, 1) = -0.5 * h;
        at(lo_d, 0, 0) = 1.0;
        at(lo_d, 0, 1) = -0.5 * h;

        const double dm = -h * (2.0 * mm + p.forchheimer_fr * mm +
                                0.5 * (p.porosity_k + p.magnetic_m));
        at(lo_e, 1, 0) = 0.5 * h * nm;
        at(lo_e, 1, 1) = dm;
        at(lo_e, 1, 2) = -coeff + 0.5 * h * fm;
        at(lo_d, 1, 0) = 0.5 * h * nm;
        at(lo_d, 1, 1) = dm;
        at(lo_d, 1, 2) = coeff + 0.5 * h * fm;

        at(lo_e, 2, 0) = 0.5 * h * om;
        at(lo_e, 2, 1) = -0.5 * h * tm;
        at(lo_e, 2, 3) = -0.5 * h * mm;
        at(lo_e, 2, 4) = -gamma + 0.5 * h * fm;
        at(lo_d, 2, 0) = 0.5 * h * om;
        at(lo_d, 2, 1) = -0.5 * h * tm;
        at(lo_d, 2, 3) = -0.5 * h * mm;
        at(lo_d, 2, 4) = gamma + 0.5 * h * fm;
    }

    at(sys.diag[j_count], 3, 1) = 1.0;
    at(sys.diag[j_count], 4, 3) = 1.0;
    return sys;
}

inline SolutionProfile solve(const FlowParameters& params, const MixtureRatios& ratios,
                             const SolverConfig& config = {},
                             const std::optional<SolutionProfile>& initial = std::nullopt) {
    validate_parameters(params);
    validate_config(config);

    const Mesh mesh = Mesh::uniform(config.eta_max, config.intervals);
    SolutionProfile u;
    if (initial) {
        if (initial->states.size() != mesh.size())
            throw std::invalid_argument("solve: initial profile does not match the mesh");
        u = *initial;
        u.mesh = mesh;
    } else {
        u = initial_guess(mesh, params, ratios);
    }
    u.converged = false;
    u.iterations = 0;
    u.final_correction_norm = 0.0;
    u.correction_history.clear();

    double res_prev = residual_norm(u, params, ratios);

    for (int it = 1; it <= config.max_iterations; ++it) {
        blocktri::BlockTridiagonalSystem sys = assemble_newton(u, params, ratios);
        std::vector<blocktri::Vec> delta;
        try {
            delta = blocktri::solve(sys);
        } catch (const singular_block_error& e) {
            throw solver_failure(it, "solve: singular Newton matrix at iteration " +
                                         std::to_string(it) + " (" + e.what() + ")");
        }

        double corr = 0.0;
        for (const blocktri::Vec& d : delta)
            for (double v : d)
                corr = std::max(corr, std::abs(v));

        // Full step first; halve on residual increase. If every trial fails to
        // decrease the residual, the most-damped step is taken anyway and the
        // iteration cap delivers the honest non-convergence verdict.
        SolutionProfile trial = u;
        double res_trial = 0.0;
        double alpha = 1.0;
        for (int halve = 0; halve <= config.max_step_halvings; ++halve) {
            for (std::size_t j = 0; j < trial.states.size(); ++j) {
                StateVector& s = trial.states[j];
                s.f = u.states[j].f + alpha * delta[j][0];
                s.fp = u.states[j].fp + alpha * delta[j][1];
                s.fpp = u.states[j].fpp + alpha * delta[j][2];
                s.theta = u.states[j].theta + alpha * delta[j][3];
                s.thetap = u.states[j].thetap + alpha * delta[j][4];
            }
            res_trial = residual_norm(trial, params, ratios);
            if (res_trial < res_prev || res_trial <= config.tolerance) break;
            alpha *= 0.5;
        }

        u.iterations = it;
        u.correction_history.push_back(corr);
        u.final_correction_norm = corr;

        if (!std::isfinite(res_trial)) break;
        u.states = std::move(trial.states);
        res_prev = res_trial;
        if (corr < config.tolerance) {
            u.converged = true;
            break;
        }
    }

    if (u.converged) {
        // Converged means the full nonlinear system is actually satisfied, not
        // merely that the last correction was small.
        const std::array<double, 5> bres =
            boundary_residuals(u.wall(), u.far(), params, ratios);
        double bworst = 0.0;
        for (double v : bres) bworst = std::max(bworst, std::abs(v));
        const double rnorm = residual_norm(u, params, ratios);
        if (!(bworst < 1e-6) || !(rnorm <= 10.0 * config.tolerance))
            u.converged = false;
    }
    return u;
}

} // namespace nanoflow::kellerbox
