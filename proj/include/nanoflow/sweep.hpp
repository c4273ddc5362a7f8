#pragma once

#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nanoflow/csv.hpp"
#include "nanoflow/kellerbox.hpp"
#include "nanoflow/model.hpp"
#include "nanoflow/properties.hpp"
#include "nanoflow/shooting.hpp"

namespace nanoflow::sweep {

inline constexpr std::string_view parameter_names[] = {
    "phi",       "porosity_k", "forchheimer_fr", "magnetic_m",    "radiation_r",
    "prandtl",   "suction_s",  "velocity_slip",  "thermal_slip"};

inline void apply_parameter(FlowParameters& p, std::string_view name, double value) {
    if (name == "phi") p.phi = value;
    else if (name == "porosity_k") p.porosity_k = value;
    else if (name == "forchheimer_fr") p.forchheimer_fr = value;
    else if (name == "magnetic_m") p.magnetic_m = value;
    else if (name == "radiation_r") p.radiation_r = value;
    else if (name == "prandtl") p.prandtl = value;
    else if (name == "suction_s") p.suction_s = value;
    else if (name == "velocity_slip") p.velocity_slip = value;
    else if (name == "thermal_slip") p.thermal_slip = value;
    else
        throw std::invalid_argument("apply_parameter: unknown parameter '" +
                                    std::string(name) + "'");
}

enum class Engine { kellerbox, shooting };

// One-at-a-time parameter ladders over a fixed baseline, each case run for
// every listed particle.
struct SweepSpec {
    std::vector<std::pair<std::string, std::vector<double>>> ladders;
    std::vector<std::pair<std::string, FluidProperties>> particles;
};

inline void validate_spec(const SweepSpec& spec) {
    if (spec.ladders.empty())
        throw std::invalid_argument("validate_spec: no parameters to vary");
    if (spec.particles.empty())
        throw std::invalid_argument("validate_spec: no particles selected");
    FlowParameters probe;
    for (const auto& [name, values] : spec.ladders) {
        apply_parameter(probe, name, 0.0);
        if (values.empty())
            throw std::invalid_argument("validate_spec: empty value list for '" + name +
                                        "'");
    }
    for (const auto& [name, props] : spec.particles) validate_fluid(props, name);
}

// Runs every sweep case, in parallel, and returns rows in spec order: ladders
// outermost, then values, then particles. Non-convergent cases keep their
// best-iterate wall values; cases that fail outright carry NaNs instead.
inline std::vector<csv::SweepRow> run_sweep(const SweepSpec& spec,
                                            const FlowParameters& baseline,
                                            const FluidProperties& base,
                                            Engine engine,
                                            const kellerbox::SolverConfig& kb_config,
                                            const shooting::ShootingOptions& sh_options) {
    validate_spec(spec);
    validate_fluid(base, "base");

    struct Case {
        std::string param;
        double value;
        std::string particle;
        FluidProperties particle_props;
    };
    std::vector<Case> cases;
    for (const auto& [name, values] : spec.ladders)
        for (double v : values)
            for (const auto& [pname, pprops] : spec.particles)
                cases.push_back({name, v, pname, pprops});

    auto run_case = [&](const Case& c) {
        csv::SweepRow row;
        row.param = c.param;
        row.value = c.value;
        row.particle = c.particle;
        try {
            FlowParameters p = baseline;
            apply_parameter(p, c.param, c.value);
            validate_parameters(p);
            const MixtureRatios ratios = mixture_ratios(base, c.particle_props, p.phi);
            const SolutionProfile profile =
                engine == Engine::kellerbox
                    ? kellerbox::solve(p, ratios, kb_config)
                    : shooting::solve_shooting(p, ratios, sh_options);
            const StateVector& w = profile.wall();
            row.skin_friction = -w.fpp / std::pow(1.0 - p.phi, 2.5);
            row.nusselt = -ratios.conductivity_ratio * w.thetap;
            row.converged = profile.converged;
            row.iterations = profile.iterations;
        } catch (const std::runtime_error&) {
            row.skin_friction = std::numeric_limits<double>::quiet_NaN();
            row.nusselt = std::numeric_limits<double>::quiet_NaN();
            row.converged = false;
        } catch (const std::invalid_argument&) {
            // A ladder value that fails validation spoils its row, not the batch.
            row.skin_friction = std::numeric_limits<double>::quiet_NaN();
            row.nusselt = std::numeric_limits<double>::quiet_NaN();
            row.converged = false;
        }
        return row;
    };

    std::vector<std::future<csv::SweepRow>> futures;
    futures.reserve(cases.size());
    for (const Case& c : cases)
        futures.push_back(std::async(std::launch::async, run_case, c));

    std::vector<csv::SweepRow> rows;
    rows.reserve(cases.size());
    for (auto& f : futures) rows.push_back(f.get());
    return rows;
}

} // namespace nanoflow::sweep
