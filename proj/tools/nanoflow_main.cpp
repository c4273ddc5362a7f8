#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "nanoflow/csv.hpp"
#include "nanoflow/diagnostics.hpp"
#include "nanoflow/errors.hpp"
#include "nanoflow/kellerbox.hpp"
#include "nanoflow/model.hpp"
#include "nanoflow/properties.hpp"
#include "nanoflow/shooting.hpp"
#include "nanoflow/sweep.hpp"

namespace {

using namespace nanoflow;

struct CommonOptions {
    double phi = 0.0;
    double porosity_k = 0.0;
    double forchheimer_fr = 0.0;
    double magnetic_m = 0.0;
    double radiation_r = 0.0;
    double prandtl = 1.0;
    double suction_s = 0.0;
    double velocity_slip = 0.0;
    double thermal_slip = 0.0;
    std::string particle = "swcnt";
    std::string base = "kerosene";
    std::string base_props;
    std::string particle_props;
    double eta_max = 10.0;
    std::size_t n_nodes = 1001;
    double tolerance = 1e-6;
    int max_iterations = 40;
    double rel_tol = 1e-8;
    double newton_tol = 1e-8;
    std::string solver = "kellerbox";
    std::string out;
    std::string config;
};

std::string trim(const std::string& text) {
    const std::size_t first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const std::size_t last = text.find_last_not_of(" \t\r");
    return text.substr(first, last - first + 1);
}

// Expands a --config file into ordinary option tokens. A key is skipped when
// the same flag already appears on the command line, so flags override the
// file without any solver-side precedence rules.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;

    std::ifstream is(path);
    if (!is)
        throw std::invalid_argument("config: cannot open '" + path + "'");
    std::string line;
    while (std::getline(is, line)) {
        const std::string entry = trim(line);
        if (entry.empty() || entry.front() == '#') continue;
        const std::size_t eq = entry.find('=');
        const std::string key = eq == std::string::npos ? "" : trim(entry.substr(0, eq));
        if (key.empty())
            throw std::invalid_argument("config: expected key=value, got '" + entry + "'");
        const std::string flag = "--" + key;
        const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
        if (!given) args.push_back(flag + "=" + trim(entry.substr(eq + 1)));
    }
    return args;
}

CLI::Option* add_common(CLI::App* cmd, CommonOptions& o, const std::string& tolerance_help) {
    cmd->add_option("--config", o.config, "Read key=value options from a file; flags override");
    cmd->add_option("--phi", o.phi, "Particle volume fraction, in [0, 0.3)");
    cmd->add_option("--porosity_k", o.porosity_k, "Porosity parameter K");
    cmd->add_option("--forchheimer_fr", o.forchheimer_fr, "Inertial drag parameter Fr");
    cmd->add_option("--magnetic_m", o.magnetic_m, "Magnetic parameter M");
    cmd->add_option("--radiation_r", o.radiation_r, "Thermal radiation parameter R");
    cmd->add_option("--prandtl", o.prandtl, "Prandtl number");
    cmd->add_option("--suction_s", o.suction_s, "Wall suction (positive) or blowing (negative)");
    cmd->add_option("--velocity_slip", o.velocity_slip, "Velocity slip coefficient");
    cmd->add_option("--thermal_slip", o.thermal_slip, "Thermal slip coefficient");
    cmd->add_option("--particle", o.particle, "Particle: swcnt, mwcnt (sweep also: both)");
    cmd->add_option("--base", o.base, "Base fluid name");
    cmd->add_option("--base_props", o.base_props,
                    "Custom base fluid as 'density,specific_heat,conductivity'");
    cmd->add_option("--particle_props", o.particle_props,
                    "Custom particle as 'density,specific_heat,conductivity'");
    cmd->add_option("--eta_max", o.eta_max, "Similarity-domain truncation");
    cmd->add_option("--n_nodes", o.n_nodes, "Number of mesh nodes");
    CLI::Option* tol = cmd->add_option("--tolerance", o.tolerance, tolerance_help);
    cmd->add_option("--max_iterations", o.max_iterations, "Iteration cap");
    cmd->add_option("--rel_tol", o.rel_tol, "Integrator relative tolerance (shooting)");
    cmd->add_option("--newton_tol", o.newton_tol, "Far-field residual tolerance (shooting)");
    cmd->add_option("--solver", o.solver, "Solver: kellerbox, shooting, or both");
    cmd->add_option("--out", o.out, "Output CSV path");
    return tol;
}

FluidProperties parse_triple(const std::string& text, const char* what) {
    const auto fields = csv::split_fields(text);
    if (fields.size() != 3)
        throw std::invalid_argument(std::string(what) +
                                    ": expected 'density,specific_heat,conductivity'");
    return {csv::parse_double(fields[0]), csv::parse_double(fields[1]),
            csv::parse_double(fields[2])};
}

FluidProperties resolve_base(const CommonOptions& o) {
    if (!o.base_props.empty()) return parse_triple(o.base_props, "base_props");
    return builtin_fluid(o.base);
}

FluidProperties resolve_particle(const CommonOptions& o, const std::string& name) {
    if (!o.particle_props.empty()) return parse_triple(o.particle_props, "particle_props");
    return builtin_fluid(name);
}

FlowParameters to_params(const CommonOptions& o) {
    FlowParameters p;
    p.phi = o.phi;
    p.porosity_k = o.porosity_k;
    p.forchheimer_fr = o.forchheimer_fr;
    p.magnetic_m = o.magnetic_m;
    p.radiation_r = o.radiation_r;
    p.prandtl = o.prandtl;
    p.suction_s = o.suction_s;
    p.velocity_slip = o.velocity_slip;
    p.thermal_slip = o.thermal_slip;
    validate_parameters(p);
    return p;
}

kellerbox::SolverConfig to_kb_config(const CommonOptions& o) {
    kellerbox::SolverConfig c;
    c.eta_max = o.eta_max;
    if (o.n_nodes < 1)
        throw std::invalid_argument("n_nodes must be at least 9");
    c.intervals = o.n_nodes - 1;
    c.tolerance = o.tolerance;
    c.max_iterations = o.max_iterations;
    kellerbox::validate_config(c);
    return c;
}

shooting::ShootingOptions to_sh_options(const CommonOptions& o) {
    shooting::ShootingOptions s;
    s.eta_max = o.eta_max;
    s.rel_tol = o.rel_tol;
    s.newton_tol = o.newton_tol;
    s.max_iterations = std::max(o.max_iterations, 50);
    if (o.n_nodes < 9)
        throw std::invalid_argument("n_nodes must be at least 9");
    s.output_intervals = o.n_nodes - 1;
    shooting::validate_options(s);
    return s;
}

void warn_phi(double phi) {
    if (phi > 0.2)
        std::fprintf(stderr,
                     "warning: phi = %.4f exceeds 0.2; the mixture model is used outside "
                     "its usual dilute range\n",
                     phi);
}

void warn_far_field(const char* solver, const SolutionProfile& p) {
    const double magnitude = p.far_field_magnitude();
    if (!(magnitude < 1e-3))
        std::fprintf(stderr,
                     "warning: %s profile has |f'| or |theta| = %.3e over the outer 10%% "
                     "of the mesh; increase eta_max\n",
                     solver, magnitude);
}

std::string fmt4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

struct WallSummary {
    double fpp0, thetap0, skin_friction, nusselt;
};

WallSummary summarize(const SolutionProfile& p, const MixtureRatios& r, double phi) {
    const StateVector& w = p.wall();
    return {w.fpp, w.thetap, -w.fpp / std::pow(1.0 - phi, 2.5),
            -r.conductivity_ratio * w.thetap};
}

void print_summary_row(const char* solver, const SolutionProfile& p, const WallSummary& s) {
    std::printf("%-10s %12s %12s %14s %12s %6d %10s\n", solver, fmt4(s.fpp0).c_str(),
                fmt4(s.thetap0).c_str(), fmt4(s.skin_friction).c_str(),
                fmt4(s.nusselt).c_str(), p.iterations, p.converged ? "yes" : "no");
}

std::vector<std::pair<std::string, std::string>> param_meta(const CommonOptions& o,
                                                            const FlowParameters& p) {
    std::vector<std::pair<std::string, std::string>> m;
    m.emplace_back("base", o.base_props.empty() ? o.base : "custom:" + o.base_props);
    m.emplace_back("particle",
                   o.particle_props.empty() ? o.particle : "custom:" + o.particle_props);
    m.emplace_back("phi", csv::format_double(p.phi));
    m.emplace_back("porosity_k", csv::format_double(p.porosity_k));
    m.emplace_back("forchheimer_fr", csv::format_double(p.forchheimer_fr));
    m.emplace_back("magnetic_m", csv::format_double(p.magnetic_m));
    m.emplace_back("radiation_r", csv::format_double(p.radiation_r));
    m.emplace_back("prandtl", csv::format_double(p.prandtl));
    m.emplace_back("suction_s", csv::format_double(p.suction_s));
    m.emplace_back("velocity_slip", csv::format_double(p.velocity_slip));
    m.emplace_back("thermal_slip", csv::format_double(p.thermal_slip));
    m.emplace_back("eta_max", csv::format_double(o.eta_max));
    m.emplace_back("n_nodes", std::to_string(o.n_nodes));
    return m;
}

int run_solve(const CommonOptions& o) {
    const bool run_kb = o.solver == "kellerbox" || o.solver == "both";
    const bool run_sh = o.solver == "shooting" || o.solver == "both";
    if (!run_kb && !run_sh)
        throw std::invalid_argument("solve: unknown solver '" + o.solver +
                                    "', expected kellerbox, shooting, or both");
    if (o.particle == "both")
        throw std::invalid_argument("solve: --particle both is only meaningful for sweep");

    const FluidProperties base = resolve_base(o);
    const FluidProperties particle = resolve_particle(o, o.particle);
    const FlowParameters params = to_params(o);
    warn_phi(params.phi);
    const MixtureRatios ratios = mixture_ratios(base, particle, params.phi);

    std::optional<SolutionProfile> kb, sh;
    if (run_kb) kb = kellerbox::solve(params, ratios, to_kb_config(o));
    if (run_sh) sh = shooting::solve_shooting(params, ratios, to_sh_options(o));

    std::printf("%-10s %12s %12s %14s %12s %6s %10s\n", "solver", "f''(0)", "theta'(0)",
                "skin_friction", "nusselt", "iters", "converged");
    std::optional<WallSummary> kb_sum, sh_sum;
    if (kb) {
        kb_sum = summarize(*kb, ratios, params.phi);
        print_summary_row("kellerbox", *kb, *kb_sum);
        warn_far_field("kellerbox", *kb);
    }
    if (sh) {
        sh_sum = summarize(*sh, ratios, params.phi);
        print_summary_row("shooting", *sh, *sh_sum);
        warn_far_field("shooting", *sh);
    }
    if (kb_sum && sh_sum)
        std::printf("solver difference: |d_fpp0| = %.3e, |d_thetap0| = %.3e\n",
                    std::abs(kb_sum->fpp0 - sh_sum->fpp0),
                    std::abs(kb_sum->thetap0 - sh_sum->thetap0));

    const SolutionProfile& primary = kb ? *kb : *sh;
    const std::string out = o.out.empty() ? "profile.csv" : o.out;
    csv::write_profile_file(out, primary);

    auto meta = param_meta(o, params);
    meta.emplace_back("command", "solve");
    meta.emplace_back("solver", o.solver);
    meta.emplace_back("profile_source", kb ? "kellerbox" : "shooting");
    meta.emplace_back("tolerance", csv::format_double(o.tolerance));
    if (kb) {
        meta.emplace_back("kellerbox_converged", kb->converged ? "true" : "false");
        meta.emplace_back("kellerbox_iterations", std::to_string(kb->iterations));
    }
    if (sh) {
        meta.emplace_back("shooting_converged", sh->converged ? "true" : "false");
        meta.emplace_back("shooting_iterations", std::to_string(sh->iterations));
        meta.emplace_back("rel_tol", csv::format_double(o.rel_tol));
        meta.emplace_back("newton_tol", csv::format_double(o.newton_tol));
    }
    csv::write_meta_file(out + ".meta", meta);

    const bool all_converged = (!kb || kb->converged) && (!sh || sh->converged);
    if (!all_converged)
        std::fprintf(stderr, "non-convergence: best-iterate profile written to %s\n",
                     out.c_str());
    return all_converged ? 0 : 2;
}

int run_validate(const CommonOptions& o, bool include_pr2, bool tolerance_overridden) {
    struct Case {
        double prandtl;
        double reference;
        double threshold;
    };
    std::vector<Case> cases{{1.0, 0.9548, 2e-3},
                            {3.0, 1.8691, 2e-3},
                            {5.0, 2.5001, 2e-3},
                            {10.0, 3.6604, 4e-3}};
    if (include_pr2) cases.insert(cases.begin() + 1, {2.0, 1.4712, 2e-3});

    const FluidProperties base = resolve_base(o);
    const FluidProperties particle = resolve_particle(o, o.particle == "both" ? "swcnt"
                                                                              : o.particle);
    const MixtureRatios identity = mixture_ratios(base, particle, 0.0);

    CommonOptions solver_opts = o;
    solver_opts.tolerance = tolerance_overridden ? 1e-6 : o.tolerance;

    std::printf("%-6s %10s %11s %10s %11s %10s %8s\n", "pr", "reference", "kellerbox",
                "diff_kb", "shooting", "diff_sh", "status");
    bool all_pass = true;
    for (const Case& c : cases) {
        FlowParameters params;
        params.prandtl = c.prandtl;

        const SolutionProfile kb = kellerbox::solve(params, identity, to_kb_config(solver_opts));
        const SolutionProfile sh =
            shooting::solve_shooting(params, identity, to_sh_options(solver_opts));
        if (!kb.converged || !sh.converged) {
            std::fprintf(stderr, "validate: non-convergence at prandtl = %g\n", c.prandtl);
            return 2;
        }

        const double kb_value = -kb.wall().thetap;
        const double sh_value = -sh.wall().thetap;
        const double threshold = tolerance_overridden ? o.tolerance : c.threshold;
        const double diff_kb = std::abs(kb_value - c.reference);
        const double diff_sh = std::abs(sh_value - c.reference);
        const bool pass = diff_kb < threshold && diff_sh < threshold;
        all_pass = all_pass && pass;
        std::printf("%-6s %10s %11s %10.2e %11s %10.2e %8s\n", fmt4(c.prandtl).c_str(),
                    fmt4(c.reference).c_str(), fmt4(kb_value).c_str(), diff_kb,
                    fmt4(sh_value).c_str(), diff_sh, pass ? "pass" : "FAIL");
    }
    return all_pass ? 0 : 1;
}

int run_sweep_cmd(const CommonOptions& o, const std::vector<std::string>& vary) {
    if (vary.empty())
        throw std::invalid_argument("sweep: at least one --vary name=v1,v2,... is required");

    sweep::SweepSpec spec;
    for (const std::string& ladder : vary) {
        const std::size_t eq = ladder.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("sweep: --vary expects name=v1,v2,..., got '" +
                                        ladder + "'");
        std::pair<std::string, std::vector<double>> entry;
        entry.first = ladder.substr(0, eq);
        for (std::string_view field : csv::split_fields(ladder.substr(eq + 1)))
            entry.second.push_back(csv::parse_double(field));
        spec.ladders.push_back(std::move(entry));
    }

    if (o.particle == "both") {
        if (!o.particle_props.empty())
            throw std::invalid_argument(
                "sweep: --particle_props requires a single named particle");
        spec.particles.emplace_back("swcnt", builtin_fluid("swcnt"));
        spec.particles.emplace_back("mwcnt", builtin_fluid("mwcnt"));
    } else {
        spec.particles.emplace_back(o.particle, resolve_particle(o, o.particle));
    }

    sweep::Engine engine;
    if (o.solver == "kellerbox") engine = sweep::Engine::kellerbox;
    else if (o.solver == "shooting") engine = sweep::Engine::shooting;
    else
        throw std::invalid_argument("sweep: requires a single solver (kellerbox or "
                                    "shooting), got '" + o.solver + "'");

    const FluidProperties base = resolve_base(o);
    const FlowParameters baseline = to_params(o);
    warn_phi(baseline.phi);
    for (const auto& [name, values] : spec.ladders)
        if (name == "phi")
            for (double v : values) warn_phi(v);

    const std::vector<csv::SweepRow> rows = sweep::run_sweep(
        spec, baseline, base, engine, to_kb_config(o), to_sh_options(o));

    const std::string out = o.out.empty() ? "sweep.csv" : o.out;
    csv::write_sweep_file(out, rows);

    auto meta = param_meta(o, baseline);
    meta.emplace_back("command", "sweep");
    meta.emplace_back("solver", o.solver);
    meta.emplace_back("tolerance", csv::format_double(o.tolerance));
    for (const auto& [name, values] : spec.ladders) {
        std::string joined;
        for (double v : values) {
            if (!joined.empty()) joined += ',';
            joined += csv::format_double(v);
        }
        meta.emplace_back("vary_" + name, joined);
    }
    csv::write_meta_file(out + ".meta", meta);

    std::size_t converged = 0;
    for (const csv::SweepRow& r : rows) converged += r.converged ? 1 : 0;
    std::printf("sweep: %zu cases, %zu converged, wrote %s\n", rows.size(), converged,
                out.c_str());
    return converged == rows.size() ? 0 : 2;
}

int run_mesh_study(const CommonOptions& o, double first_order_bias) {
    if (o.solver != "kellerbox")
        throw std::invalid_argument(
            "mesh-study: refines the box-scheme mesh, so --solver must be kellerbox");

    const FluidProperties base = resolve_base(o);
    const FluidProperties particle = resolve_particle(o, o.particle == "both" ? "swcnt"
                                                                              : o.particle);
    const FlowParameters params = to_params(o);
    warn_phi(params.phi);
    const MixtureRatios ratios = mixture_ratios(base, particle, params.phi);

    const std::size_t coarse_intervals = o.n_nodes - 1;
    double fpp[3], thetap[3], spacing[3];
    std::printf("%-10s %10s %16s %16s\n", "intervals", "h", "f''(0)", "theta'(0)");
    for (int level = 0; level < 3; ++level) {
        kellerbox::SolverConfig cfg = to_kb_config(o);
        cfg.intervals = coarse_intervals << level;
        const SolutionProfile p = kellerbox::solve(params, ratios, cfg);
        if (!p.converged) {
            std::fprintf(stderr, "mesh-study: non-convergence at %zu intervals\n",
                         cfg.intervals);
            return 2;
        }
        const double h = o.eta_max / static_cast<double>(cfg.intervals);
        spacing[level] = h;
        fpp[level] = p.wall().fpp + first_order_bias * h;
        thetap[level] = p.wall().thetap + first_order_bias * h;
        std::printf("%-10zu %10.5f %16.10f %16.10f\n", cfg.intervals, h, fpp[level],
                    thetap[level]);
    }

    auto ratio = [](const double q[3]) {
        const double denom = std::abs(q[1] - q[2]);
        if (denom == 0.0) return std::numeric_limits<double>::infinity();
        return std::abs(q[0] - q[1]) / denom;
    };
    const double ratio_f = ratio(fpp);
    const double ratio_t = ratio(thetap);
    const bool pass = ratio_f >= 3.2 && ratio_f <= 4.8 && ratio_t >= 3.2 && ratio_t <= 4.8;
    std::printf("richardson ratio f''(0)   = %.3f\n", ratio_f);
    std::printf("richardson ratio theta'(0) = %.3f\n", ratio_t);
    std::printf("second-order band [3.2, 4.8]: %s\n", pass ? "pass" : "FAIL");
    return pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Boundary-layer solver suite for slip-driven nanofluid flow over an "
                 "exponentially stretching sheet in a porous medium"};
    app.require_subcommand(1);

    CommonOptions solve_opts;
    CLI::App* solve_cmd =
        app.add_subcommand("solve", "Solve one case and write the profile CSV");
    add_common(solve_cmd, solve_opts, "Newton correction tolerance");

    CommonOptions validate_opts;
    bool include_pr2 = false;
    CLI::App* validate_cmd = app.add_subcommand(
        "validate", "Check both solvers against published clean-case references");
    CLI::Option* validate_tol = add_common(
        validate_cmd, validate_opts,
        "Comparison threshold override (default 2e-3, 4e-3 for the stiffest case)");
    validate_cmd->add_flag("--pr2", include_pr2, "Also report the Prandtl = 2 case");

    CommonOptions sweep_opts;
    sweep_opts.prandtl = 21.0;
    sweep_opts.phi = 0.1;
    sweep_opts.magnetic_m = 2.5;
    sweep_opts.forchheimer_fr = 0.4;
    sweep_opts.porosity_k = 0.7;
    sweep_opts.radiation_r = 10.0;
    sweep_opts.suction_s = 0.5;
    sweep_opts.velocity_slip = 0.1;
    sweep_opts.thermal_slip = 0.1;
    std::vector<std::string> vary;
    CLI::App* sweep_cmd = app.add_subcommand(
        "sweep", "Vary parameters one at a time over a baseline and tabulate wall values");
    add_common(sweep_cmd, sweep_opts, "Newton correction tolerance");
    sweep_cmd->add_option("--vary", vary,
                          "Ladder as name=v1,v2,... (repeatable, given order kept)");

    CommonOptions mesh_opts;
    mesh_opts.n_nodes = 251;
    double first_order_bias = 0.0;
    CLI::App* mesh_cmd = app.add_subcommand(
        "mesh-study", "Richardson convergence-order check on h, h/2, h/4");
    add_common(mesh_cmd, mesh_opts, "Newton correction tolerance");
    mesh_cmd->add_option(
        "--inject-first-order-bias", first_order_bias,
        "Test hook: add coefficient*h to each wall quantity before the ratio "
        "computation, simulating a first-order scheme (negative control)");

    std::vector<std::string> args;
    try {
        args = expand_config(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return 3;
    }

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        if (solve_cmd->parsed()) return run_solve(solve_opts);
        if (validate_cmd->parsed())
            return run_validate(validate_opts, include_pr2, validate_tol->count() > 0);
        if (sweep_cmd->parsed()) return run_sweep_cmd(sweep_opts, vary);
        if (mesh_cmd->parsed()) return run_mesh_study(mesh_opts, first_order_bias);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return 3;
    } catch (const nanoflow::solver_failure& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return 2;
    } catch (const nanoflow::blow_up_error& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
