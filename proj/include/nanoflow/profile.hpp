#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "nanoflow/model.hpp"

namespace nanoflow {

// Strictly increasing eta nodes starting at the wall (eta = 0).
struct Mesh {
    std::vector<double> nodes;

    static Mesh uniform(double eta_max, std::size_t intervals) {
        if (!(eta_max > 0.0) || !std::isfinite(eta_max))
            throw std::invalid_argument("Mesh::uniform: eta_max must be positive");
        if (intervals < 8)
            throw std::invalid_argument("Mesh::uniform: at least 8 intervals required");
        Mesh m;
        m.nodes.resize(intervals + 1);
        for (std::size_t j = 0; j <= intervals; ++j)
            m.nodes[j] = eta_max * static_cast<double>(j) / static_cast<double>(intervals);
        m.nodes.back() = eta_max;
        return m;
    }

    std::size_t size() const { return nodes.size(); }
    std::size_t intervals() const { return nodes.size() - 1; }
    double eta_max() const { return nodes.back(); }
    double spacing(std::size_t j) const { return nodes[j] - nodes[j - 1]; }
};

inline void validate_mesh(const Mesh& m) {
    if (m.nodes.size() < 9)
        throw std::invalid_argument("validate_mesh: at least 8 intervals required");
    if (m.nodes.front() != 0.0)
        throw std::invalid_argument("validate_mesh: first node must be eta = 0");
    for (std::size_t j = 1; j < m.nodes.size(); ++j)
        if (!(m.nodes[j] > m.nodes[j - 1]) || !std::isfinite(m.nodes[j]))
            throw std::invalid_argument("validate_mesh: nodes must be strictly increasing");
}

// Nodal similarity states plus the iteration record that produced them.
struct SolutionProfile {
    Mesh mesh;
    std::vector<StateVector> states;
    bool converged = false;
    int iterations = 0;
    double final_correction_norm = 0.0;
    std::vector<double> correction_history;

    const StateVector& wall() const { return states.front(); }
    const StateVector& far() const { return states.back(); }

    // Largest |f'| or |theta| over the outer fraction of the mesh; small values
    // indicate the truncated domain actually captured the decay.
    double far_field_magnitude(double outer_fraction = 0.1) const {
        const double eta_start = mesh.eta_max() * (1.0 - outer_fraction);
        double worst = 0.0;
        for (std::size_t j = 0; j < states.size(); ++j) {
            if (mesh.nodes[j] < eta_start) continue;
            worst = std::max({worst, std::abs(states[j].fp), std::abs(states[j].theta)});
        }
        return worst;
    }
};

inline void validate_profile(const SolutionProfile& p) {
    validate_mesh(p.mesh);
    if (p.states.size() != p.mesh.size())
        throw std::invalid_argument("validate_profile: one state per mesh node required");
}

// Piecewise-cubic Hermite evaluation using the stored derivative pairs
// (f, f') and (theta, theta'); f'' and theta' interpolate linearly.
inline StateVector interpolate(const SolutionProfile& p, double eta) {
    if (p.states.size() != p.mesh.size() || p.states.empty())
        throw std::invalid_argument("interpolate: malformed profile");
    const auto& nodes = p.mesh.nodes;
    if (!(eta >= nodes.front()) || !(eta <= nodes.back()))
        throw std::invalid_argument("interpolate: eta outside the mesh");

    auto it = std::upper_bound(nodes.begin(), nodes.end(), eta);
    std::size_t hi = static_cast<std::size_t>(it - nodes.begin());
    if (hi == nodes.size()) --hi;
    if (hi == 0) ++hi;
    const std::size_t lo = hi - 1;

    const double h = nodes[hi] - nodes[lo];
    const double t = (eta - nodes[lo]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;

    const StateVector& a = p.states[lo];
    const StateVector& b = p.states[hi];

    StateVector out;
    out.f = h00 * a.f + h10 * h * a.fp + h01 * b.f + h11 * h * b.fp;
    out.fp = h00 * a.fp + h10 * h * a.fpp + h01 * b.fp + h11 * h * b.fpp;
    out.fpp = (1.0 - t) * a.fpp + t * b.fpp;
    out.theta = h00 * a.theta + h10 * h * a.thetap + h01 * b.theta + h11 * h * b.thetap;
    out.thetap = (1.0 - t) * a.thetap + t * b.thetap;
    return out;
}

} // namespace nanoflow
