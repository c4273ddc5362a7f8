#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "nanoflow/profile.hpp"

namespace nanoflow::csv {

// Shortest decimal form that parses back to the identical double.
inline std::string format_double(double v) {
    char buf[64];
    const std::to_chars_result res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
    double v = 0.0;
    const std::from_chars_result res =
        std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw std::invalid_argument("parse_double: malformed number '" +
                                    std::string(text) + "'");
    return v;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

inline constexpr std::string_view profile_header = "eta,f,fp,fpp,theta,thetap";

inline void write_profile(std::ostream& os, const SolutionProfile& p) {
    os << profile_header << '\n';
    for (std::size_t j = 0; j < p.states.size(); ++j) {
        const StateVector& s = p.states[j];
        os << format_double(p.mesh.nodes[j]) << ',' << format_double(s.f) << ','
           << format_double(s.fp) << ',' << format_double(s.fpp) << ','
           << format_double(s.theta) << ',' << format_double(s.thetap) << '\n';
    }
}

inline void write_profile_file(const std::string& path, const SolutionProfile& p) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::invalid_argument("write_profile_file: cannot open '" + path + "'");
    write_profile(os, p);
    if (!os)
        throw std::runtime_error("write_profile_file: write failed for '" + path + "'");
}

// Reads nodes and states back; iteration metadata is not part of the format.
inline std::pair<std::vector<double>, std::vector<StateVector>>
read_profile(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != profile_header)
        throw std::invalid_argument("read_profile: missing profile header");
    std::vector<double> etas;
    std::vector<StateVector> states;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 6)
            throw std::invalid_argument("read_profile: expected 6 fields per row");
        etas.push_back(parse_double(fields[0]));
        states.push_back({parse_double(fields[1]), parse_double(fields[2]),
                          parse_double(fields[3]), parse_double(fields[4]),
                          parse_double(fields[5])});
    }
    return {std::move(etas), std::move(states)};
}

inline std::pair<std::vector<double>, std::vector<StateVector>>
read_profile_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::invalid_argument("read_profile_file: cannot open '" + path + "'");
    return read_profile(is);
}

// One sweep result row; values come from the best iterate even when the case
// failed to converge.
struct SweepRow {
    std::string param;
    double value = 0.0;
    std::string particle;
    double skin_friction = 0.0;
    double nusselt = 0.0;
    bool converged = false;
    int iterations = 0;
};

inline constexpr std::string_view sweep_header =
    "param,value,particle,skin_friction,nusselt,converged,iterations";

inline void write_sweep(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << sweep_header << '\n';
    for (const SweepRow& r : rows) {
        os << r.param << ',' << format_double(r.value) << ',' << r.particle << ','
           << format_double(r.skin_friction) << ',' << format_double(r.nusselt) << ','
           << (r.converged ? "true" : "false") << ',' << r.iterations << '\n';
    }
}

inline void write_sweep_file(const std::string& path, const std::vector<SweepRow>& rows) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::invalid_argument("write_sweep_file: cannot open '" + path + "'");
    write_sweep(os, rows);
    if (!os)
        throw std::runtime_error("write_sweep_file: write failed for '" + path + "'");
}

inline std::vector<SweepRow> read_sweep_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::invalid_argument("read_sweep_file: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(is, line) || line != sweep_header)
        throw std::invalid_argument("read_sweep_file: missing sweep header");
    std::vector<SweepRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 7)
            throw std::invalid_argument("read_sweep_file: expected 7 fields per row");
        SweepRow r;
        r.param = std::string(fields[0]);
        r.value = parse_double(fields[1]);
        r.particle = std::string(fields[2]);
        r.skin_friction = parse_double(fields[3]);
        r.nusselt = parse_double(fields[4]);
        if (fields[5] == "true") r.converged = true;
        else if (fields[5] == "false") r.converged = false;
        else throw std::invalid_argument("read_sweep_file: malformed converged flag");
        r.iterations = static_cast<int>(parse_double(fields[6]));
        rows.push_back(std::move(r));
    }
    return rows;
}

// Sidecar of key=value lines describing how an output file was produced.
inline void write_meta_file(const std::string& path,
                            const std::vector<std::pair<std::string, std::string>>& entries) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::invalid_argument("write_meta_file: cannot open '" + path + "'");
    for (const auto& [key, value] : entries)
        os << key << '=' << value << '\n';
    if (!os)
        throw std::runtime_error("write_meta_file: write failed for '" + path + "'");
}

} // namespace nanoflow::csv
