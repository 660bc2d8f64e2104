#pragma once

// Experiment configuration: a flat key = value text format (one key per line,
// '#' starts a comment) overridable by CLI flags; precedence is
// flags > file > defaults. Serialization is canonical (fixed key order,
// 17-digit floats) so parse(serialize(c)) == c.

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "eitscan/disk_forward.hpp"
#include "eitscan/errors.hpp"
#include "eitscan/imaging.hpp"
#include "eitscan/io_util.hpp"
#include "eitscan/regularize.hpp"

namespace eitscan {

struct ExperimentConfig {
    MediumConfig medium;
    int n_points = 32;
    int truncation = 10;
    double delta = 0.0;
    std::uint64_t seed = 1;
    int grid_resolution = 101;
    double r_max = kSamplingRadiusMax;
    double tau = 0.5;
    std::vector<ImagingMethod> methods = {ImagingMethod::lsm, ImagingMethod::rfm};
    std::vector<FilterSpec> lsm_filters = {FilterSpec::tikhonov(1e-9),
                                           FilterSpec::spectral_cutoff(1e-9),
                                           FilterSpec::ttls(5)};
    std::vector<FilterSpec> rfm_filters = {FilterSpec::tikhonov(1e-16),
                                           FilterSpec::spectral_cutoff(1e-16),
                                           FilterSpec::ttls(5)};
    std::vector<SamplingPoint> picard_points = {{0.2, 0.0}, {0.8, 0.0}};
    SamplingPoint greens_point = {0.4, 0.0};
    std::string output_dir = "out";

    const std::vector<FilterSpec>& filters_for(ImagingMethod m) const {
        return m == ImagingMethod::lsm ? lsm_filters : rfm_filters;
    }

    void validate() const {
        medium.validate();
        if (n_points < 1) throw config_error("config: n_points must be positive");
        if (truncation < 1) throw config_error("config: truncation must be >= 1");
        if (delta < 0.0) throw config_error("config: delta must be nonnegative");
        if (grid_resolution < 2) throw config_error("config: grid_resolution must be >= 2");
        if (!(r_max > 0.0 && r_max <= kSamplingRadiusMax))
            throw config_error("config: r_max must lie in (0, " +
                               format_g17(kSamplingRadiusMax) + "] (Green's quadrature cap)");
        if (!(tau > 0.0 && tau < 1.0)) throw config_error("config: tau must lie in (0,1)");
    }

    void validate_for_image() const {
        validate();
        if (methods.empty()) throw config_error("config: methods must be nonempty for image runs");
        for (ImagingMethod m : methods)
            if (filters_for(m).empty())
                throw config_error("config: filter list for " + to_string(m) + " must be nonempty");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

inline double parse_double(const std::string& key, const std::string& s) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw config_error("config: invalid number for key '" + key + "': " + s);
    }
}

inline long long parse_int(const std::string& key, const std::string& s) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw config_error("config: invalid integer for key '" + key + "': " + s);
    }
}

inline FilterSpec parse_filter(const std::string& key, const std::string& item) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
        throw config_error("config: filter '" + item + "' for key '" + key +
                           "' must look like scheme:parameter");
    const std::string scheme = trim(item.substr(0, colon));
    const std::string param = trim(item.substr(colon + 1));
    if (scheme == "tikhonov") return FilterSpec::tikhonov(parse_double(key, param));
    if (scheme == "spectral_cutoff") return FilterSpec::spectral_cutoff(parse_double(key, param));
    if (scheme == "ttls") return FilterSpec::ttls(static_cast<int>(parse_int(key, param)));
    throw config_error("config: unknown filter scheme '" + scheme + "' for key '" + key + "'");
}

inline std::vector<FilterSpec> parse_filter_list(const std::string& key, const std::string& value) {
    std::vector<FilterSpec> out;
    for (const std::string& item : split(value, ','))
        if (!item.empty()) out.push_back(parse_filter(key, item));
    return out;
}

inline std::string filters_to_string(const std::vector<FilterSpec>& fs) {
    std::string out;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        if (i) out += ",";
        out += fs[i].label();
    }
    return out;
}

inline std::vector<SamplingPoint> parse_points(const std::string& key, const std::string& value) {
    std::vector<SamplingPoint> out;
    for (const std::string& item : split(value, ';')) {
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw config_error("config: point '" + item + "' for key '" + key +
                               "' must look like rho:theta");
        out.push_back({parse_double(key, trim(item.substr(0, colon))),
                       parse_double(key, trim(item.substr(colon + 1)))});
    }
    return out;
}

inline std::string points_to_string(const std::vector<SamplingPoint>& ps) {
    std::string out;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (i) out += ";";
        out += format_g17(ps[i].rho_z) + ":" + format_g17(ps[i].theta_z);
    }
    return out;
}

} // namespace detail

// Apply one key = value assignment. Used by both the file parser and the CLI
// --set overrides.
inline void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    using detail::parse_double;
    using detail::parse_int;
    if (key == "rho") cfg.medium.rho = parse_double(key, value);
    else if (key == "sigma_out") cfg.medium.sigma_out = parse_double(key, value);
    else if (key == "sigma_in") cfg.medium.sigma_in = parse_double(key, value);
    else if (key == "gamma") cfg.medium.gamma = parse_double(key, value);
    else if (key == "n_points") cfg.n_points = static_cast<int>(parse_int(key, value));
    else if (key == "truncation") cfg.truncation = static_cast<int>(parse_int(key, value));
    else if (key == "delta") cfg.delta = parse_double(key, value);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "grid_resolution") cfg.grid_resolution = static_cast<int>(parse_int(key, value));
    else if (key == "r_max") cfg.r_max = parse_double(key, value);
    else if (key == "tau") cfg.tau = parse_double(key, value);
    else if (key == "methods") {
        cfg.methods.clear();
        for (const std::string& m : detail::split(value, ',')) {
            if (m.empty()) continue;
            if (m == "LSM" || m == "lsm") cfg.methods.push_back(ImagingMethod::lsm);
            else if (m == "RFM" || m == "rfm") cfg.methods.push_back(ImagingMethod::rfm);
            else throw config_error("config: unknown method '" + m + "'");
        }
    }
    else if (key == "filters") {
        cfg.lsm_filters = detail::parse_filter_list(key, value);
        cfg.rfm_filters = cfg.lsm_filters;
    }
    else if (key == "lsm_filters") cfg.lsm_filters = detail::parse_filter_list(key, value);
    else if (key == "rfm_filters") cfg.rfm_filters = detail::parse_filter_list(key, value);
    else if (key == "picard_points") cfg.picard_points = detail::parse_points(key, value);
    else if (key == "z_rho") cfg.greens_point.rho_z = parse_double(key, value);
    else if (key == "z_theta") cfg.greens_point.theta_z = parse_double(key, value);
    else if (key == "output_dir") cfg.output_dir = value;
    else throw config_error("config: unknown key '" + key + "'");
}

inline ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config: line " + std::to_string(lineno) + " is not 'key = value'");
        try {
            apply_config_entry(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
        } catch (const config_error& e) {
            throw config_error(std::string(e.what()) + " (line " + std::to_string(lineno) + ")");
        }
    }
    return cfg;
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
    std::string methods;
    for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
        if (i) methods += ",";
        methods += cfg.methods[i] == ImagingMethod::lsm ? "LSM" : "RFM";
    }
    std::string out;
    out += "rho = " + format_g17(cfg.medium.rho) + "\n";
    out += "sigma_out = " + format_g17(cfg.medium.sigma_out) + "\n";
    out += "sigma_in = " + format_g17(cfg.medium.sigma_in) + "\n";
    out += "gamma = " + format_g17(cfg.medium.gamma) + "\n";
    out += "n_points = " + std::to_string(cfg.n_points) + "\n";
    out += "truncation = " + std::to_string(cfg.truncation) + "\n";
    out += "delta = " + format_g17(cfg.delta) + "\n";
    out += "seed = " + std::to_string(cfg.seed) + "\n";
    out += "grid_resolution = " + std::to_string(cfg.grid_resolution) + "\n";
    out += "r_max = " + format_g17(cfg.r_max) + "\n";
    out += "tau = " + format_g17(cfg.tau) + "\n";
    out += "methods = " + methods + "\n";
    out += "lsm_filters = " + detail::filters_to_string(cfg.lsm_filters) + "\n";
    out += "rfm_filters = " + detail::filters_to_string(cfg.rfm_filters) + "\n";
    out += "picard_points = " + detail::points_to_string(cfg.picard_points) + "\n";
    out += "z_rho = " + format_g17(cfg.greens_point.rho_z) + "\n";
    out += "z_theta = " + format_g17(cfg.greens_point.theta_z) + "\n";
    out += "output_dir = " + cfg.output_dir + "\n";
    return out;
}

inline bool operator==(const FilterSpec& a, const FilterSpec& b) {
    return a.scheme == b.scheme && a.alpha == b.alpha && a.k == b.k;
}

inline bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    const auto pts_eq = [](const std::vector<SamplingPoint>& x, const std::vector<SamplingPoint>& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i].rho_z != y[i].rho_z || x[i].theta_z != y[i].theta_z) return false;
        return true;
    };
    return a.medium.rho == b.medium.rho && a.medium.sigma_out == b.medium.sigma_out &&
           a.medium.sigma_in == b.medium.sigma_in && a.medium.gamma == b.medium.gamma &&
           a.n_points == b.n_points && a.truncation == b.truncation && a.delta == b.delta &&
           a.seed == b.seed && a.grid_resolution == b.grid_resolution && a.r_max == b.r_max &&
           a.tau == b.tau && a.methods == b.methods && a.lsm_filters == b.lsm_filters &&
           a.rfm_filters == b.rfm_filters && pts_eq(a.picard_points, b.picard_points) &&
           a.greens_point.rho_z == b.greens_point.rho_z &&
           a.greens_point.theta_z == b.greens_point.theta_z && a.output_dir == b.output_dir;
}

} // namespace eitscan
