#pragma once

// Experiment orchestration behind the CLI subcommands. Every run writes its
// artifacts (CSV / PGM / JSON, all with 17-significant-digit floats) into the
// configured output directory and finishes with a manifest recording the
// config echo, artifact checksums, versions, and wall-clock time. Identical
// config + seed reproduce artifacts byte for byte.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "eitscan/config.hpp"
#include "eitscan/disk_forward.hpp"
#include "eitscan/errors.hpp"
#include "eitscan/greens_trace.hpp"
#include "eitscan/imaging.hpp"
#include "eitscan/io_util.hpp"
#include "eitscan/regularize.hpp"

namespace eitscan {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kPrngName = "mt19937_64/top53";

struct ManifestEntry {
    std::string path;     // relative to the output directory
    std::string stage;
    std::size_t bytes = 0;
    std::string fnv1a64;
};

struct RunManifest {
    std::string command;
    ExperimentConfig config;
    std::vector<ManifestEntry> artifacts;
    double wall_clock_seconds = 0.0;
};

namespace detail {

class ArtifactWriter {
public:
    ArtifactWriter(std::string command, const ExperimentConfig& cfg)
        : dir_(cfg.output_dir), start_(std::chrono::steady_clock::now()) {
        manifest_.command = std::move(command);
        manifest_.config = cfg;
        ensure_directory(dir_);
    }

    void write(const std::string& name, const std::string& stage, const std::string& content) {
        write_file(dir_ / name, content);
        manifest_.artifacts.push_back({name, stage, content.size(), fnv1a64_hex(content)});
    }

    // The manifest goes last, once every declared artifact exists on disk.
    RunManifest finalize() {
        for (const ManifestEntry& e : manifest_.artifacts)
            if (!std::filesystem::exists(dir_ / e.path))
                throw io_error("manifest: declared artifact missing: " + e.path);
        manifest_.wall_clock_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();

        nlohmann::json j;
        j["command"] = manifest_.command;
        j["versions"] = {{"eitscan", kVersion},
                         {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                       std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                       std::to_string(EIGEN_MINOR_VERSION)},
                         {"prng", kPrngName},
                         {"checksum", "fnv1a64"}};
        j["config"] = serialize_config(manifest_.config);
        j["wall_clock_seconds"] = manifest_.wall_clock_seconds;
        nlohmann::json arts = nlohmann::json::array();
        for (const ManifestEntry& e : manifest_.artifacts)
            arts.push_back({{"path", e.path}, {"stage", e.stage}, {"bytes", e.bytes}, {"fnv1a64", e.fnv1a64}});
        j["artifacts"] = arts;
        write_file(dir_ / "manifest.json", j.dump(2) + "\n");
        return manifest_;
    }

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    RunManifest manifest_;
    std::chrono::steady_clock::time_point start_;
};

inline std::string operator_csv(const OperatorMatrix& op) {
    std::string out;
    for (Eigen::Index i = 0; i < op.entries.rows(); ++i) {
        for (Eigen::Index j = 0; j < op.entries.cols(); ++j) {
            if (j) out += ",";
            out += format_g17(op.entries(i, j));
        }
        out += "\n";
    }
    return out;
}

inline std::string operator_metadata_json(const ExperimentConfig& cfg, const OperatorMatrix& op) {
    nlohmann::json j;
    j["n_points"] = cfg.n_points;
    j["truncation"] = cfg.truncation;
    j["medium"] = {{"rho", cfg.medium.rho},
                   {"sigma_out", cfg.medium.sigma_out},
                   {"sigma_in", cfg.medium.sigma_in},
                   {"gamma", cfg.medium.gamma}};
    j["delta"] = op.noise_level;
    if (op.seed)
        j["seed"] = *op.seed;
    else
        j["seed"] = nullptr;
    j["prng"] = kPrngName;
    return j.dump(2) + "\n";
}

inline std::string map_csv(const IndicatorMap& map) {
    std::string out = "x,y,value,flag\n";
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        const GridPoint& p = map.grid.points[i];
        out += format_g17(p.x) + "," + format_g17(p.y) + "," + format_g17(map.values[i]) + "," +
               std::to_string(static_cast<int>(map.flags[i])) + "\n";
    }
    return out;
}

// P5 PGM raster of the normalized map, values scaled by 255; points outside
// the sampling radius are black.
inline std::string map_pgm(const IndicatorMap& map) {
    const int res = map.grid.resolution;
    std::string out = "P5\n" + std::to_string(res) + " " + std::to_string(res) + "\n255\n";
    std::string raster(static_cast<std::size_t>(res) * static_cast<std::size_t>(res), '\0');
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        const GridPoint& p = map.grid.points[i];
        double v = map.values[i];
        v = std::min(1.0, std::max(0.0, v));
        raster[static_cast<std::size_t>(p.iy) * res + static_cast<std::size_t>(p.ix)] =
            static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0)));
    }
    return out + raster;
}

inline nlohmann::json metrics_json(const std::string& method, const std::string& filter,
                                   const ReconMetrics& m) {
    return {{"method", method},        {"filter", filter},
            {"contrast", m.contrast},  {"jaccard", m.jaccard},
            {"argmax_dist", m.argmax_dist}, {"flagged", m.flagged}};
}

inline OperatorMatrix build_operator(const ExperimentConfig& cfg) {
    const BoundaryGrid grid = BoundaryGrid::uniform(cfg.n_points);
    const KernelSpec kernel{cfg.truncation};
    OperatorMatrix op = assemble_operator(cfg.medium, grid, kernel);
    if (cfg.delta > 0.0) op = apply_noise(op, cfg.delta, cfg.seed);
    return op;
}

struct MapRun {
    ImagingMethod method;
    FilterSpec filter;
    IndicatorMap map;      // normalized
    ReconMetrics metrics;
};

inline std::vector<MapRun> run_maps(const ExperimentConfig& cfg, const OperatorMatrix& op) {
    const ImagingGrid grid = ImagingGrid::cartesian(cfg.grid_resolution, cfg.r_max);
    const SpectralSystem sys = decompose(op);
    std::vector<MapRun> runs;
    for (ImagingMethod method : cfg.methods) {
        for (const FilterSpec& filter : cfg.filters_for(method)) {
            IndicatorMap raw = method == ImagingMethod::lsm
                                   ? lsm_indicator(op, grid, cfg.medium.sigma_out, filter)
                                   : rfm_indicator(sys, grid, cfg.medium.sigma_out, filter);
            IndicatorMap norm = normalize_map(raw);
            runs.push_back({method, filter, std::move(norm), {}});
            runs.back().metrics = score(runs.back().map, cfg.medium, cfg.tau);
        }
    }
    return runs;
}

inline std::string map_basename(const MapRun& r) {
    std::string scheme = to_string(r.filter.scheme);
    if (r.filter.scheme == FilterScheme::ttls) scheme += "_k" + std::to_string(r.filter.k);
    return "map_" + to_string(r.method) + "_" + scheme;
}

} // namespace detail

// `forward`: synthesize the operator and export it with its metadata record.
inline RunManifest run_forward(const ExperimentConfig& cfg, std::string* warning = nullptr) {
    cfg.validate();
    detail::ArtifactWriter w("forward", cfg);
    const OperatorMatrix op = detail::build_operator(cfg);
    if (warning != nullptr && op.entries.cwiseAbs().maxCoeff() <= 1e-14)
        *warning = "operator is numerically zero (vanishing interface: gamma = 0 and sigma_in = sigma_out)";
    w.write("operator.csv", "forward", detail::operator_csv(op));
    w.write("operator_meta.json", "forward", detail::operator_metadata_json(cfg, op));
    return w.finalize();
}

// `greens`: boundary trace of the Robin Green's function for one sampling
// point, rows (phi_j, value).
inline RunManifest run_greens(const ExperimentConfig& cfg) {
    cfg.validate();
    cfg.greens_point.validate(cfg.r_max);
    detail::ArtifactWriter w("greens", cfg);
    const BoundaryGrid grid = BoundaryGrid::uniform(cfg.n_points);
    const GreensTrace trace = robin_greens_trace(cfg.greens_point, cfg.medium.sigma_out, grid);
    std::string csv = "phi,value\n";
    for (int j = 0; j < grid.n_points; ++j)
        csv += format_g17(grid.angles[static_cast<std::size_t>(j)]) + "," +
               format_g17(trace.values[static_cast<std::size_t>(j)]) + "\n";
    w.write("greens_trace.csv", "greens", csv);
    return w.finalize();
}

// `image`: one normalized indicator map per (method, filter) pair plus a
// metrics record.
inline RunManifest run_image(const ExperimentConfig& cfg) {
    cfg.validate_for_image();
    detail::ArtifactWriter w("image", cfg);
    const OperatorMatrix op = detail::build_operator(cfg);
    const std::vector<detail::MapRun> runs = detail::run_maps(cfg, op);

    nlohmann::json metrics = nlohmann::json::array();
    for (const detail::MapRun& r : runs) {
        const std::string base = detail::map_basename(r);
        w.write(base + ".csv", "image", detail::map_csv(r.map));
        w.write(base + ".pgm", "image", detail::map_pgm(r.map));
        metrics.push_back(detail::metrics_json(to_string(r.method), r.filter.label(), r.metrics));
    }
    w.write("metrics.json", "metrics", metrics.dump(2) + "\n");
    return w.finalize();
}

// `picard`: spectral diagnostics (n, s_n, |<u_n, b>|, partial_sum) for each
// requested sampling point.
inline RunManifest run_picard(const ExperimentConfig& cfg, const std::vector<SamplingPoint>& z_list) {
    cfg.validate();
    if (z_list.empty()) throw config_error("picard: empty sampling-point list");
    for (const SamplingPoint& z : z_list) z.validate(cfg.r_max);

    detail::ArtifactWriter w("picard", cfg);
    const OperatorMatrix op = detail::build_operator(cfg);
    const SpectralSystem sys = decompose(op);
    if (sys.size() == 0) throw numerical_error("picard: zero operator");
    const BoundaryGrid grid = BoundaryGrid::uniform(cfg.n_points);

    for (std::size_t zi = 0; zi < z_list.size(); ++zi) {
        const GreensTrace trace = robin_greens_trace(z_list[zi], cfg.medium.sigma_out, grid);
        const Eigen::Map<const Eigen::VectorXd> b(trace.values.data(),
                                                  static_cast<Eigen::Index>(trace.values.size()));
        const std::vector<double> sums = picard_partial_sums(sys, b, sys.size());
        std::string csv = "n,s,coef,partial_sum\n";
        for (int i = 0; i < sys.size(); ++i)
            csv += std::to_string(i + 1) + "," + format_g17(sys.singular_values(i)) + "," +
                   format_g17(std::abs(sys.left_vectors.col(i).dot(b))) + "," +
                   format_g17(sums[static_cast<std::size_t>(i)]) + "\n";
        w.write("picard_" + std::to_string(zi) + ".csv", "picard", csv);
    }
    return w.finalize();
}

enum class SweepAxis { delta, alpha, rho };

inline SweepAxis parse_sweep_axis(const std::string& s) {
    if (s == "delta") return SweepAxis::delta;
    if (s == "alpha") return SweepAxis::alpha;
    if (s == "rho") return SweepAxis::rho;
    throw config_error("sweep: unknown axis '" + s + "' (expected delta, alpha, or rho)");
}

// `sweep`: rerun the imaging pipeline along one axis, one metrics row per
// (value, method, filter); per-row failures are recorded and the sweep
// continues. For the alpha axis the value replaces alpha in every Tikhonov /
// spectral cut-off filter; TTLS truncation indices are left untouched.
inline RunManifest run_sweep(const ExperimentConfig& cfg, SweepAxis axis,
                             const std::vector<double>& values) {
    cfg.validate_for_image();
    if (values.empty()) throw config_error("sweep: empty value list");

    detail::ArtifactWriter w("sweep", cfg);
    const std::string axis_name = axis == SweepAxis::delta ? "delta"
                                  : axis == SweepAxis::alpha ? "alpha"
                                                             : "rho";
    std::string csv = axis_name + ",method,filter,contrast,jaccard,argmax_dist,flagged,status\n";
    for (double v : values) {
        ExperimentConfig c = cfg;
        try {
            switch (axis) {
                case SweepAxis::delta: c.delta = v; break;
                case SweepAxis::rho: c.medium.rho = v; break;
                case SweepAxis::alpha:
                    for (auto* list : {&c.lsm_filters, &c.rfm_filters})
                        for (FilterSpec& f : *list) {
                            if (f.scheme == FilterScheme::tikhonov) f = FilterSpec::tikhonov(v);
                            else if (f.scheme == FilterScheme::spectral_cutoff) f = FilterSpec::spectral_cutoff(v);
                        }
                    break;
            }
            c.validate_for_image();
            const OperatorMatrix op = detail::build_operator(c);
            for (const detail::MapRun& r : detail::run_maps(c, op))
                csv += format_g17(v) + "," + to_string(r.method) + "," + r.filter.label() + "," +
                       format_g17(r.metrics.contrast) + "," + format_g17(r.metrics.jaccard) + "," +
                       format_g17(r.metrics.argmax_dist) + "," + std::to_string(r.metrics.flagged) +
                       ",ok\n";
        } catch (const std::exception& e) {
            std::string msg = e.what();
            for (char& ch : msg)
                if (ch == ',' || ch == '\n') ch = ';';
            csv += format_g17(v) + ",,,,,,,error:" + msg + "\n";
        }
    }
    w.write("sweep.csv", "sweep", csv);
    return w.finalize();
}

// Re-read every artifact named by a manifest and verify its checksum.
inline bool verify_manifest(const std::filesystem::path& dir) {
    const nlohmann::json j = nlohmann::json::parse(read_file(dir / "manifest.json"));
    for (const auto& a : j.at("artifacts")) {
        const std::string content = read_file(dir / a.at("path").get<std::string>());
        if (content.size() != a.at("bytes").get<std::size_t>()) return false;
        if (fnv1a64_hex(content) != a.at("fnv1a64").get<std::string>()) return false;
    }
    return true;
}

} // namespace eitscan
