#include "mbcs/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "mbcs/interferometer.hpp"
#include "mbcs/io.hpp"
#include "mbcs/rates.hpp"
#include "mbcs/spectra.hpp"

namespace mbcs {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ValidationError(path + ": " + message);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end()) {
            fail(path + "." + key, "unknown key");
        }
    }
}

const json& require_key(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) fail(path + "." + key, "missing");
    return obj.at(key);
}

template <typename T>
T get_as(const json& value, const std::string& path) {
    try {
        return value.get<T>();
    } catch (const json::exception&) {
        fail(path, "has the wrong type");
    }
}

template <typename T>
T get_field(const json& obj, const std::string& path, const char* key) {
    return get_as<T>(require_key(obj, path, key), path + "." + key);
}

template <typename T>
T get_field_or(const json& obj, const std::string& path, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    return get_as<T>(obj.at(key), path + "." + key);
}

PolarizationVector parse_polarization(const json& value, const std::string& path) {
    if (value.is_string()) {
        const auto s = value.get<std::string>();
        if (s == "e1") return PolarizationVector::e1();
        if (s == "e2") return PolarizationVector::e2();
        fail(path, "polarization string must be e1 or e2");
    }
    if (value.is_array() && value.size() == 2) {
        return {Complex(get_as<double>(value[0], path), 0.0),
                Complex(get_as<double>(value[1], path), 0.0)};
    }
    if (value.is_array() && value.size() == 4) {
        return {Complex(get_as<double>(value[0], path), get_as<double>(value[1], path)),
                Complex(get_as<double>(value[2], path), get_as<double>(value[3], path))};
    }
    fail(path, "polarization must be e1, e2, [x,y] or [re1,im1,re2,im2]");
}

InterferometerSpec parse_interferometer(const json& obj, const std::string& path) {
    if (!obj.is_object()) fail(path, "must be an object");
    InterferometerSpec spec;
    const auto type = get_field<std::string>(obj, path, "type");
    if (type == "haar") {
        check_keys(obj, path, {"type", "m", "seed"});
        spec.kind = InterferometerSpec::Kind::haar;
        spec.m = get_field<int>(obj, path, "m");
        spec.seed = get_field_or<std::uint64_t>(obj, path, "seed", 0);
    } else if (type == "beam_splitter") {
        check_keys(obj, path, {"type"});
        spec.kind = InterferometerSpec::Kind::beam_splitter;
        spec.m = 2;
    } else if (type == "file") {
        check_keys(obj, path, {"type", "path"});
        spec.kind = InterferometerSpec::Kind::file;
        spec.path = get_field<std::string>(obj, path, "path");
        spec.m = 0;  // known after loading
    } else {
        fail(path + ".type", "must be haar, beam_splitter or file");
    }
    return spec;
}

TimeGrid parse_grid(const json& obj, const std::string& path) {
    if (!obj.is_object()) fail(path, "must be an object");
    check_keys(obj, path, {"t_min", "t_max", "num_points"});
    TimeGrid grid;
    grid.t_min = get_field<double>(obj, path, "t_min");
    grid.t_max = get_field<double>(obj, path, "t_max");
    grid.num_points = get_field_or<int>(obj, path, "num_points", 256);
    return grid;
}

FigureParams parse_figure(const json& obj, const std::string& path) {
    if (!obj.is_object()) fail(path, "must be an object");
    FigureParams fig;
    fig.name = get_field<std::string>(obj, path, "name");
    if (fig.name == "hom_dip") {
        check_keys(obj, path, {"name", "points", "tau_max"});
        fig.points = get_field_or<int>(obj, path, "points", 101);
        fig.tau_max = get_field_or<double>(obj, path, "tau_max", 5.0);
    } else if (fig.name == "overlap_a" || fig.name == "overlap_g") {
        check_keys(obj, path,
                   {"name", "dt0_min", "dt0_max", "dt0_points", "domega_min", "domega_max",
                    "domega_points"});
        fig.dt0_min = get_field_or<double>(obj, path, "dt0_min", -3.0);
        fig.dt0_max = get_field_or<double>(obj, path, "dt0_max", 3.0);
        fig.dt0_points = get_field_or<int>(obj, path, "dt0_points", 61);
        fig.domega_min = get_field_or<double>(obj, path, "domega_min", 0.0);
        fig.domega_max = get_field_or<double>(obj, path, "domega_max", 6.0);
        fig.domega_points = get_field_or<int>(obj, path, "domega_points", 61);
    } else {
        fail(path + ".name", "must be hom_dip, overlap_a or overlap_g");
    }
    return fig;
}

AveragedMode parse_averaged_mode(const json& value, const std::string& path) {
    const auto s = get_as<std::string>(value, path);
    if (s == "general") return AveragedMode::general;
    if (s == "identical") return AveragedMode::identical;
    if (s == "distinguishable") return AveragedMode::distinguishable;
    fail(path, "must be general, identical or distinguishable");
}

// The default photon pair used by figure modes: unit bandwidth, color well
// inside the narrow-bandwidth regime.
SpectralProfile reference_profile() {
    SpectralProfile p;
    p.bandwidth = 1.0;
    p.central_frequency = 60.0;
    p.emission_time = 0.0;
    p.polarization = PolarizationVector::e1();
    return p;
}

std::vector<double> linspace(double lo, double hi, int points) {
    std::vector<double> xs(points);
    for (int k = 0; k < points; ++k) {
        xs[k] = lo + (hi - lo) * k / (points - 1);
    }
    return xs;
}

UnitaryMatrix build_interferometer(const InterferometerSpec& spec) {
    switch (spec.kind) {
        case InterferometerSpec::Kind::haar: return haar_random(spec.m, spec.seed);
        case InterferometerSpec::Kind::beam_splitter: return beam_splitter_50_50();
        case InterferometerSpec::Kind::file: break;
    }
    std::ifstream in(spec.path);
    if (!in) throw IoError("cannot open unitary file " + spec.path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ValidationError("interferometer.path: " + std::string(e.what()));
    }
    return unitary_from_json(doc);
}

SourceSet build_sources(const ExperimentConfig& cfg) {
    return SourceSet{cfg.source_ports, cfg.source_profiles};
}

std::string iso_timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

double clamp_probability(double p) { return p < 0.0 && p > -1e-9 ? 0.0 : p; }

void append_csv_line(std::string& out, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) out += ",";
        out += format_double(v);
        first = false;
    }
    out += "\n";
}

}  // namespace

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::resolved_rate: return "resolved_rate";
        case RunMode::averaged: return "averaged";
        case RunMode::distribution: return "distribution";
        case RunMode::sample_ports: return "sample_ports";
        case RunMode::sample_mbcs: return "sample_mbcs";
        case RunMode::figure: return "figure";
    }
    return "averaged";
}

std::uint64_t fnv1a_hash(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    return h;
}

ExperimentConfig parse_experiment_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("config: must be a JSON object");

    ExperimentConfig cfg;
    cfg.raw = text;
    const std::string mode = get_field<std::string>(doc, "config", "mode");
    std::initializer_list<const char*> common = {"mode", "seed", "interferometer", "sources",
                                                 "propagation_delay"};
    auto with = [&](std::initializer_list<const char*> extra) {
        std::vector<const char*> keys(common);
        keys.insert(keys.end(), extra.begin(), extra.end());
        for (const auto& [key, value] : doc.items()) {
            if (std::find_if(keys.begin(), keys.end(),
                             [&](const char* a) { return key == a; }) == keys.end()) {
                fail("config." + key, "unknown key");
            }
        }
    };

    if (mode == "resolved_rate") {
        cfg.mode = RunMode::resolved_rate;
        with({"detection"});
        const json& det = require_key(doc, "config", "detection");
        check_keys(det, "config.detection", {"ports", "times", "polarizations", "cross_check"});
        cfg.detection.ports = get_field<std::vector<int>>(det, "config.detection", "ports");
        cfg.detection.times = get_field<std::vector<double>>(det, "config.detection", "times");
        const json& pols = require_key(det, "config.detection", "polarizations");
        if (!pols.is_array()) fail("config.detection.polarizations", "must be an array");
        for (std::size_t k = 0; k < pols.size(); ++k) {
            cfg.detection.polarizations.push_back(parse_polarization(
                pols[k], "config.detection.polarizations[" + std::to_string(k) + "]"));
        }
        cfg.detection.cross_check =
            get_field_or<bool>(det, "config.detection", "cross_check", false);
    } else if (mode == "averaged") {
        cfg.mode = RunMode::averaged;
        with({"detection_ports", "averaged_mode"});
        cfg.detection_ports = get_field<std::vector<int>>(doc, "config", "detection_ports");
        if (doc.contains("averaged_mode")) {
            cfg.averaged_mode = parse_averaged_mode(doc["averaged_mode"], "config.averaged_mode");
        }
    } else if (mode == "distribution") {
        cfg.mode = RunMode::distribution;
        with({"averaged_mode"});
        if (doc.contains("averaged_mode")) {
            cfg.averaged_mode = parse_averaged_mode(doc["averaged_mode"], "config.averaged_mode");
        }
    } else if (mode == "sample_ports") {
        cfg.mode = RunMode::sample_ports;
        with({"averaged_mode", "count"});
        if (doc.contains("averaged_mode")) {
            cfg.averaged_mode = parse_averaged_mode(doc["averaged_mode"], "config.averaged_mode");
        }
        cfg.count = get_field<std::size_t>(doc, "config", "count");
    } else if (mode == "sample_mbcs") {
        cfg.mode = RunMode::sample_mbcs;
        with({"count", "grid"});
        cfg.count = get_field<std::size_t>(doc, "config", "count");
        if (doc.contains("grid")) {
            cfg.grid = parse_grid(doc["grid"], "config.grid");
            cfg.grid_given = true;
        }
    } else if (mode == "figure") {
        cfg.mode = RunMode::figure;
        with({"figure"});
        cfg.figure = parse_figure(require_key(doc, "config", "figure"), "config.figure");
    } else {
        fail("config.mode",
             "must be resolved_rate, averaged, distribution, sample_ports, sample_mbcs or figure");
    }

    cfg.seed = get_field_or<std::uint64_t>(doc, "config", "seed", 0);
    cfg.propagation_delay = get_field_or<double>(doc, "config", "propagation_delay", 0.0);

    if (doc.contains("interferometer")) {
        cfg.interferometer = parse_interferometer(doc["interferometer"], "config.interferometer");
    } else if (cfg.mode != RunMode::figure) {
        fail("config.interferometer", "missing");
    }
    if (cfg.mode == RunMode::figure && doc.contains("interferometer")) {
        fail("config.interferometer", "figure modes define their own interferometer");
    }

    if (doc.contains("sources")) {
        const json& sources = doc["sources"];
        if (!sources.is_array() || sources.empty()) fail("config.sources", "must be a non-empty array");
        for (std::size_t k = 0; k < sources.size(); ++k) {
            const std::string path = "config.sources[" + std::to_string(k) + "]";
            const json& s = sources[k];
            if (!s.is_object()) fail(path, "must be an object");
            check_keys(s, path,
                       {"port", "bandwidth", "central_frequency", "emission_time", "polarization"});
            cfg.source_ports.push_back(get_field<int>(s, path, "port"));
            SpectralProfile profile;
            profile.bandwidth = get_field<double>(s, path, "bandwidth");
            profile.central_frequency = get_field<double>(s, path, "central_frequency");
            profile.emission_time = get_field_or<double>(s, path, "emission_time", 0.0);
            if (s.contains("polarization")) {
                profile.polarization = parse_polarization(s["polarization"], path + ".polarization");
            }
            cfg.source_profiles.push_back(profile);
        }
        cfg.sources_given = true;
    } else if (cfg.mode != RunMode::figure) {
        fail("config.sources", "missing");
    }
    if (cfg.mode == RunMode::figure && cfg.sources_given && cfg.figure.name != "hom_dip") {
        fail("config.sources", "only the hom_dip figure accepts explicit sources");
    }
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_experiment_config(ss.str());
}

std::vector<ValidationIssue> validate_experiment(const ExperimentConfig& cfg) {
    std::vector<ValidationIssue> issues;
    auto error = [&](const std::string& path, const std::string& message) {
        issues.push_back({false, path, message});
    };
    auto warn = [&](const std::string& path, const std::string& message) {
        issues.push_back({true, path, message});
    };

    int m = cfg.interferometer.m;
    if (cfg.mode != RunMode::figure) {
        if (cfg.interferometer.kind == InterferometerSpec::Kind::haar && m < 1) {
            error("interferometer.m", "must be at least 1");
        }
        if (cfg.interferometer.kind == InterferometerSpec::Kind::file) {
            try {
                m = build_interferometer(cfg.interferometer).dimension();
            } catch (const Error& e) {
                error("interferometer.path", e.what());
                m = 0;
            }
        }
    }

    const int n = static_cast<int>(cfg.source_ports.size());
    if (cfg.mode != RunMode::figure || cfg.sources_given) {
        std::vector<int> sorted = cfg.source_ports;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            error("sources", "ports must be pairwise distinct");
        }
        if (m > 0 && n > m) {
            error("sources", "more sources than interferometer ports (" + std::to_string(n) +
                                 " > " + std::to_string(m) + ")");
        }
        for (int i = 0; i < n; ++i) {
            const std::string path = "sources[" + std::to_string(i) + "]";
            if (m > 0 && (cfg.source_ports[i] < 1 || cfg.source_ports[i] > m)) {
                error(path + ".port", "out of range [1, " + std::to_string(m) + "]");
            }
            const auto& profile = cfg.source_profiles[i];
            if (!(profile.bandwidth > 0.0) || !std::isfinite(profile.bandwidth)) {
                error(path + ".bandwidth", "must be positive and finite");
            }
            if (!(profile.central_frequency >= 0.0)) {
                error(path + ".central_frequency", "must be nonnegative");
            } else if (profile.bandwidth > 0.0 &&
                       profile.central_frequency < 6.0 * profile.bandwidth) {
                warn(path + ".central_frequency",
                     "below 6 bandwidths; the narrow-bandwidth approximation degrades");
            }
            if (!std::isfinite(profile.emission_time)) {
                error(path + ".emission_time", "must be finite");
            }
            if (!profile.polarization.is_normalized()) {
                error(path + ".polarization", "must have unit norm");
            }
        }
    }

    switch (cfg.mode) {
        case RunMode::resolved_rate: {
            const auto& det = cfg.detection;
            if (det.ports.size() != det.times.size() ||
                det.ports.size() != det.polarizations.size()) {
                error("detection", "ports, times and polarizations must have equal length");
            }
            if (static_cast<int>(det.ports.size()) != n) {
                error("detection.ports", "must list exactly one detection per source");
            }
            for (std::size_t k = 0; k < det.ports.size(); ++k) {
                if (m > 0 && (det.ports[k] < 1 || det.ports[k] > m)) {
                    error("detection.ports[" + std::to_string(k) + "]",
                          "out of range [1, " + std::to_string(m) + "]");
                }
            }
            for (std::size_t k = 0; k < det.times.size(); ++k) {
                if (!std::isfinite(det.times[k])) {
                    error("detection.times[" + std::to_string(k) + "]", "must be finite");
                }
            }
            for (std::size_t k = 0; k < det.polarizations.size(); ++k) {
                if (!det.polarizations[k].is_normalized()) {
                    error("detection.polarizations[" + std::to_string(k) + "]",
                          "must have unit norm");
                }
            }
            if (det.cross_check && n > limits::max_double_sum_photons) {
                error("detection.cross_check",
                      "double-sum cross-check limited to N <= " +
                          std::to_string(limits::max_double_sum_photons));
            }
            break;
        }
        case RunMode::averaged: {
            if (static_cast<int>(cfg.detection_ports.size()) != n) {
                error("detection_ports", "must list exactly one detection per source");
            }
            for (std::size_t k = 0; k < cfg.detection_ports.size(); ++k) {
                if (m > 0 && (cfg.detection_ports[k] < 1 || cfg.detection_ports[k] > m)) {
                    error("detection_ports[" + std::to_string(k) + "]",
                          "out of range [1, " + std::to_string(m) + "]");
                }
            }
            if (n > limits::max_averaged_photons) {
                error("sources", "averaged probabilities limited to N <= " +
                                     std::to_string(limits::max_averaged_photons));
            }
            break;
        }
        case RunMode::distribution:
        case RunMode::sample_ports: {
            if (n > limits::max_averaged_photons) {
                error("sources", "averaged probabilities limited to N <= " +
                                     std::to_string(limits::max_averaged_photons));
            }
            if (m > 0 && port_sample_count(m, n, true) >
                             static_cast<double>(limits::max_distribution_entries)) {
                error("sources", "distribution enumeration exceeds the cap of " +
                                     std::to_string(limits::max_distribution_entries));
            }
            if (cfg.mode == RunMode::sample_ports && cfg.count < 1) {
                error("count", "must be at least 1");
            }
            break;
        }
        case RunMode::sample_mbcs: {
            if (cfg.count < 1) error("count", "must be at least 1");
            if (n > limits::max_sampler_photons) {
                error("sources", "sample_mbcs limited to N <= " +
                                     std::to_string(limits::max_sampler_photons));
            } else if (cfg.grid_given && issues.empty()) {
                try {
                    cfg.grid.validate(SourceSet{cfg.source_ports, cfg.source_profiles},
                                      PropagationConfig{cfg.propagation_delay});
                } catch (const Error& e) {
                    error("grid", e.what());
                }
                std::size_t grid_pow = 1;
                for (int j = 0; j < n; ++j) grid_pow *= static_cast<std::size_t>(cfg.grid.num_points);
                if ((grid_pow << n) > limits::max_conditional_table_entries) {
                    error("grid.num_points",
                          "conditional table would exceed " +
                              std::to_string(limits::max_conditional_table_entries) + " entries");
                }
            }
            break;
        }
        case RunMode::figure: {
            const auto& fig = cfg.figure;
            if (fig.name == "hom_dip") {
                if (fig.points < 2) error("figure.points", "must be at least 2");
                if (!(fig.tau_max > 0.0)) error("figure.tau_max", "must be positive");
                if (cfg.sources_given) {
                    if (n != 2) error("sources", "hom_dip needs exactly 2 sources");
                    if (n == 2 && !(cfg.source_ports[0] == 1 && cfg.source_ports[1] == 2) &&
                        !(cfg.source_ports[0] == 2 && cfg.source_ports[1] == 1)) {
                        error("sources", "hom_dip sources must occupy ports 1 and 2");
                    }
                }
            } else {
                if (fig.dt0_points < 2) error("figure.dt0_points", "must be at least 2");
                if (fig.domega_points < 2) error("figure.domega_points", "must be at least 2");
                if (!(fig.dt0_min < fig.dt0_max)) error("figure.dt0_min", "range is empty");
                if (!(fig.domega_min < fig.domega_max)) error("figure.domega_min", "range is empty");
                if (reference_profile().central_frequency + fig.domega_min < 0.0) {
                    error("figure.domega_min", "drives the central frequency negative");
                }
            }
            break;
        }
    }
    return issues;
}

namespace {

RunArtifacts run_resolved_rate(const ExperimentConfig& cfg) {
    const UnitaryMatrix u = build_interferometer(cfg.interferometer);
    const SourceSet sources = build_sources(cfg);
    const PropagationConfig prop{cfg.propagation_delay};
    const DetectionSample sample =
        DetectionSample::make(cfg.detection.ports, cfg.detection.times,
                              cfg.detection.polarizations);
    const double g = rate(u, sample, sources, prop);
    json result{{"mode", "resolved_rate"}, {"rate", g}};
    if (cfg.detection.cross_check) {
        result["rate_double_sum"] = rate_double_sum(u, sample, sources, prop);
    }
    RunArtifacts artifacts;
    artifacts.files.emplace_back("result.json", result.dump(2) + "\n");
    return artifacts;
}

RunArtifacts run_averaged(const ExperimentConfig& cfg) {
    const UnitaryMatrix u = build_interferometer(cfg.interferometer);
    const SourceSet sources = build_sources(cfg);
    const PortSample detectors{cfg.detection_ports};
    double p = 0.0;
    switch (cfg.averaged_mode) {
        case AveragedMode::general: p = p_av(u, detectors, sources); break;
        case AveragedMode::identical: p = p_av_identical(u, detectors, sources); break;
        case AveragedMode::distinguishable: p = p_av_distinguishable(u, detectors, sources); break;
    }
    json result{{"mode", "averaged"},
                {"averaged_mode", to_string(cfg.averaged_mode)},
                {"detection_ports", detectors.ports()},
                {"p_av", clamp_probability(p)}};
    RunArtifacts artifacts;
    artifacts.files.emplace_back("result.json", result.dump(2) + "\n");
    return artifacts;
}

RunArtifacts run_distribution(const ExperimentConfig& cfg) {
    const UnitaryMatrix u = build_interferometer(cfg.interferometer);
    const SourceSet sources = build_sources(cfg);
    const OutputDistribution dist = output_distribution(u, sources, cfg.averaged_mode);
    RunArtifacts artifacts;
    artifacts.files.emplace_back("result.json", distribution_to_json(dist).dump(2) + "\n");
    return artifacts;
}

RunArtifacts run_sample_ports(const ExperimentConfig& cfg, std::uint64_t seed) {
    const UnitaryMatrix u = build_interferometer(cfg.interferometer);
    const SourceSet sources = build_sources(cfg);
    const OutputDistribution dist = output_distribution(u, sources, cfg.averaged_mode);
    const auto samples = sample_ports(dist, seed, cfg.count);
    json result{{"mode", "sample_ports"},
                {"averaged_mode", to_string(cfg.averaged_mode)},
                {"count", cfg.count},
                {"seed", seed}};
    RunArtifacts artifacts;
    artifacts.files.emplace_back("result.json", result.dump(2) + "\n");
    artifacts.files.emplace_back("samples.csv", port_samples_to_csv(samples));
    return artifacts;
}

TimeGrid auto_grid(const SourceSet& sources, const PropagationConfig& prop) {
    TimeGrid grid;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& profile : sources.profiles) {
        const double center = profile.emission_time + prop.delta_t;
        lo = std::min(lo, center - 8.5 * profile.temporal_sigma());
        hi = std::max(hi, center + 8.5 * profile.temporal_sigma());
    }
    grid.t_min = lo;
    grid.t_max = hi;
    grid.num_points = 256;
    return grid;
}

RunArtifacts run_sample_mbcs(const ExperimentConfig& cfg, std::uint64_t seed) {
    const UnitaryMatrix u = build_interferometer(cfg.interferometer);
    const SourceSet sources = build_sources(cfg);
    const PropagationConfig prop{cfg.propagation_delay};
    const TimeGrid grid = cfg.grid_given ? cfg.grid : auto_grid(sources, prop);
    MbcsSampleResult sampled = sample_mbcs(u, sources, grid, seed, cfg.count, prop);
    json result{{"mode", "sample_mbcs"},
                {"count", cfg.count},
                {"seed", seed},
                {"grid", {{"t_min", grid.t_min}, {"t_max", grid.t_max},
                          {"num_points", grid.num_points}}},
                {"warnings", sampled.warnings}};
    RunArtifacts artifacts;
    artifacts.warnings = sampled.warnings;
    artifacts.files.emplace_back("result.json", result.dump(2) + "\n");
    artifacts.files.emplace_back("samples.csv", records_to_csv(sampled.records));
    return artifacts;
}

RunArtifacts run_figure(const ExperimentConfig& cfg) {
    const auto& fig = cfg.figure;
    RunArtifacts artifacts;
    std::string csv;
    if (fig.name == "hom_dip") {
        const UnitaryMatrix u = beam_splitter_50_50();
        SpectralProfile first = reference_profile(), second = reference_profile();
        std::vector<int> ports{1, 2};
        if (cfg.sources_given) {
            ports = cfg.source_ports;
            first = cfg.source_profiles[0];
            second = cfg.source_profiles[1];
        }
        const PortSample coincidence{{1, 2}};
        csv += "tau,p_coincidence\n";
        for (double tau : linspace(-fig.tau_max / first.bandwidth, fig.tau_max / first.bandwidth,
                                   fig.points)) {
            second.emission_time = first.emission_time + tau;
            const SourceSet sources{ports, {first, second}};
            append_csv_line(csv, {tau, clamp_probability(p_av(u, coincidence, sources))});
        }
    } else {
        const bool is_a = fig.name == "overlap_a";
        csv += is_a ? "dt0,domega0,a\n" : "dt0,domega0,abs_g\n";
        const SpectralProfile first = reference_profile();
        for (double dt0 : linspace(fig.dt0_min, fig.dt0_max, fig.dt0_points)) {
            for (double domega : linspace(fig.domega_min, fig.domega_max, fig.domega_points)) {
                SpectralProfile second = first;
                second.emission_time = first.emission_time + dt0;
                second.central_frequency = first.central_frequency + domega;
                const double value = is_a ? overlap_modulus_a(first, second)
                                          : std::abs(distinguishability_g(first, second));
                append_csv_line(csv, {dt0, domega, value});
            }
        }
    }
    json result{{"mode", "figure"}, {"figure", fig.name}};
    artifacts.files.emplace_back("result.json", result.dump(2) + "\n");
    artifacts.files.emplace_back("sweep.csv", std::move(csv));
    return artifacts;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << content;
        if (!out) throw IoError("short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
}

}  // namespace

RunArtifacts execute_experiment(const ExperimentConfig& cfg, std::uint64_t seed) {
    switch (cfg.mode) {
        case RunMode::resolved_rate: return run_resolved_rate(cfg);
        case RunMode::averaged: return run_averaged(cfg);
        case RunMode::distribution: return run_distribution(cfg);
        case RunMode::sample_ports: return run_sample_ports(cfg, seed);
        case RunMode::sample_mbcs: return run_sample_mbcs(cfg, seed);
        case RunMode::figure: return run_figure(cfg);
    }
    throw ValidationError("config.mode: unknown mode");
}

int run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
    const std::uint64_t seed = opts.seed_override.value_or(cfg.seed);
    const auto issues = validate_experiment(cfg);
    bool failed = false;
    for (const auto& issue : issues) {
        if (!issue.warning) failed = true;
        if (!issue.warning || !opts.quiet) {
            std::cerr << (issue.warning ? "warning: " : "error: ") << issue.path << ": "
                      << issue.message << "\n";
        }
    }
    if (failed) return exit_validation;

    RunArtifacts artifacts;
    try {
        artifacts = execute_experiment(cfg, seed);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const NumericalError& e) {
        std::cerr << "error: numerical consistency: " << e.what() << "\n";
        return exit_numerical;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    }

    char hash_hex[17];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a_hash(cfg.raw)));
    json manifest{{"config_hash", hash_hex},
                  {"mode", to_string(cfg.mode)},
                  {"seed", seed},
                  {"version", "0.1.0"},
                  {"timestamp", iso_timestamp()}};
    artifacts.files.emplace_back("manifest.json", manifest.dump(2) + "\n");

    try {
        std::filesystem::create_directories(opts.out_dir);
        for (const auto& [name, content] : artifacts.files) {
            write_file_atomic(std::filesystem::path(opts.out_dir) / name, content);
        }
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    }

    if (!opts.quiet) {
        for (const auto& w : artifacts.warnings) std::cerr << "warning: " << w << "\n";
        std::cout << "wrote " << artifacts.files.size() << " file(s) to " << opts.out_dir
                  << " (config " << hash_hex << ", seed " << seed << ")\n";
    }
    return exit_ok;
}

}  // namespace mbcs
