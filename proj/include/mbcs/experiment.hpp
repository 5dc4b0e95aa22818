#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mbcs/averaged.hpp"
#include "mbcs/sampler.hpp"
#include "mbcs/types.hpp"

namespace mbcs {

struct InterferometerSpec {
    enum class Kind { haar, beam_splitter, file };
    Kind kind = Kind::beam_splitter;
    int m = 2;
    std::uint64_t seed = 0;
    std::string path;
};

enum class RunMode { resolved_rate, averaged, distribution, sample_ports, sample_mbcs, figure };

std::string to_string(RunMode mode);

struct DetectionSpec {
    std::vector<int> ports;
    std::vector<double> times;
    std::vector<PolarizationVector> polarizations;
    bool cross_check = false;  // also evaluate the double-sum route
};

struct FigureParams {
    std::string name;  // hom_dip | overlap_a | overlap_g
    int points = 101;
    double tau_max = 5.0;
    double dt0_min = -3.0, dt0_max = 3.0;
    int dt0_points = 61;
    double domega_min = 0.0, domega_max = 6.0;
    int domega_points = 61;
};

struct ExperimentConfig {
    RunMode mode = RunMode::averaged;
    std::uint64_t seed = 0;
    InterferometerSpec interferometer;
    std::vector<int> source_ports;
    std::vector<SpectralProfile> source_profiles;
    bool sources_given = false;
    double propagation_delay = 0.0;

    DetectionSpec detection;                             // resolved_rate
    std::vector<int> detection_ports;                    // averaged
    AveragedMode averaged_mode = AveragedMode::general;  // averaged / distribution / sample_ports
    std::size_t count = 10000;                           // samplers
    TimeGrid grid;                                       // sample_mbcs
    bool grid_given = false;
    FigureParams figure;

    std::string raw;  // config document text, for the manifest hash
};

// Strict parse: unknown keys, wrong types and unknown enum values are
// rejected with a field-path diagnostic.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

struct ValidationIssue {
    bool warning = false;
    std::string path;
    std::string message;
};

// Full precondition sweep without execution; returns every violation (and
// warnings, which do not fail validation).
std::vector<ValidationIssue> validate_experiment(const ExperimentConfig& cfg);

// Output files as (name, content) pairs: result.json plus samples.csv or
// sweep.csv as applicable. Deterministic for a fixed config and seed.
struct RunArtifacts {
    std::vector<std::pair<std::string, std::string>> files;
    std::vector<std::string> warnings;
};

RunArtifacts execute_experiment(const ExperimentConfig& cfg, std::uint64_t seed);

struct RunOptions {
    std::string out_dir = "out";
    bool quiet = false;
    std::optional<std::uint64_t> seed_override;
};

// Exit codes: 0 success, 2 validation failure, 3 numerical-consistency
// error, 4 I/O error.
inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 2;
inline constexpr int exit_numerical = 3;
inline constexpr int exit_io = 4;

// Validates, executes and persists one experiment: artifacts plus
// manifest.json are written atomically to opts.out_dir (no partial files on
// failure). Diagnostics go to stderr; returns an exit code.
int run_experiment(const ExperimentConfig& cfg, const RunOptions& opts);

std::uint64_t fnv1a_hash(const std::string& bytes);

}  // namespace mbcs
