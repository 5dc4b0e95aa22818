#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "mbcs/experiment.hpp"
#include "mbcs/io.hpp"

using namespace mbcs;
namespace fs = std::filesystem;

namespace {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable parse_csv(const std::string& text) {
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        std::istringstream cells(line);
        std::string cell;
        if (first) {
            while (std::getline(cells, cell, ',')) table.header.push_back(cell);
            first = false;
            continue;
        }
        std::vector<double> row;
        while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
        table.rows.push_back(std::move(row));
    }
    return table;
}

const std::string& artifact(const RunArtifacts& artifacts, const std::string& name) {
    for (const auto& [file, content] : artifacts.files) {
        if (file == name) return content;
    }
    throw std::runtime_error("artifact not produced: " + name);
}

std::string two_photon_config(const std::string& mode_lines) {
    return R"({
      "mode": )" + mode_lines +
           R"(,
      "interferometer": {"type": "beam_splitter"},
      "sources": [
        {"port": 1, "bandwidth": 1.0, "central_frequency": 60.0, "emission_time": 0.0, "polarization": "e1"},
        {"port": 2, "bandwidth": 1.0, "central_frequency": 60.0, "emission_time": 0.0, "polarization": "e1"}
      ]
    })";
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("mbcs_" + tag + "_" + std::to_string(rand()));
    fs::remove_all(dir);
    return dir;
}

int count_errors(const std::vector<ValidationIssue>& issues) {
    int n = 0;
    for (const auto& issue : issues) {
        if (!issue.warning) ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("config parsing is strict") {
    const auto cfg = parse_experiment_config(two_photon_config("\"distribution\""));
    CHECK(cfg.mode == RunMode::distribution);
    CHECK(cfg.interferometer.kind == InterferometerSpec::Kind::beam_splitter);
    CHECK(cfg.source_ports == std::vector<int>{1, 2});
    CHECK(cfg.source_profiles[0].central_frequency == 60.0);

    CHECK_THROWS_WITH_AS(parse_experiment_config(R"({"mode": "distribution"})"),
                         doctest::Contains("interferometer"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_experiment_config(R"({"mode": "warp"})"),
                         doctest::Contains("config.mode"), ValidationError);
    CHECK_THROWS_AS(parse_experiment_config("not json at all"), ValidationError);

    // Unknown keys carry their field path.
    std::string extra = two_photon_config("\"distribution\"");
    extra.insert(extra.size() - 2, R"(, "grid": {"t_min": 0, "t_max": 1})");
    CHECK_THROWS_WITH_AS(parse_experiment_config(extra), doctest::Contains("config.grid"),
                         ValidationError);

    std::string bad_pol = two_photon_config("\"distribution\"");
    bad_pol.replace(bad_pol.find("\"e1\""), 4, "\"e3\"");
    CHECK_THROWS_WITH_AS(parse_experiment_config(bad_pol), doctest::Contains("polarization"),
                         ValidationError);
}

TEST_CASE("validation sweep reports every violation") {
    auto cfg = parse_experiment_config(two_photon_config("\"distribution\""));
    CHECK(count_errors(validate_experiment(cfg)) == 0);

    // Three sources into a 2-port splitter, one of them out of range and one
    // with a bad bandwidth: all reported at once.
    auto broken = cfg;
    broken.source_ports = {1, 2, 5};
    broken.source_profiles.resize(3, broken.source_profiles[0]);
    broken.source_profiles[1].bandwidth = -1.0;
    const auto issues = validate_experiment(broken);
    CHECK(count_errors(issues) >= 3);

    // Low central frequency only warns.
    auto narrowband = cfg;
    narrowband.source_profiles[0].central_frequency = 3.0;
    const auto warned = validate_experiment(narrowband);
    CHECK(count_errors(warned) == 0);
    REQUIRE(warned.size() == 1);
    CHECK(warned[0].warning);
    CHECK(warned[0].path == "sources[0].central_frequency");
}

TEST_CASE("validation covers mode-specific preconditions") {
    // Averaged mode with a detection port out of range.
    auto averaged = parse_experiment_config(R"({
      "mode": "averaged",
      "interferometer": {"type": "haar", "m": 3, "seed": 1},
      "sources": [
        {"port": 1, "bandwidth": 1.0, "central_frequency": 60.0},
        {"port": 2, "bandwidth": 1.0, "central_frequency": 60.0}
      ],
      "detection_ports": [1, 7]
    })");
    const auto issues = validate_experiment(averaged);
    REQUIRE(count_errors(issues) == 1);
    CHECK(issues[0].path == "detection_ports[1]");

    // Sampler grid that misses an envelope names the source.
    auto sampler = parse_experiment_config(R"({
      "mode": "sample_mbcs",
      "count": 10,
      "interferometer": {"type": "beam_splitter"},
      "sources": [
        {"port": 1, "bandwidth": 1.0, "central_frequency": 60.0},
        {"port": 2, "bandwidth": 1.0, "central_frequency": 60.0, "emission_time": 6.0}
      ],
      "grid": {"t_min": -4.5, "t_max": 4.5, "num_points": 128}
    })");
    const auto grid_issues = validate_experiment(sampler);
    REQUIRE(count_errors(grid_issues) == 1);
    CHECK(grid_issues[0].message.find("source 1") != std::string::npos);
}

TEST_CASE("hom_dip figure sweep") {
    const auto cfg = parse_experiment_config(R"({
      "mode": "figure",
      "figure": {"name": "hom_dip", "points": 101, "tau_max": 5.0}
    })");
    CHECK(count_errors(validate_experiment(cfg)) == 0);
    const auto artifacts = execute_experiment(cfg, 0);
    const auto sweep = parse_csv(artifact(artifacts, "sweep.csv"));
    CHECK(sweep.header == std::vector<std::string>{"tau", "p_coincidence"});
    REQUIRE(sweep.rows.size() == 101);
    CHECK(sweep.rows.front()[0] == -5.0);
    CHECK(sweep.rows.front()[1] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(sweep.rows.back()[1] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(sweep.rows[50][0] == 0.0);
    CHECK(sweep.rows[50][1] <= 1e-12);
    for (const auto& row : sweep.rows) {
        CHECK(row[1] >= 0.0);
        CHECK(row[1] <= 0.5 + 1e-9);
    }
}

TEST_CASE("overlap figure sweeps") {
    const auto a_cfg = parse_experiment_config(R"({
      "mode": "figure",
      "figure": {"name": "overlap_a", "dt0_points": 7, "domega_points": 5}
    })");
    const auto a_sweep = parse_csv(artifact(execute_experiment(a_cfg, 0), "sweep.csv"));
    REQUIRE(a_sweep.rows.size() == 35);
    // Constant along the color axis; equal to 1 at zero time offset.
    for (std::size_t k = 0; k < a_sweep.rows.size(); k += 5) {
        for (int j = 1; j < 5; ++j) {
            CHECK(a_sweep.rows[k + j][2] == doctest::Approx(a_sweep.rows[k][2]).epsilon(1e-12));
        }
        if (a_sweep.rows[k][0] == 0.0) CHECK(a_sweep.rows[k][2] == 1.0);
    }

    const auto g_cfg = parse_experiment_config(R"({
      "mode": "figure",
      "figure": {"name": "overlap_g", "dt0_points": 7, "domega_points": 5}
    })");
    const auto g_sweep = parse_csv(artifact(execute_experiment(g_cfg, 0), "sweep.csv"));
    REQUIRE(g_sweep.rows.size() == 35);
    // |g| decays along both axes.
    for (std::size_t k = 0; k < g_sweep.rows.size(); ++k) {
        const auto& row = g_sweep.rows[k];
        const double dt0 = row[0], domega = row[1];
        const double expected = std::sqrt(2.0 * 1.0 / 2.0) *
                                std::exp(-domega * domega / 8.0) * std::exp(-dt0 * dt0 / 2.0);
        CHECK(row[2] == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("distribution run emits the documented JSON schema") {
    const auto cfg = parse_experiment_config(two_photon_config("\"distribution\""));
    const auto artifacts = execute_experiment(cfg, 0);
    const auto doc = nlohmann::json::parse(artifact(artifacts, "result.json"));
    CHECK(doc["m"] == 2);
    CHECK(doc["n"] == 2);
    CHECK(doc["mode"] == "general");
    REQUIRE(doc["entries"].size() == 3);
    CHECK(doc["entries"][0]["ports"] == nlohmann::json::array({1, 1}));
    CHECK(doc["entries"][0]["p"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(doc["entries"][1]["p"].get<double>() <= 1e-12);
    CHECK(doc["entries"][2]["p"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));
    double total = 0.0;
    for (const auto& entry : doc["entries"]) total += entry["p"].get<double>();
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("resolved rate run with double-sum cross-check") {
    const auto cfg = parse_experiment_config(R"({
      "mode": "resolved_rate",
      "interferometer": {"type": "haar", "m": 4, "seed": 3},
      "sources": [
        {"port": 1, "bandwidth": 1.0, "central_frequency": 60.0},
        {"port": 3, "bandwidth": 1.2, "central_frequency": 61.0, "emission_time": 0.4}
      ],
      "detection": {"ports": [2, 4], "times": [0.1, 0.5],
                    "polarizations": ["e1", [0.6, 0.8]], "cross_check": true}
    })");
    CHECK(count_errors(validate_experiment(cfg)) == 0);
    const auto doc = nlohmann::json::parse(artifact(execute_experiment(cfg, 0), "result.json"));
    const double g = doc["rate"].get<double>();
    CHECK(g > 0.0);
    CHECK(doc["rate_double_sum"].get<double>() == doctest::Approx(g).epsilon(1e-10));
}

TEST_CASE("executions are deterministic for a fixed config and seed") {
    const auto cfg = parse_experiment_config(R"({
      "mode": "sample_ports",
      "count": 2000,
      "seed": 5,
      "interferometer": {"type": "haar", "m": 4, "seed": 8},
      "sources": [
        {"port": 1, "bandwidth": 1.0, "central_frequency": 60.0},
        {"port": 2, "bandwidth": 1.0, "central_frequency": 62.0, "emission_time": 0.5}
      ]
    })");
    const auto first = execute_experiment(cfg, cfg.seed);
    const auto second = execute_experiment(cfg, cfg.seed);
    REQUIRE(first.files.size() == second.files.size());
    for (std::size_t k = 0; k < first.files.size(); ++k) {
        CHECK(first.files[k].first == second.files[k].first);
        CHECK(first.files[k].second == second.files[k].second);
    }
    // A different seed changes the sample stream.
    const auto reseeded = execute_experiment(cfg, 6);
    CHECK(artifact(reseeded, "samples.csv") != artifact(first, "samples.csv"));
}

TEST_CASE("run_experiment writes artifacts atomically with a manifest") {
    const auto cfg = parse_experiment_config(two_photon_config("\"distribution\""));
    const auto dir_a = fresh_dir("run_a");
    const auto dir_b = fresh_dir("run_b");
    RunOptions opts;
    opts.quiet = true;
    opts.out_dir = dir_a.string();
    REQUIRE(run_experiment(cfg, opts) == exit_ok);
    opts.out_dir = dir_b.string();
    REQUIRE(run_experiment(cfg, opts) == exit_ok);

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    CHECK(slurp(dir_a / "result.json") == slurp(dir_b / "result.json"));

    auto manifest_a = nlohmann::json::parse(slurp(dir_a / "manifest.json"));
    auto manifest_b = nlohmann::json::parse(slurp(dir_b / "manifest.json"));
    manifest_a.erase("timestamp");
    manifest_b.erase("timestamp");
    CHECK(manifest_a == manifest_b);
    CHECK(manifest_a["mode"] == "distribution");
    CHECK(manifest_a["config_hash"].get<std::string>().size() == 16);

    // No stray temp files.
    for (const auto& entry : fs::directory_iterator(dir_a)) {
        CHECK(entry.path().extension() != ".tmp");
    }
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("run_experiment exit codes") {
    // Validation failure: nothing is written.
    auto bad = parse_experiment_config(two_photon_config("\"distribution\""));
    bad.source_ports = {1, 9};
    const auto dir = fresh_dir("run_fail");
    RunOptions opts;
    opts.quiet = true;
    opts.out_dir = dir.string();
    CHECK(run_experiment(bad, opts) == exit_validation);
    CHECK(!fs::exists(dir));

    // Output directory path occupied by a file: I/O error.
    const auto cfg = parse_experiment_config(two_photon_config("\"distribution\""));
    const auto blocker = fresh_dir("blocker");
    std::ofstream(blocker.string()) << "x";
    opts.out_dir = blocker.string();
    CHECK(run_experiment(cfg, opts) == exit_io);
    fs::remove(blocker);

    CHECK_THROWS_AS(load_experiment_config("/nonexistent/config.json"), IoError);
}
