#include "mbcs/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "mbcs/permanent.hpp"
#include "mbcs/spectra.hpp"

namespace mbcs {

namespace {

// Conditional table over grid^N × {e1,e2}^N for one port sample, stored as an
// inclusive prefix sum for inverse-CDF draws. Flat index layout:
// pol_word * num_points^N + Σ_j k_j·num_points^j (k_0 fastest).
struct ConditionalTable {
    std::vector<double> cumulative;
    double total = 0.0;
    double density_norm = 0.0;  // P_av · ∏n_d!
};

ConditionalTable build_table(const UnitaryMatrix& u, const SourceSet& sources,
                             const PortSample& detectors, const TimeGrid& grid, double p_av_value,
                             const PropagationConfig& cfg, Exec exec,
                             std::vector<std::string>& warnings) {
    const int n = detectors.size();
    const std::size_t num_points = static_cast<std::size_t>(grid.num_points);
    std::size_t grid_pow = 1;
    for (int j = 0; j < n; ++j) grid_pow *= num_points;
    const std::size_t table_size = grid_pow << n;

    const Eigen::MatrixXcd sub = submatrix(u, detectors, sources);
    // proj[b][i*num_points + k] = <e_b, χ_i(t_k)>
    std::array<std::vector<Complex>, 2> proj;
    const std::array<PolarizationVector, 2> basis{PolarizationVector::e1(),
                                                  PolarizationVector::e2()};
    for (int b = 0; b < 2; ++b) {
        proj[b].resize(static_cast<std::size_t>(n) * num_points);
        for (int i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < num_points; ++k) {
                proj[b][i * num_points + k] = project(
                    basis[b],
                    temporal_amplitude(sources.profiles[i], grid.node(static_cast<int>(k)),
                                       cfg.delta_t));
            }
        }
    }

    ConditionalTable table;
    table.cumulative.resize(table_size);
    auto& weights = table.cumulative;  // filled with G values, then prefix-summed
    const std::size_t chunks = std::min<std::size_t>(64, table_size);
    map_chunks<int>(table_size, chunks, exec, [&](std::size_t begin, std::size_t end) {
        Eigen::MatrixXcd t(n, n);
        for (std::size_t f = begin; f < end; ++f) {
            const std::size_t pol_word = f / grid_pow;
            std::size_t tidx = f % grid_pow;
            for (int j = 0; j < n; ++j) {
                const std::size_t k = tidx % num_points;
                tidx /= num_points;
                const int b = static_cast<int>((pol_word >> j) & 1);
                for (int i = 0; i < n; ++i) {
                    t(j, i) = sub(j, i) * proj[b][i * num_points + k];
                }
            }
            weights[f] = std::norm(perm_ryser(t, Exec::serial));
        }
        return 0;
    });

    CompensatedSum acc;
    for (double& w : weights) {
        acc.add(w);
        w = acc.value();
    }
    table.total = acc.value();
    table.density_norm = p_av_value * detectors.bunching_factor();

    const double step = grid.step();
    double cell = 1.0;
    for (int j = 0; j < n; ++j) cell *= step;
    const double mismatch = std::abs(table.total * cell / table.density_norm - 1.0);
    if (mismatch > 1e-2) {
        throw NumericalError("conditional table mass deviates from analytic probability by " +
                             std::to_string(mismatch));
    }
    if (mismatch > 1e-4) {
        warnings.push_back("conditional table mass deviates from analytic probability by " +
                           std::to_string(mismatch));
    }
    return table;
}

}  // namespace

void TimeGrid::validate(const SourceSet& sources, const PropagationConfig& cfg,
                        double coverage_sigmas) const {
    if (!(t_min < t_max)) throw ValidationError("time grid needs t_min < t_max");
    if (num_points < 2) throw ValidationError("time grid needs at least 2 points");
    for (int i = 0; i < sources.size(); ++i) {
        const auto& profile = sources.profiles[i];
        const double center = profile.emission_time + cfg.delta_t;
        const double reach = coverage_sigmas * profile.temporal_sigma();
        if (t_min > center - reach || t_max < center + reach) {
            throw ValidationError("time grid does not cover the envelope of source " +
                                  std::to_string(i) + " at +-" +
                                  std::to_string(coverage_sigmas) + " sigma");
        }
    }
}

std::vector<PortSample> sample_ports(const OutputDistribution& dist, std::uint64_t seed,
                                     std::size_t count) {
    if (dist.entries.empty()) throw ValidationError("cannot sample from an empty distribution");
    std::vector<double> cumulative(dist.entries.size());
    CompensatedSum acc;
    for (std::size_t k = 0; k < dist.entries.size(); ++k) {
        acc.add(dist.entries[k].second);
        cumulative[k] = acc.value();
    }
    if (std::abs(acc.value() - 1.0) > 1e-6) {
        throw ValidationError("distribution is not normalized (total " +
                              std::to_string(acc.value()) + ")");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<PortSample> out;
    out.reserve(count);
    const double total = cumulative.back();
    for (std::size_t k = 0; k < count; ++k) {
        const double u = uniform(rng) * total;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const std::size_t idx =
            std::min<std::size_t>(it - cumulative.begin(), dist.entries.size() - 1);
        out.push_back(dist.entries[idx].first);
    }
    return out;
}

MbcsSampleResult sample_mbcs(const UnitaryMatrix& u, const SourceSet& sources,
                             const TimeGrid& grid, std::uint64_t seed, std::size_t count,
                             const PropagationConfig& cfg, Exec exec) {
    const int n = sources.size();
    if (n > limits::max_sampler_photons) {
        throw SizeError("sample_mbcs limited to N <= " +
                        std::to_string(limits::max_sampler_photons));
    }
    sources.validate(u.dimension());
    grid.validate(sources, cfg);
    std::size_t grid_pow = 1;
    for (int j = 0; j < n; ++j) grid_pow *= static_cast<std::size_t>(grid.num_points);
    if ((grid_pow << n) > limits::max_conditional_table_entries) {
        throw SizeError("conditional table would exceed " +
                        std::to_string(limits::max_conditional_table_entries) +
                        " entries; reduce num_points");
    }

    MbcsSampleResult result;
    const OutputDistribution dist = output_distribution(u, sources, AveragedMode::general, exec);
    std::vector<double> stage1(dist.entries.size());
    CompensatedSum acc;
    for (std::size_t k = 0; k < dist.entries.size(); ++k) {
        acc.add(dist.entries[k].second);
        stage1[k] = acc.value();
    }
    const double stage1_total = stage1.back();

    std::map<PortSample, ConditionalTable> tables;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    result.records.reserve(count);
    for (std::size_t r = 0; r < count; ++r) {
        const double u1 = uniform(rng) * stage1_total;
        const auto it = std::upper_bound(stage1.begin(), stage1.end(), u1);
        const std::size_t d_idx = std::min<std::size_t>(it - stage1.begin(), stage1.size() - 1);
        const auto& [detectors, p_av_value] = dist.entries[d_idx];

        auto table_it = tables.find(detectors);
        if (table_it == tables.end()) {
            table_it = tables
                           .emplace(detectors, build_table(u, sources, detectors, grid,
                                                           p_av_value, cfg, exec, result.warnings))
                           .first;
        }
        const ConditionalTable& table = table_it->second;

        const double u2 = uniform(rng) * table.total;
        const auto cit =
            std::upper_bound(table.cumulative.begin(), table.cumulative.end(), u2);
        std::size_t f = std::min<std::size_t>(cit - table.cumulative.begin(),
                                              table.cumulative.size() - 1);

        SampleRecord record;
        record.ports = detectors;
        record.times.resize(n);
        record.polarizations.resize(n);
        const std::size_t pol_word = f / grid_pow;
        std::size_t tidx = f % grid_pow;
        for (int j = 0; j < n; ++j) {
            record.times[j] = grid.node(static_cast<int>(tidx % grid.num_points));
            tidx /= static_cast<std::size_t>(grid.num_points);
            record.polarizations[j] = static_cast<int>((pol_word >> j) & 1);
        }
        const double mass = table.cumulative[f] - (f > 0 ? table.cumulative[f - 1] : 0.0);
        record.weight = mass / table.density_norm;
        result.records.push_back(std::move(record));
    }
    return result;
}

}  // namespace mbcs
