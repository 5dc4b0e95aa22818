#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mbcs/averaged.hpp"
#include "mbcs/types.hpp"

namespace mbcs {

// Uniform grid discretizing the detection-time axis. Must cover every photon
// envelope at ±coverage_sigmas temporal widths.
struct TimeGrid {
    double t_min = 0.0;
    double t_max = 0.0;
    int num_points = 256;

    double step() const { return (t_max - t_min) / (num_points - 1); }
    double node(int k) const { return t_min + k * step(); }

    // Throws ValidationError naming the first offending source index.
    void validate(const SourceSet& sources, const PropagationConfig& cfg = {},
                  double coverage_sigmas = 8.0) const;
};

// One drawn detection outcome. Polarization labels index the fixed basis:
// 0 -> e1, 1 -> e2. weight is the normalized conditional density
// G/(P_av·∏n_d!) at the drawn point.
struct SampleRecord {
    PortSample ports;
    std::vector<double> times;
    std::vector<int> polarizations;
    double weight = 0.0;
};

// I.i.d. port samples by inverse-CDF over the distribution's canonical
// ordering; deterministic per seed. Rejects distributions whose total
// deviates from 1 by more than 1e-6.
std::vector<PortSample> sample_ports(const OutputDistribution& dist, std::uint64_t seed,
                                     std::size_t count);

struct MbcsSampleResult {
    std::vector<SampleRecord> records;
    std::vector<std::string> warnings;
};

// Two-stage exact sampler for resolved outcomes: the port multiset is drawn
// from the averaged distribution, then times and polarizations from the
// conditional density tabulated on grid^N × {e1,e2}^N (inverse-CDF on the
// flattened table). Guarded at N <= 3. Conditional tables are cached per
// distinct port sample; their numeric mass is checked against the analytic
// P_av (warning above 1e-4 relative mismatch, error above 1e-2).
MbcsSampleResult sample_mbcs(const UnitaryMatrix& u, const SourceSet& sources,
                             const TimeGrid& grid, std::uint64_t seed, std::size_t count,
                             const PropagationConfig& cfg = {}, Exec exec = Exec::parallel);

}  // namespace mbcs
