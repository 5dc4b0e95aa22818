// Times the OpenMP kernels against their serial reference paths and reports
// the largest result difference, which must sit at rounding level.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mbcs/averaged.hpp"
#include "mbcs/interferometer.hpp"
#include "mbcs/permanent.hpp"
#include "mbcs/sampler.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <typename Fn>
double time_ms(Fn&& fn, int repeats) {
    const auto t0 = Clock::now();
    for (int r = 0; r < repeats; ++r) fn();
    const auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / repeats;
}

void report(const std::string& name, double serial_ms, double parallel_ms, double diff) {
    std::printf("%-34s %10.2f ms %10.2f ms %8.2fx   max|diff| %.3g\n", name.c_str(), serial_ms,
                parallel_ms, serial_ms / parallel_ms, diff);
}

Eigen::MatrixXcd random_matrix(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Eigen::MatrixXcd a(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) a(r, c) = mbcs::Complex(uni(rng), uni(rng));
    }
    return a;
}

mbcs::SourceSet mixed_sources(int n) {
    mbcs::SourceSet sources;
    for (int i = 0; i < n; ++i) {
        sources.ports.push_back(i + 1);
        mbcs::SpectralProfile profile;
        profile.bandwidth = 1.0 + 0.1 * i;
        profile.central_frequency = 60.0 + 0.5 * i;
        profile.emission_time = 0.3 * i;
        sources.profiles.push_back(profile);
    }
    return sources;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mbcs kernel benchmark: serial reference vs OpenMP"};
    int perm_n = 22;
    int repeats = 3;
    app.add_option("--perm-n", perm_n, "Ryser benchmark matrix size (default 22)")
        ->check(CLI::Range(4, 28));
    app.add_option("--repeats", repeats, "Timing repeats (default 3)")->check(CLI::Range(1, 100));
    CLI11_PARSE(app, argc, argv);

    std::printf("%-34s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

    {
        const auto a = random_matrix(perm_n, 11);
        mbcs::Complex serial_v, parallel_v;
        const double ts = time_ms([&] { serial_v = mbcs::perm_ryser(a, mbcs::Exec::serial); },
                                  repeats);
        const double tp = time_ms([&] { parallel_v = mbcs::perm_ryser(a, mbcs::Exec::parallel); },
                                  repeats);
        report("perm_ryser n=" + std::to_string(perm_n), ts, tp, std::abs(serial_v - parallel_v));
    }

    {
        const auto u = mbcs::haar_random(8, 5);
        const auto sources = mixed_sources(7);
        const mbcs::PortSample detectors{{1, 2, 3, 4, 5, 6, 7}};
        double serial_v = 0, parallel_v = 0;
        const double ts =
            time_ms([&] { serial_v = mbcs::p_av(u, detectors, sources, mbcs::Exec::serial); },
                    repeats);
        const double tp =
            time_ms([&] { parallel_v = mbcs::p_av(u, detectors, sources, mbcs::Exec::parallel); },
                    repeats);
        report("p_av N=7", ts, tp, std::abs(serial_v - parallel_v));
    }

    {
        const auto u = mbcs::haar_random(6, 17);
        const auto sources = mixed_sources(3);
        double diff = 0;
        mbcs::OutputDistribution ds, dp;
        const double ts = time_ms(
            [&] { ds = mbcs::output_distribution(u, sources, mbcs::AveragedMode::general,
                                                 mbcs::Exec::serial); },
            repeats);
        const double tp = time_ms(
            [&] { dp = mbcs::output_distribution(u, sources, mbcs::AveragedMode::general,
                                                 mbcs::Exec::parallel); },
            repeats);
        for (std::size_t k = 0; k < ds.entries.size(); ++k) {
            diff = std::max(diff, std::abs(ds.entries[k].second - dp.entries[k].second));
        }
        report("output_distribution M=6 N=3", ts, tp, diff);
    }

    {
        const auto u = mbcs::haar_random(4, 23);
        const auto sources = mixed_sources(2);
        const mbcs::PortSample detectors{{1, 3}};
        double serial_v = 0, parallel_v = 0;
        const double ts = time_ms(
            [&] {
                serial_v = mbcs::p_av_numeric(u, detectors, sources, {},
                                              {mbcs::PolarizationVector::e1(),
                                               mbcs::PolarizationVector::e2()},
                                              mbcs::Exec::serial);
            },
            repeats);
        const double tp = time_ms(
            [&] {
                parallel_v = mbcs::p_av_numeric(u, detectors, sources, {},
                                                {mbcs::PolarizationVector::e1(),
                                                 mbcs::PolarizationVector::e2()},
                                                mbcs::Exec::parallel);
            },
            repeats);
        report("p_av_numeric N=2 (96 nodes)", ts, tp, std::abs(serial_v - parallel_v));
    }

    return 0;
}
