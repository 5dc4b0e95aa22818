// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Tolerances and runtime limits are fixed here; the process exits nonzero if
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "mbcs/averaged.hpp"
#include "mbcs/interferometer.hpp"
#include "mbcs/io.hpp"
#include "mbcs/permanent.hpp"
#include "mbcs/rates.hpp"
#include "mbcs/sampler.hpp"
#include "mbcs/spectra.hpp"

using namespace mbcs;

namespace {

struct Check {
    std::vector<std::string> failures;

    void require(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
    void within(double got, double want, double tol, const std::string& what) {
        if (!(std::abs(got - want) <= tol)) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%s: got %.3e, want %.3e +- %.1e", what.c_str(), got,
                          want, tol);
            failures.push_back(buf);
        }
    }
};

SpectralProfile photon(double bandwidth, double color, double emission_time,
                       PolarizationVector pol = PolarizationVector::e1()) {
    SpectralProfile p;
    p.bandwidth = bandwidth;
    p.central_frequency = color;
    p.emission_time = emission_time;
    p.polarization = pol;
    return p;
}

SpectralProfile random_mixed_profile(std::mt19937_64& rng, double color_spread = 3.0) {
    std::uniform_real_distribution<double> bw(0.8, 1.25);
    std::uniform_real_distribution<double> t0(-0.5, 0.5);
    std::uniform_real_distribution<double> dw(0.0, color_spread);
    std::uniform_real_distribution<double> angle(0.0, std::numbers::pi / 2);
    return photon(bw(rng), 60.0 + dw(rng), t0(rng), PolarizationVector::linear(angle(rng)));
}

double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), std::abs(got));
}

// 1. HOM dip at the figure-level values.
void hom_dip(Check& check) {
    const auto bs = beam_splitter_50_50();
    const SourceSet identical{{1, 2}, {photon(1, 60, 0), photon(1, 60, 0)}};
    check.require(p_av(bs, PortSample{{1, 2}}, identical) <= 1e-12, "coincidence not suppressed");
    check.within(p_av(bs, PortSample{{1, 1}}, identical), 0.5, 1e-10, "bunched (1,1)");
    check.within(p_av(bs, PortSample{{2, 2}}, identical), 0.5, 1e-10, "bunched (2,2)");

    const SourceSet apart{{1, 2}, {photon(1, 60, 0), photon(1, 60, 20)}};
    check.within(p_av(bs, PortSample{{1, 2}}, apart), 0.5, 1e-6, "distinguishable coincidence");
}

// 2. Identical-photon limit: the permutation sum collapses to one permanent.
void identical_limit(Check& check) {
    const auto u = haar_random(7, 20250301);
    const SourceSet sources{{1, 4, 6},
                            {photon(1, 60, 0), photon(1, 60, 0), photon(1, 60, 0)}};
    const auto samples = enumerate_port_samples(7, 3, true);
    check.require(samples.size() == 84, "C(9,3) enumeration size");
    double worst = 0.0;
    for (const auto& d : samples) {
        const double general = p_av(u, d, sources);
        const double direct =
            std::norm(perm_naive(submatrix(u, d, sources))) / d.bunching_factor();
        worst = std::max(worst, std::abs(general - direct));
    }
    check.require(worst <= 1e-10, "max |p_av - |perm|^2/prod n_d!| = " + std::to_string(worst));
}

// 3. Distinguishable limit: permanent of the entrywise |U|² matrix.
void distinguishable_limit(Check& check) {
    const auto u = haar_random(7, 20250302);
    const SourceSet sources{{1, 4, 6},
                            {photon(1, 60, 0), photon(1, 60, 20), photon(1, 60, 40)}};
    double worst = 0.0;
    for (const auto& d : enumerate_port_samples(7, 3, true)) {
        const double general = p_av(u, d, sources);
        const Eigen::MatrixXcd abs2 =
            submatrix(u, d, sources).cwiseAbs2().cast<Complex>();
        const double direct = perm_naive(abs2).real() / d.bunching_factor();
        worst = std::max(worst, std::abs(general - direct));
    }
    check.require(worst <= 1e-6, "max deviation from Eq.-34 form = " + std::to_string(worst));
}

// 4. Normalization and the quadrature oracle for the analytic average.
void normalization_and_quadrature(Check& check) {
    std::mt19937_64 rng(444);
    for (int kase = 0; kase < 20; ++kase) {
        const int m = 3 + kase % 2;
        const auto u = haar_random(m, 5000 + kase);
        const SourceSet sources{{1, 2}, {random_mixed_profile(rng), random_mixed_profile(rng)}};

        const auto dist = output_distribution(u, sources, AveragedMode::general);
        check.within(dist.total(), 1.0, 1e-9, "sum over multisets, case " + std::to_string(kase));

        PortSample d = dist.entries[rng() % dist.entries.size()].first;
        if (kase == 0) d = PortSample{{2, 2}};  // force one bunched sample
        const double analytic = p_av(u, d, sources);
        const double numeric = p_av_numeric(u, d, sources);
        check.within(numeric, analytic, 1e-6, "quadrature oracle, case " + std::to_string(kase));
    }
}

// 5. Permanent engines and their algebraic properties.
void permanent_engines(Check& check) {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    auto random_matrix = [&](int n) {
        Eigen::MatrixXcd a(n, n);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                double re, im;
                do {
                    re = uni(rng);
                    im = uni(rng);
                } while (re * re + im * im > 1.0);
                a(r, c) = Complex(re, im);
            }
        }
        return a;
    };

    double worst = 0.0;
    for (int n = 2; n <= 8; ++n) {
        for (int trial = 0; trial < 100; ++trial) {
            const auto a = random_matrix(n);
            const Complex naive = perm_naive(a);
            const Complex ryser = perm_ryser(a);
            worst = std::max(worst, std::abs(naive - ryser) / std::abs(naive));
        }
    }
    check.require(worst <= 1e-10, "ryser vs naive relative error " + std::to_string(worst));

    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 5);
        const auto a = random_matrix(n);
        const Complex reference = perm_ryser(a);

        std::vector<int> rows(n), cols(n);
        for (int i = 0; i < n; ++i) rows[i] = cols[i] = i;
        std::shuffle(rows.begin(), rows.end(), rng);
        std::shuffle(cols.begin(), cols.end(), rng);
        Eigen::MatrixXcd shuffled(n, n);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) shuffled(r, c) = a(rows[r], cols[c]);
        }
        check.require(std::abs(perm_ryser(shuffled) - reference) <= 1e-12 * std::abs(reference),
                      "permutation invariance, trial " + std::to_string(trial));

        const Complex scale(uni(rng), uni(rng));
        Eigen::MatrixXcd scaled = a;
        scaled.row(trial % n) *= scale;
        check.require(
            std::abs(perm_ryser(scaled) - scale * reference) <= 1e-12 * std::abs(scale * reference),
            "row scaling, trial " + std::to_string(trial));

        check.require(std::abs(perm_ryser(a.transpose()) - reference) <=
                          1e-12 * std::abs(reference),
                      "transpose invariance, trial " + std::to_string(trial));
    }
}

// 6. The explicit double sum over permutation pairs equals |perm T|².
void double_sum_equivalence(Check& check) {
    std::mt19937_64 rng(606060);
    std::uniform_real_distribution<double> time_dist(-1.5, 1.5);
    std::uniform_real_distribution<double> angle(0.0, std::numbers::pi / 2);
    int kept = 0;
    while (kept < 50) {
        const int n = 1 + static_cast<int>(rng() % 4);
        const int m = std::max(n, 2 + static_cast<int>(rng() % 5));
        const auto u = haar_random(m, rng());
        SourceSet sources;
        std::vector<int> input_ports(m);
        for (int p = 0; p < m; ++p) input_ports[p] = p + 1;
        std::shuffle(input_ports.begin(), input_ports.end(), rng);
        std::vector<int> dports;
        std::vector<double> times;
        std::vector<PolarizationVector> pols;
        for (int i = 0; i < n; ++i) {
            sources.ports.push_back(input_ports[i]);
            sources.profiles.push_back(random_mixed_profile(rng));
            dports.push_back(1 + static_cast<int>(rng() % m));
            times.push_back(time_dist(rng));
            pols.push_back(PolarizationVector::linear(angle(rng)));
        }
        const auto sample = DetectionSample::make(dports, times, pols);
        const double via_perm = rate(u, sample, sources);
        if (via_perm < 1e-9) continue;  // keep generic, well-conditioned configurations
        ++kept;
        const double via_sum = rate_double_sum(u, sample, sources);
        check.require(rel_err(via_perm, via_sum) <= 1e-10,
                      "double-sum mismatch at kept case " + std::to_string(kept));
    }
}

// 7. Subset factorization for two temporally separated photon pairs.
void subset_factorization(Check& check) {
    const auto u = haar_random(8, 20250307);
    const SourceSet pairs{{1, 2, 3, 4},
                          {photon(1, 60, 0), photon(1, 60, 0), photon(1, 60, 20),
                           photon(1, 60, 20)}};
    std::mt19937_64 rng(7007);
    std::uniform_real_distribution<double> jitter(-1.0, 1.0);
    int kept = 0;
    while (kept < 20) {
        std::vector<int> ports(8);
        for (int p = 0; p < 8; ++p) ports[p] = p + 1;
        std::shuffle(ports.begin(), ports.end(), rng);
        const std::vector<int> dports(ports.begin(), ports.begin() + 4);
        const std::vector<double> times{jitter(rng), jitter(rng), 20.0 + jitter(rng),
                                        20.0 + jitter(rng)};
        const auto sample = DetectionSample::make(
            dports, times, std::vector<PolarizationVector>(4, PolarizationVector::e1()));

        SubsetPartition partition;
        partition.parts.resize(2);
        partition.parts[0].sources = {0, 1};
        partition.parts[1].sources = {2, 3};
        for (int j = 0; j < 4; ++j) {
            (sample.times[j] < 10.0 ? partition.parts[0] : partition.parts[1])
                .detectors.push_back(j);
        }

        const double full = rate(u, sample, pairs);
        if (full < 1e-10) continue;
        ++kept;
        const double factored = factorized_rate(u, sample, pairs, {}, partition);
        check.require(rel_err(full, factored) <= 1e-8,
                      "factorization mismatch at kept case " + std::to_string(kept));
    }
}

// 8. Time-resolved interference is color-blind; the averaged signal is not.
void color_blind_interference(Check& check) {
    const auto bs = beam_splitter_50_50();
    const double delta_omega = 10.0;
    const SourceSet sources{{1, 2}, {photon(1, 60, 0), photon(1, 60 + delta_omega, 0)}};

    auto coincidence_rate = [&](double tau) {
        return rate(bs,
                    DetectionSample::make({1, 2}, {tau / 2, -tau / 2},
                                          std::vector<PolarizationVector>(
                                              2, PolarizationVector::e1())),
                    sources);
    };
    double max_rate = 0.0;
    const double period = 2.0 * std::numbers::pi / delta_omega;
    for (int k = 0; k <= 4000; ++k) {
        max_rate = std::max(max_rate, coincidence_rate(-2.0 + 4.0 * k / 4000.0));
    }
    check.require(coincidence_rate(0.0) <= 1e-12 * max_rate, "dip not color-blind");

    auto zero_near = [&](double lo, double hi) {
        double best_tau = lo, best_val = 1e300;
        for (int k = 0; k < 4000; ++k) {
            const double tau = lo + (hi - lo) * k / 3999.0;
            const double val = coincidence_rate(tau);
            if (val < best_val) {
                best_val = val;
                best_tau = tau;
            }
        }
        return best_tau;
    };
    const double first = zero_near(0.5 * period, 1.5 * period);
    const double second = zero_near(1.5 * period, 2.5 * period);
    check.require(std::abs(first - period) <= 0.01 * period, "first beat zero misplaced");
    check.require(std::abs((second - first) - period) <= 0.01 * period,
                  "beat period off by more than 1%");

    const double g_abs = std::abs(distinguishability_g(sources.profiles[0], sources.profiles[1]));
    check.require(g_abs <= std::exp(-12.0), "averaged overlap not suppressed");
    check.within(p_av(bs, PortSample{{1, 2}}, sources), 0.5, 1e-5, "averaged coincidence");
}

// 9. Gaussian closed forms against the quadrature oracle.
void gaussian_closed_forms(Check& check) {
    std::mt19937_64 rng(909090);
    std::uniform_real_distribution<double> bw(0.5, 2.0);
    std::uniform_real_distribution<double> t0(-5.0, 5.0);
    std::uniform_real_distribution<double> dw(0.0, 10.0);
    std::uniform_real_distribution<double> angle(0.0, std::numbers::pi / 2);
    double worst_a = 0.0, worst_g = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = photon(bw(rng), 60.0 + dw(rng), t0(rng),
                              PolarizationVector::linear(angle(rng)));
        const auto s2 = photon(bw(rng), 60.0 + dw(rng), t0(rng),
                               PolarizationVector::linear(angle(rng)));
        worst_a = std::max(worst_a,
                           std::abs(overlap_modulus_a(s, s2) - overlap_modulus_a_quadrature(s, s2)));
        worst_g = std::max(worst_g, std::abs(distinguishability_g(s, s2) -
                                             distinguishability_g_quadrature(s, s2)));
    }
    check.require(worst_a <= 1e-8, "a closed form vs quadrature: " + std::to_string(worst_a));
    check.require(worst_g <= 1e-8, "g closed form vs quadrature: " + std::to_string(worst_g));
}

// 10. Sampler fidelity and reproducibility.
void sampler_fidelity(Check& check) {
    const auto u = haar_random(4, 20250310);
    const SourceSet sources{{1, 2},
                            {photon(1.0, 60.0, 0.0), photon(1.1, 61.5, 0.4)}};
    const auto exact = output_distribution(u, sources, AveragedMode::general);

    const std::size_t draws = 100000;
    std::map<std::vector<int>, double> empirical;
    for (const auto& s : sample_ports(exact, 313, draws)) empirical[s.ports()] += 1.0 / draws;
    double tv = 0.0;
    for (const auto& [d, p] : exact.entries) {
        const auto it = empirical.find(d.ports());
        tv += std::abs((it == empirical.end() ? 0.0 : it->second) - p);
    }
    check.require(tv / 2.0 <= 0.01, "port-draw TV distance " + std::to_string(tv / 2.0));

    const TimeGrid grid{-4.8, 5.2, 128};
    const auto run = sample_mbcs(u, sources, grid, 414, draws);
    std::map<std::vector<int>, double> marginal;
    for (const auto& record : run.records) marginal[record.ports.ports()] += 1.0 / draws;
    double tv2 = 0.0;
    for (const auto& [d, p] : exact.entries) {
        const auto it = marginal.find(d.ports());
        tv2 += std::abs((it == marginal.end() ? 0.0 : it->second) - p);
    }
    check.require(tv2 / 2.0 <= 0.02, "MBCS marginal TV distance " + std::to_string(tv2 / 2.0));

    // Fixed seeds reproduce byte-identical serialized output.
    const auto rerun = sample_mbcs(u, sources, grid, 414, 2000);
    const auto rerun2 = sample_mbcs(u, sources, grid, 414, 2000);
    check.require(records_to_csv(rerun.records) == records_to_csv(rerun2.records),
                  "MBCS records not reproducible");
    check.require(port_samples_to_csv(sample_ports(exact, 313, 2000)) ==
                      port_samples_to_csv(sample_ports(exact, 313, 2000)),
                  "port samples not reproducible");
}

struct Criterion {
    int id;
    const char* name;
    double time_limit_s;
    std::function<void(Check&)> fn;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "HOM dip and bunching on the 50/50 splitter", 1.0, hom_dip},
        {2, "identical-photon limit over all M=7, N=3 multisets", 10.0, identical_limit},
        {3, "distinguishable limit over all M=7, N=3 multisets", 10.0, distinguishable_limit},
        {4, "normalization and quadrature oracle (M=3,4, N=2)", 120.0, normalization_and_quadrature},
        {5, "permanent engines and algebraic properties", 30.0, permanent_engines},
        {6, "double-sum vs permanent rate on 50 random configs", 60.0, double_sum_equivalence},
        {7, "subset factorization for separated pairs (M=8, N=4)", 30.0, subset_factorization},
        {8, "color-blind resolved interference vs averaged decay", 30.0, color_blind_interference},
        {9, "Gaussian closed forms vs quadrature on 200 pairs", 30.0, gaussian_closed_forms},
        {10, "sampler fidelity and reproducibility", 120.0, sampler_fidelity},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        Check check;
        const auto start = std::chrono::steady_clock::now();
        try {
            criterion.fn(check);
        } catch (const std::exception& e) {
            check.failures.push_back(std::string("exception: ") + e.what());
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed > criterion.time_limit_s) {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "runtime %.1f s exceeds limit %.0f s", elapsed,
                          criterion.time_limit_s);
            check.failures.push_back(buf);
        }
        if (check.failures.empty()) {
            std::printf("PASS  [%2d] %s (%.2f s)\n", criterion.id, criterion.name, elapsed);
        } else {
            ++failures;
            std::printf("FAIL  [%2d] %s (%.2f s): %s\n", criterion.id, criterion.name, elapsed,
                        check.failures.front().c_str());
            for (std::size_t k = 1; k < check.failures.size() && k < 4; ++k) {
                std::printf("          %s\n", check.failures[k].c_str());
            }
        }
    }
    std::printf("%d/%zu acceptance criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
