#include "mbcs/averaged.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numeric>

#include "mbcs/permanent.hpp"
#include "mbcs/spectra.hpp"

namespace mbcs {

namespace {

std::vector<Permutation> all_permutations(int n) {
    std::vector<Permutation> perms;
    Permutation p(n);
    std::iota(p.begin(), p.end(), 0);
    do {
        perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return perms;
}

void check_averaged_size(int n) {
    if (n > limits::max_averaged_photons) {
        throw SizeError("averaged probabilities limited to N <= " +
                        std::to_string(limits::max_averaged_photons));
    }
}

double finalize_probability(const Complex& value, const std::string& what) {
    if (std::abs(value.imag()) > 1e-8) {
        throw NumericalError(what + " has imaginary residue " + std::to_string(value.imag()));
    }
    double p = value.real();
    if (p < 0.0) {
        if (p < -1e-8) {
            throw NumericalError(what + " is negative: " + std::to_string(p));
        }
        p = 0.0;
    }
    return p;
}

// Gauss-Legendre nodes and weights on [lo, hi]. Orders are the fixed set the
// quadrature backend instantiates.
template <unsigned Order>
void gauss_nodes_impl(double lo, double hi, std::vector<double>& xs, std::vector<double>& ws) {
    using G = boost::math::quadrature::gauss<double, Order>;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (std::size_t k = 0; k < G::abscissa().size(); ++k) {
        const double x = G::abscissa()[k], w = G::weights()[k];
        if (x == 0.0) {
            xs.push_back(mid);
            ws.push_back(w * half);
        } else {
            xs.push_back(mid - half * x);
            ws.push_back(w * half);
            xs.push_back(mid + half * x);
            ws.push_back(w * half);
        }
    }
}

void gauss_nodes(int order, double lo, double hi, std::vector<double>& xs,
                 std::vector<double>& ws) {
    switch (order) {
        case 16: gauss_nodes_impl<16>(lo, hi, xs, ws); break;
        case 24: gauss_nodes_impl<24>(lo, hi, xs, ws); break;
        case 32: gauss_nodes_impl<32>(lo, hi, xs, ws); break;
        case 48: gauss_nodes_impl<48>(lo, hi, xs, ws); break;
        case 64: gauss_nodes_impl<64>(lo, hi, xs, ws); break;
        case 96: gauss_nodes_impl<96>(lo, hi, xs, ws); break;
        case 128: gauss_nodes_impl<128>(lo, hi, xs, ws); break;
        case 192: gauss_nodes_impl<192>(lo, hi, xs, ws); break;
        default:
            throw ValidationError(
                "nodes_per_axis must be one of 16, 24, 32, 48, 64, 96, 128, 192");
    }
}

}  // namespace

Eigen::MatrixXcd rho_matrix(const UnitaryMatrix& u, const PortSample& detectors,
                            const SourceSet& sources, const Permutation& rho) {
    const int n = detectors.size();
    if (!is_permutation_of_n(rho, n)) {
        throw ValidationError("rho is not a permutation of the source indices");
    }
    const Eigen::MatrixXcd sub = submatrix(u, detectors, sources);
    Eigen::MatrixXcd a(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            a(j, i) = std::conj(sub(j, i)) * sub(j, rho[i]);
        }
    }
    return a;
}

double p_av(const UnitaryMatrix& u, const PortSample& detectors, const SourceSet& sources,
            Exec exec) {
    const int n = detectors.size();
    check_averaged_size(n);
    const Eigen::MatrixXcd sub = submatrix(u, detectors, sources);
    const auto perms = all_permutations(n);

    // g(i,i') lookup; f_ρ is the product along ρ.
    Eigen::MatrixXcd g(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            g(i, j) = distinguishability_g(sources.profiles[i], sources.profiles[j]);
        }
    }

    const std::size_t chunks = n >= 6 ? 64 : 1;
    const auto partials = map_chunks<Complex>(
        perms.size(), chunks, exec, [&](std::size_t begin, std::size_t end) {
            CompensatedComplexSum acc;
            Eigen::MatrixXcd a_rho(n, n);
            for (std::size_t r = begin; r < end; ++r) {
                const Permutation& rho = perms[r];
                Complex f{1.0, 0.0};
                for (int i = 0; i < n; ++i) f *= g(i, rho[i]);
                for (int j = 0; j < n; ++j) {
                    for (int i = 0; i < n; ++i) {
                        a_rho(j, i) = std::conj(sub(j, i)) * sub(j, rho[i]);
                    }
                }
                acc.add(f * perm_ryser(a_rho, Exec::serial));
            }
            return acc.value();
        });
    CompensatedComplexSum acc;
    for (const Complex& p : partials) acc.add(p);
    return finalize_probability(acc.value() / detectors.bunching_factor(), "averaged probability");
}

double p_av_identical(const UnitaryMatrix& u, const PortSample& detectors,
                      const SourceSet& sources) {
    check_averaged_size(detectors.size());
    const Eigen::MatrixXcd sub = submatrix(u, detectors, sources);
    return std::norm(perm_ryser(sub)) / detectors.bunching_factor();
}

double p_av_distinguishable(const UnitaryMatrix& u, const PortSample& detectors,
                            const SourceSet& sources) {
    check_averaged_size(detectors.size());
    const Eigen::MatrixXcd sub = submatrix(u, detectors, sources);
    const Eigen::MatrixXcd abs2 = sub.cwiseAbs2().cast<Complex>();
    return finalize_probability(perm_ryser(abs2) / detectors.bunching_factor(),
                                "distinguishable-limit probability");
}

std::string to_string(AveragedMode mode) {
    switch (mode) {
        case AveragedMode::general: return "general";
        case AveragedMode::identical: return "identical";
        case AveragedMode::distinguishable: return "distinguishable";
    }
    return "general";
}

double OutputDistribution::total() const {
    CompensatedSum acc;
    for (const auto& [sample, p] : entries) acc.add(p);
    return acc.value();
}

double OutputDistribution::probability(const PortSample& d) const {
    const auto it = std::lower_bound(
        entries.begin(), entries.end(), d,
        [](const auto& entry, const PortSample& key) { return entry.first < key; });
    if (it != entries.end() && it->first == d) return it->second;
    return 0.0;
}

OutputDistribution output_distribution(const UnitaryMatrix& u, const SourceSet& sources,
                                       AveragedMode mode, Exec exec) {
    const int m = u.dimension();
    const int n = sources.size();
    sources.validate(m);
    check_averaged_size(n);
    if (port_sample_count(m, n, true) > static_cast<double>(limits::max_distribution_entries)) {
        throw SizeError("distribution enumeration exceeds the configured cap of " +
                        std::to_string(limits::max_distribution_entries) + " samples");
    }
    auto samples = enumerate_port_samples(m, n, true);

    OutputDistribution dist;
    dist.m = m;
    dist.n = n;
    dist.mode = mode;
    dist.entries.resize(samples.size());
    const auto eval = [&](const PortSample& d) {
        switch (mode) {
            case AveragedMode::identical: return p_av_identical(u, d, sources);
            case AveragedMode::distinguishable: return p_av_distinguishable(u, d, sources);
            case AveragedMode::general: break;
        }
        return p_av(u, d, sources, Exec::serial);
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long long k = 0; k < static_cast<long long>(samples.size()); ++k) {
            dist.entries[k] = {samples[k], eval(samples[k])};
        }
    } else {
        for (std::size_t k = 0; k < samples.size(); ++k) {
            dist.entries[k] = {samples[k], eval(samples[k])};
        }
    }
    const double total = dist.total();
    if (std::abs(total - 1.0) > 1e-6) {
        throw NumericalError("output distribution sums to " + std::to_string(total));
    }
    return dist;
}

double p_av_numeric(const UnitaryMatrix& u, const PortSample& detectors, const SourceSet& sources,
                    const QuadratureSpec& spec, const std::array<PolarizationVector, 2>& basis,
                    Exec exec, const PropagationConfig& cfg) {
    const int n = detectors.size();
    if (n > limits::max_numeric_average_photons) {
        throw SizeError("p_av_numeric limited to N <= " +
                        std::to_string(limits::max_numeric_average_photons));
    }
    if (sources.size() != n) {
        throw ValidationError("detector sample and source set must have equal size");
    }

    // One shared axis covering every photon envelope.
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& profile : sources.profiles) {
        const double center = profile.emission_time + cfg.delta_t;
        lo = std::min(lo, center - spec.envelope_sigmas * profile.temporal_sigma());
        hi = std::max(hi, center + spec.envelope_sigmas * profile.temporal_sigma());
    }
    std::vector<double> xs, ws;
    gauss_nodes(spec.nodes_per_axis, lo, hi, xs, ws);
    const std::size_t num_nodes = xs.size();

    // proj[b][i*num_nodes + k] = <basis_b, χ_i(x_k)>
    const Eigen::MatrixXcd sub = submatrix(u, detectors, sources);
    std::array<std::vector<Complex>, 2> proj;
    for (int b = 0; b < 2; ++b) {
        proj[b].resize(static_cast<std::size_t>(n) * num_nodes);
        for (int i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < num_nodes; ++k) {
                proj[b][i * num_nodes + k] =
                    project(basis[b], temporal_amplitude(sources.profiles[i], xs[k], cfg.delta_t));
            }
        }
    }

    const std::size_t pol_count = std::size_t{1} << n;
    const std::size_t outer = pol_count * num_nodes;  // (polarization word, first axis node)
    std::size_t inner = 1;
    for (int j = 1; j < n; ++j) inner *= num_nodes;

    const auto partials = map_chunks<double>(
        outer, std::min<std::size_t>(64, outer), exec, [&](std::size_t begin, std::size_t end) {
            CompensatedSum acc;
            Eigen::MatrixXcd t(n, n);
            std::vector<std::size_t> idx(n);
            for (std::size_t o = begin; o < end; ++o) {
                const std::size_t pol_word = o / num_nodes;
                idx[0] = o % num_nodes;
                for (std::size_t rest = 0; rest < inner; ++rest) {
                    std::size_t r = rest;
                    for (int j = 1; j < n; ++j) {
                        idx[j] = r % num_nodes;
                        r /= num_nodes;
                    }
                    double w = 1.0;
                    for (int j = 0; j < n; ++j) w *= ws[idx[j]];
                    for (int j = 0; j < n; ++j) {
                        const int b = (pol_word >> j) & 1;
                        for (int i = 0; i < n; ++i) {
                            t(j, i) = sub(j, i) * proj[b][i * num_nodes + idx[j]];
                        }
                    }
                    acc.add(w * std::norm(perm_ryser(t, Exec::serial)));
                }
            }
            return acc.value();
        });
    CompensatedSum acc;
    for (double p : partials) acc.add(p);
    return acc.value() / detectors.bunching_factor();
}

}  // namespace mbcs
