#include "mbcs/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mbcs/numeric.hpp"
#include "mbcs/permanent.hpp"
#include "mbcs/spectra.hpp"

namespace mbcs {

namespace {

void check_shapes(const DetectionSample& sample, const SourceSet& sources) {
    const std::size_t n = sample.ports.ports().size();
    if (sample.times.size() != n || sample.polarizations.size() != n) {
        throw ValidationError("detection sample lists must all have length N");
    }
    if (sources.size() != static_cast<int>(n)) {
        throw ValidationError("detection sample and source set must have equal size");
    }
}

// amp(j, i) = <p_j, χ_i(t_j)>.
Eigen::MatrixXcd amplitude_matrix(const DetectionSample& sample, const SourceSet& sources,
                                  const PropagationConfig& cfg) {
    const int n = sample.size();
    Eigen::MatrixXcd amp(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            amp(j, i) = project(sample.polarizations[j],
                                temporal_amplitude(sources.profiles[i], sample.times[j],
                                                   cfg.delta_t));
        }
    }
    return amp;
}

bool has_trivial_row(const Eigen::MatrixXcd& t) {
    for (int j = 0; j < t.rows(); ++j) {
        bool all_zero = true;
        for (int i = 0; i < t.cols(); ++i) {
            if (std::abs(t(j, i)) >= trivial_amplitude_threshold) {
                all_zero = false;
                break;
            }
        }
        if (all_zero) return true;
    }
    return false;
}

}  // namespace

Eigen::MatrixXcd detection_matrix(const UnitaryMatrix& u, const DetectionSample& sample,
                                  const SourceSet& sources, const PropagationConfig& cfg) {
    check_shapes(sample, sources);
    return submatrix(u, sample.ports, sources).cwiseProduct(amplitude_matrix(sample, sources, cfg));
}

double rate(const UnitaryMatrix& u, const DetectionSample& sample, const SourceSet& sources,
            const PropagationConfig& cfg) {
    const Eigen::MatrixXcd t = detection_matrix(u, sample, sources, cfg);
    // Samples with an amplitude-free detector have zero rate for every U.
    if (has_trivial_row(t)) return 0.0;
    return std::norm(perm_ryser(t));
}

double rate_double_sum(const UnitaryMatrix& u, const DetectionSample& sample,
                       const SourceSet& sources, const PropagationConfig& cfg) {
    check_shapes(sample, sources);
    const int n = sample.size();
    if (n > limits::max_double_sum_photons) {
        throw SizeError("rate_double_sum limited to N <= " +
                        std::to_string(limits::max_double_sum_photons));
    }
    const Eigen::MatrixXcd sub = submatrix(u, sample.ports, sources);
    const Eigen::MatrixXcd amp = amplitude_matrix(sample, sources, cfg);

    CompensatedComplexSum acc;
    std::vector<int> sigma(n), sigma_prime(n);
    std::iota(sigma.begin(), sigma.end(), 0);
    do {
        Complex path{1.0, 0.0};
        for (int j = 0; j < n; ++j) path *= sub(j, sigma[j]) * amp(j, sigma[j]);
        std::iota(sigma_prime.begin(), sigma_prime.end(), 0);
        do {
            Complex conj_path{1.0, 0.0};
            for (int j = 0; j < n; ++j) {
                conj_path *= std::conj(sub(j, sigma_prime[j]) * amp(j, sigma_prime[j]));
            }
            acc.add(conj_path * path);
        } while (std::next_permutation(sigma_prime.begin(), sigma_prime.end()));
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return acc.value().real();
}

double single_path_rate(const UnitaryMatrix& u, const DetectionSample& sample,
                        const SourceSet& sources, const PropagationConfig& cfg,
                        const Permutation& sigma) {
    check_shapes(sample, sources);
    const int n = sample.size();
    if (!is_permutation_of_n(sigma, n)) {
        throw ValidationError("sigma must be a bijection from sources to detectors");
    }
    const Eigen::MatrixXcd sub = submatrix(u, sample.ports, sources);
    const Eigen::MatrixXcd amp = amplitude_matrix(sample, sources, cfg);
    Complex path{1.0, 0.0};
    for (int i = 0; i < n; ++i) path *= sub(sigma[i], i) * amp(sigma[i], i);
    return std::norm(path);
}

double factorized_rate(const UnitaryMatrix& u, const DetectionSample& sample,
                       const SourceSet& sources, const PropagationConfig& cfg,
                       const SubsetPartition& partition, double leak_tol) {
    check_shapes(sample, sources);
    const int n = sample.size();
    std::vector<int> source_part(n, -1), detector_part(n, -1);
    for (std::size_t k = 0; k < partition.parts.size(); ++k) {
        const auto& part = partition.parts[k];
        if (part.sources.size() != part.detectors.size()) {
            throw ValidationError("partition subsets must pair equally many sources and detectors");
        }
        for (int s : part.sources) {
            if (s < 0 || s >= n || source_part[s] != -1) {
                throw ValidationError("partition source subsets must be disjoint and in range");
            }
            source_part[s] = static_cast<int>(k);
        }
        for (int d : part.detectors) {
            if (d < 0 || d >= n || detector_part[d] != -1) {
                throw ValidationError("partition detector subsets must be disjoint and in range");
            }
            detector_part[d] = static_cast<int>(k);
        }
    }
    if (std::count(source_part.begin(), source_part.end(), -1) != 0 ||
        std::count(detector_part.begin(), detector_part.end(), -1) != 0) {
        throw ValidationError("partition must cover all sources and detectors");
    }

    const Eigen::MatrixXcd amp = amplitude_matrix(sample, sources, cfg);
    for (int d = 0; d < n; ++d) {
        for (int s = 0; s < n; ++s) {
            if (source_part[s] != detector_part[d] && std::abs(amp(d, s)) > leak_tol) {
                throw ValidationError(
                    "cross-subset amplitude above threshold for source port " +
                    std::to_string(sources.ports[s]) + " at detector port " +
                    std::to_string(sample.ports.ports()[d]));
            }
        }
    }

    const Eigen::MatrixXcd sub = submatrix(u, sample.ports, sources);
    double g = 1.0;
    for (const auto& part : partition.parts) {
        const int nk = static_cast<int>(part.sources.size());
        Eigen::MatrixXcd tk(nk, nk);
        for (int j = 0; j < nk; ++j) {
            for (int i = 0; i < nk; ++i) {
                const int d = part.detectors[j], s = part.sources[i];
                tk(j, i) = sub(d, s) * amp(d, s);
            }
        }
        g *= std::norm(perm_ryser(tk));
    }
    return g;
}

Eigen::MatrixXd interference_matrix(const SourceSet& sources) {
    const int n = sources.size();
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            a(i, j) = a(j, i) = overlap_modulus_a(sources.profiles[i], sources.profiles[j]);
        }
    }
    return a;
}

InterferenceSupport interference_support(const SourceSet& sources, double eps) {
    const int n = sources.size();
    const Eigen::MatrixXd a = interference_matrix(sources);

    bool all_full = true, all_none = true;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (a(i, j) < 1.0 - eps) all_full = false;
            if (a(i, j) > eps) all_none = false;
        }
    }
    InterferenceSupport support;
    if (all_full) {
        support.kind = InterferenceClass::full;
        std::vector<int> everyone(n);
        std::iota(everyone.begin(), everyone.end(), 0);
        support.subsets.push_back(std::move(everyone));
        return support;
    }
    if (all_none) {
        support.kind = InterferenceClass::none;
        for (int i = 0; i < n; ++i) support.subsets.push_back({i});
        return support;
    }

    // Connected components of the a > eps graph.
    std::vector<int> comp(n, -1);
    int num_comps = 0;
    for (int start = 0; start < n; ++start) {
        if (comp[start] != -1) continue;
        std::vector<int> stack{start};
        comp[start] = num_comps;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int w = 0; w < n; ++w) {
                if (comp[w] == -1 && a(v, w) > eps) {
                    comp[w] = num_comps;
                    stack.push_back(w);
                }
            }
        }
        ++num_comps;
    }
    std::vector<std::vector<int>> subsets(num_comps);
    for (int i = 0; i < n; ++i) subsets[comp[i]].push_back(i);

    // Partitioned only if each component is internally fully overlapping.
    for (const auto& subset : subsets) {
        for (std::size_t x = 0; x < subset.size(); ++x) {
            for (std::size_t y = x + 1; y < subset.size(); ++y) {
                if (a(subset[x], subset[y]) < 1.0 - eps) {
                    support.kind = InterferenceClass::partial;
                    return support;
                }
            }
        }
    }
    support.kind = InterferenceClass::partitioned;
    support.subsets = std::move(subsets);
    return support;
}

}  // namespace mbcs
