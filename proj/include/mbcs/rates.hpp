#pragma once

#include <Eigen/Core>
#include <vector>

#include "mbcs/interferometer.hpp"
#include "mbcs/types.hpp"

namespace mbcs {

// Detection matrix T with entries U_{d_j,s_i}·<p_j, χ_i(t_j)>: the amplitude
// of the quantum path from source s_i to a detection at port d_j, time t_j,
// polarization p_j.
Eigen::MatrixXcd detection_matrix(const UnitaryMatrix& u, const DetectionSample& sample,
                                  const SourceSet& sources, const PropagationConfig& cfg = {});

// N-photon detection probability rate G = |perm T|².
double rate(const UnitaryMatrix& u, const DetectionSample& sample, const SourceSet& sources,
            const PropagationConfig& cfg = {});

// The same rate as the explicit double sum over permutation pairs (σ, σ');
// O((N!)²) cross-validation route, guarded at N <= 6.
double rate_double_sum(const UnitaryMatrix& u, const DetectionSample& sample,
                       const SourceSet& sources, const PropagationConfig& cfg = {});

// Rate when only the single quantum path s → σ(s) contributes (fully
// distinguishable photons). sigma[i] gives the detector row assigned to
// source i and must be a bijection.
double single_path_rate(const UnitaryMatrix& u, const DetectionSample& sample,
                        const SourceSet& sources, const PropagationConfig& cfg,
                        const Permutation& sigma);

// Disjoint source subsets with their matching detector subsets, as 0-based
// positions into the source set and the canonical port sample.
struct SubsetPartition {
    struct Part {
        std::vector<int> sources;
        std::vector<int> detectors;
    };
    std::vector<Part> parts;
};

// Rate as the product of squared sub-permanents, one per subset. The caller
// supplies the partition; amplitudes crossing subset boundaries must be below
// leak_tol or the call is rejected naming the offending (source, detector)
// pair.
double factorized_rate(const UnitaryMatrix& u, const DetectionSample& sample,
                       const SourceSet& sources, const PropagationConfig& cfg,
                       const SubsetPartition& partition, double leak_tol = 1e-12);

// Pairwise overlap moduli a(s,s') of the source set, indexed by source
// position.
Eigen::MatrixXd interference_matrix(const SourceSet& sources);

enum class InterferenceClass { full, none, partitioned, partial };

struct InterferenceSupport {
    InterferenceClass kind = InterferenceClass::partial;
    // Source positions grouped into internally indistinguishable subsets;
    // filled for `partitioned` (and trivially for `full` / `none`).
    std::vector<std::vector<int>> subsets;
};

// Classifies which N-photon interference structure the source set supports,
// from the ε-thresholded a-matrix.
InterferenceSupport interference_support(const SourceSet& sources, double eps = 1e-6);

}  // namespace mbcs
