#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <vector>

#include "mbcs/interferometer.hpp"
#include "mbcs/numeric.hpp"
#include "mbcs/types.hpp"

namespace mbcs {

// A_ρ with entries conj(U^{(D,S)}_{j,i})·U^{(D,S)}_{j,ρ(i)}. For ρ = identity
// this is the entrywise |U|² matrix.
Eigen::MatrixXcd rho_matrix(const UnitaryMatrix& u, const PortSample& detectors,
                            const SourceSet& sources, const Permutation& rho);

// Time- and polarization-averaged detection probability
//   P_av = (1/∏_d n_d!) Σ_ρ f_ρ(S) perm A_ρ.
// Guarded at N <= 8 (N! permanents of cost 2^N·N). The permutation sum runs
// in size-derived chunks with a fixed reduction order; the imaginary residue
// is checked (error above 1e-8) and discarded.
double p_av(const UnitaryMatrix& u, const PortSample& detectors, const SourceSet& sources,
            Exec exec = Exec::parallel);

// Identical-photon limit: |perm U^{(D,S)}|² / ∏_d n_d!, one permanent.
double p_av_identical(const UnitaryMatrix& u, const PortSample& detectors,
                      const SourceSet& sources);

// Fully distinguishable limit: perm([|U_{d,s}|²]) / ∏_d n_d!.
double p_av_distinguishable(const UnitaryMatrix& u, const PortSample& detectors,
                            const SourceSet& sources);

enum class AveragedMode { general, identical, distinguishable };

std::string to_string(AveragedMode mode);

// Averaged probabilities for every bunching multiset of output ports.
struct OutputDistribution {
    int m = 0;
    int n = 0;
    AveragedMode mode = AveragedMode::general;
    std::vector<std::pair<PortSample, double>> entries;  // canonical order

    double total() const;
    // Probability of a sample; 0 if absent.
    double probability(const PortSample& d) const;
};

OutputDistribution output_distribution(const UnitaryMatrix& u, const SourceSet& sources,
                                       AveragedMode mode, Exec exec = Exec::parallel);

// Quadrature specification for the brute-force average: tensor
// Gauss-Legendre per time axis, range covering every photon envelope at
// ±envelope_sigmas temporal widths.
struct QuadratureSpec {
    int nodes_per_axis = 96;
    double envelope_sigmas = 10.0;
};

// P_av by direct integration of the resolved rate over all detection times
// and summation over basis polarization assignments; the independent oracle
// for the analytic ρ-sum. Guarded at N <= 3 (2N-dimensional quadrature).
// The polarization basis is configurable to allow checking that the average
// does not depend on it.
double p_av_numeric(const UnitaryMatrix& u, const PortSample& detectors, const SourceSet& sources,
                    const QuadratureSpec& spec = {},
                    const std::array<PolarizationVector, 2>& basis =
                        {PolarizationVector::e1(), PolarizationVector::e2()},
                    Exec exec = Exec::parallel, const PropagationConfig& cfg = {});

}  // namespace mbcs
