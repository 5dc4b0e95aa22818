#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mbcs {

using Complex = std::complex<double>;

// Error taxonomy. The CLI maps these onto process exit codes:
// ValidationError (and subclasses) -> 2, NumericalError -> 3, IoError -> 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : Error {
    using Error::Error;
};
// A configured size guard was exceeded (factorial/exponential cost limits).
struct SizeError : ValidationError {
    using ValidationError::ValidationError;
};
// An internal numerical consistency check failed (e.g. imaginary residue of a
// probability above tolerance).
struct NumericalError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

// Size guards. These are honesty limits for the exponential-cost kernels, not
// tuning knobs; the CLI documents them and validate() reports violations.
namespace limits {
inline constexpr int max_naive_permanent_dim = 10;
inline constexpr int max_ryser_permanent_dim = 30;
inline constexpr int max_double_sum_photons = 6;
inline constexpr int max_averaged_photons = 8;
inline constexpr int max_numeric_average_photons = 3;
inline constexpr int max_sampler_photons = 3;
inline constexpr std::size_t max_distribution_entries = 100000;
inline constexpr std::size_t max_conditional_table_entries = std::size_t{1} << 24;
}  // namespace limits

// Amplitudes with modulus below this are treated as identically zero when
// classifying trivial detection samples.
inline constexpr double trivial_amplitude_threshold = 1e-30;

// Jones vector in the fixed basis {e1, e2}.
struct PolarizationVector {
    Complex c1{1.0, 0.0};
    Complex c2{0.0, 0.0};

    static PolarizationVector e1() { return {Complex{1.0, 0.0}, Complex{0.0, 0.0}}; }
    static PolarizationVector e2() { return {Complex{0.0, 0.0}, Complex{1.0, 0.0}}; }
    // Linear polarization at the given angle from e1.
    static PolarizationVector linear(double angle);

    double norm() const;
    bool is_normalized(double tol = 1e-12) const;
};

// Hermitian inner product <a, b> = conj(a.c1) b.c1 + conj(a.c2) b.c2.
Complex dot(const PolarizationVector& a, const PolarizationVector& b);

// One photon's Gaussian spectrum: bandwidth, color, emission time and
// polarization. The implied frequency and time profiles are normalized to
// unit total probability by construction.
struct SpectralProfile {
    double bandwidth = 1.0;          // Δω > 0
    double central_frequency = 0.0;  // ω₀ ≥ 0
    double emission_time = 0.0;      // t₀
    PolarizationVector polarization{};

    // Standard deviation of |χ(t)|², i.e. 1/(2Δω).
    double temporal_sigma() const { return 1.0 / (2.0 * bandwidth); }

    void validate() const;  // throws ValidationError
};

// Common propagation delay through the interferometer; shifts every temporal
// amplitude by the same amount.
struct PropagationConfig {
    double delta_t = 0.0;
};

// Multiset of output ports, stored canonically in non-decreasing order.
// Detection-time/polarization lists elsewhere are aligned positionally with
// this order.
class PortSample {
  public:
    PortSample() = default;
    explicit PortSample(std::vector<int> ports);

    const std::vector<int>& ports() const { return ports_; }
    int size() const { return static_cast<int>(ports_.size()); }

    // Distinct ports with their multiplicities n_d, in increasing port order.
    std::vector<std::pair<int, int>> multiplicities() const;
    // ∏_d n_d!
    double bunching_factor() const;

    bool operator==(const PortSample& other) const { return ports_ == other.ports_; }
    bool operator<(const PortSample& other) const { return ports_ < other.ports_; }

  private:
    std::vector<int> ports_;
};

// Occupied input ports with the spectral profile of the photon in each.
// Ports are 1-based and pairwise distinct; order fixes the column order of
// scattering submatrices.
struct SourceSet {
    std::vector<int> ports;
    std::vector<SpectralProfile> profiles;

    int size() const { return static_cast<int>(ports.size()); }
    // Throws ValidationError; when m > 0 also range-checks ports against it.
    void validate(int m = 0) const;
};

// A fully resolved measurement outcome: ports plus per-detection times and
// polarizations, aligned with the canonical port order.
struct DetectionSample {
    PortSample ports;
    std::vector<double> times;
    std::vector<PolarizationVector> polarizations;

    int size() const { return ports.size(); }

    // Builds a sample from arbitrarily ordered ports; times and polarizations
    // are carried along while the ports are put in canonical order.
    static DetectionSample make(std::vector<int> ports, std::vector<double> times,
                                std::vector<PolarizationVector> polarizations);
};

// Permutation of {0, .., n-1}: element i maps to perm[i].
using Permutation = std::vector<int>;

bool is_permutation_of_n(const Permutation& p, int n);

}  // namespace mbcs
