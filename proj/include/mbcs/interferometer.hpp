#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "mbcs/types.hpp"

namespace mbcs {

// M×M unitary describing the interferometer. Immutable after construction;
// construction rejects matrices with U·U† − 1 above tolerance in Frobenius
// norm.
class UnitaryMatrix {
  public:
    explicit UnitaryMatrix(Eigen::MatrixXcd entries, double tol = 1e-10);

    int dimension() const { return static_cast<int>(m_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return m_; }

    // Entry U_{d,s} with 1-based port indices.
    Complex entry(int output_port, int input_port) const {
        return m_(output_port - 1, input_port - 1);
    }

    static double unitarity_defect(const Eigen::MatrixXcd& m);

  private:
    Eigen::MatrixXcd m_;
};

// Haar-distributed random unitary: complex Ginibre draw, QR, then column
// phases fixed by the diagonal of R. Deterministic per seed (mt19937_64).
UnitaryMatrix haar_random(int m, std::uint64_t seed);

// (1/√2)[[1, i],[i, 1]] — symmetric 50/50 beam splitter.
UnitaryMatrix beam_splitter_50_50();

// N×N scattering submatrix [U_{d_j,s_i}]; detector rows repeat when a port
// appears multiple times in the sample.
Eigen::MatrixXcd submatrix(const UnitaryMatrix& u, const PortSample& detectors,
                           const SourceSet& sources);

// All port samples of size n from m ports, in canonical (non-decreasing,
// lexicographic) order: multisets when allow_bunching, plain subsets
// otherwise.
std::vector<PortSample> enumerate_port_samples(int m, int n, bool allow_bunching);

// C(m+n−1, n) resp. C(m, n); the enumeration size without materializing it.
double port_sample_count(int m, int n, bool allow_bunching);

}  // namespace mbcs
