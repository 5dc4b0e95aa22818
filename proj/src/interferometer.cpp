#include "mbcs/interferometer.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

namespace mbcs {

UnitaryMatrix::UnitaryMatrix(Eigen::MatrixXcd entries, double tol) : m_(std::move(entries)) {
    if (m_.rows() < 1 || m_.rows() != m_.cols()) {
        throw ValidationError("unitary matrix must be square and non-empty");
    }
    const double defect = unitarity_defect(m_);
    if (!(defect <= tol)) {
        throw ValidationError("matrix is not unitary (defect " + std::to_string(defect) + ")");
    }
}

double UnitaryMatrix::unitarity_defect(const Eigen::MatrixXcd& m) {
    return (m * m.adjoint() - Eigen::MatrixXcd::Identity(m.rows(), m.cols())).norm();
}

UnitaryMatrix haar_random(int m, std::uint64_t seed) {
    if (m < 1) throw ValidationError("interferometer dimension must be at least 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd ginibre(m, m);
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) {
            ginibre(r, c) = Complex(gauss(rng), gauss(rng));
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(ginibre);
    Eigen::MatrixXcd q = qr.householderQ();
    // Rescale columns by the phases of R's diagonal; this makes the QR draw
    // exactly Haar rather than merely unitary.
    const Eigen::MatrixXcd& qrm = qr.matrixQR();
    for (int c = 0; c < m; ++c) {
        const Complex r = qrm(c, c);
        const double mod = std::abs(r);
        q.col(c) *= (mod > 0.0) ? r / mod : Complex(1.0, 0.0);
    }
    return UnitaryMatrix(std::move(q));
}

UnitaryMatrix beam_splitter_50_50() {
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXcd m(2, 2);
    m << Complex(s, 0.0), Complex(0.0, s), Complex(0.0, s), Complex(s, 0.0);
    return UnitaryMatrix(std::move(m));
}

Eigen::MatrixXcd submatrix(const UnitaryMatrix& u, const PortSample& detectors,
                           const SourceSet& sources) {
    const int n = detectors.size();
    const int m = u.dimension();
    if (sources.size() != n) {
        throw ValidationError("detector sample and source set must have equal size");
    }
    for (int d : detectors.ports()) {
        if (d < 1 || d > m) {
            throw ValidationError("detector port " + std::to_string(d) + " out of range");
        }
    }
    for (int s : sources.ports) {
        if (s < 1 || s > m) {
            throw ValidationError("source port " + std::to_string(s) + " out of range");
        }
    }
    Eigen::MatrixXcd sub(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            sub(j, i) = u.matrix()(detectors.ports()[j] - 1, sources.ports[i] - 1);
        }
    }
    return sub;
}

namespace {

void enumerate_rec(int m, int n, bool allow_bunching, int next_min, std::vector<int>& prefix,
                   std::vector<PortSample>& out) {
    if (static_cast<int>(prefix.size()) == n) {
        out.emplace_back(prefix);
        return;
    }
    for (int p = next_min; p <= m; ++p) {
        prefix.push_back(p);
        enumerate_rec(m, n, allow_bunching, allow_bunching ? p : p + 1, prefix, out);
        prefix.pop_back();
    }
}

}  // namespace

std::vector<PortSample> enumerate_port_samples(int m, int n, bool allow_bunching) {
    if (m < 1 || n < 1) throw ValidationError("port sample enumeration needs m, n >= 1");
    if (!allow_bunching && n > m) {
        throw ValidationError("cannot place " + std::to_string(n) + " distinct detections in " +
                              std::to_string(m) + " ports without bunching");
    }
    std::vector<PortSample> out;
    out.reserve(static_cast<std::size_t>(port_sample_count(m, n, allow_bunching)));
    std::vector<int> prefix;
    enumerate_rec(m, n, allow_bunching, 1, prefix, out);
    return out;
}

double port_sample_count(int m, int n, bool allow_bunching) {
    const int top = allow_bunching ? m + n - 1 : m;
    if (n > top) return 0.0;
    double c = 1.0;
    for (int k = 1; k <= n; ++k) c = c * (top - n + k) / k;
    return std::round(c);
}

}  // namespace mbcs
