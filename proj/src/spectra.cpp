#include "mbcs/spectra.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "mbcs/numeric.hpp"

namespace mbcs {

namespace {

// Integration window covering both photons' envelopes at ±10 temporal widths;
// Gaussian tails beyond that are below 1e-21.
constexpr double quadrature_window_sigmas = 10.0;

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

std::pair<double, double> pair_window(const SpectralProfile& a, const SpectralProfile& b) {
    const double sigma = std::max(a.temporal_sigma(), b.temporal_sigma());
    const double lo = std::min(a.emission_time, b.emission_time) - quadrature_window_sigmas * sigma;
    const double hi = std::max(a.emission_time, b.emission_time) + quadrature_window_sigmas * sigma;
    return {lo, hi};
}

// |<a,b>|² / (|a|²|b|²): degree zero in each argument, so the self-overlap is
// exactly 1 even when a unit-norm vector carries rounding at the last ulp.
double polarization_overlap_sq(const PolarizationVector& a, const PolarizationVector& b) {
    return std::norm(dot(a, b)) / (dot(a, a).real() * dot(b, b).real());
}

}  // namespace

PolarizationVector PolarizationVector::linear(double angle) {
    return {Complex{std::cos(angle), 0.0}, Complex{std::sin(angle), 0.0}};
}

double PolarizationVector::norm() const { return std::sqrt(std::norm(c1) + std::norm(c2)); }

bool PolarizationVector::is_normalized(double tol) const {
    return std::abs(std::norm(c1) + std::norm(c2) - 1.0) <= tol;
}

Complex dot(const PolarizationVector& a, const PolarizationVector& b) {
    return std::conj(a.c1) * b.c1 + std::conj(a.c2) * b.c2;
}

void SpectralProfile::validate() const {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
        throw ValidationError("bandwidth must be positive and finite");
    }
    if (!(central_frequency >= 0.0) || !std::isfinite(central_frequency)) {
        throw ValidationError("central_frequency must be nonnegative and finite");
    }
    if (!std::isfinite(emission_time)) {
        throw ValidationError("emission_time must be finite");
    }
    if (!polarization.is_normalized()) {
        throw ValidationError("polarization must have unit norm");
    }
}

Complex scalar_amplitude(const SpectralProfile& profile, double t, double delta_t) {
    const double dw = profile.bandwidth;
    const double u = t - profile.emission_time - delta_t;
    const double envelope =
        std::pow(2.0 * dw * dw / std::numbers::pi, 0.25) * std::exp(-dw * dw * u * u);
    return std::polar(envelope, -profile.central_frequency * u);
}

Eigen::Vector2cd temporal_amplitude(const SpectralProfile& profile, double t, double delta_t) {
    const Complex amp = scalar_amplitude(profile, t, delta_t);
    return {profile.polarization.c1 * amp, profile.polarization.c2 * amp};
}

Complex project(const PolarizationVector& p, const Eigen::Vector2cd& chi) {
    return std::conj(p.c1) * chi(0) + std::conj(p.c2) * chi(1);
}

double overlap_modulus_a(const SpectralProfile& s, const SpectralProfile& s2) {
    const double w1 = s.bandwidth, w2 = s2.bandwidth;
    const double wsum = w1 * w1 + w2 * w2;
    const double tau = s2.emission_time - s.emission_time;
    const double a = std::sqrt(polarization_overlap_sq(s.polarization, s2.polarization)) *
                     std::sqrt(2.0 * w1 * w2 / wsum) *
                     std::exp(-(w1 * w1) * (w2 * w2) / wsum * tau * tau);
    return std::min(a, 1.0);
}

double overlap_modulus_a_quadrature(const SpectralProfile& s, const SpectralProfile& s2,
                                    double abs_tol) {
    const auto [lo, hi] = pair_window(s, s2);
    auto f = [&](double t) {
        return std::abs(dot(s.polarization, s2.polarization) *
                        std::conj(scalar_amplitude(s, t)) * scalar_amplitude(s2, t));
    };
    return GK::integrate(f, lo, hi, 15, abs_tol);
}

Complex distinguishability_g(const SpectralProfile& i, const SpectralProfile& i2) {
    const double w1 = i.bandwidth, w2 = i2.bandwidth;
    const double wsum = w1 * w1 + w2 * w2;
    const double dw0 = i.central_frequency - i2.central_frequency;
    const double tau = i.emission_time - i2.emission_time;
    const double modulus = std::sqrt(2.0 * w1 * w2 / wsum) *
                           std::exp(-dw0 * dw0 / (4.0 * wsum)) *
                           std::exp(-(w1 * w1) * (w2 * w2) / wsum * tau * tau);
    // Beat phase of the overlap; the bandwidth-weighted mean frequency. Sign
    // matches the Hermitian time-domain definition g = ∫<χ_i, χ_i'> dt with
    // the e^{−iω₀(t−t₀)} amplitude convention.
    const double mean_freq =
        (i.central_frequency * w2 * w2 + i2.central_frequency * w1 * w1) / wsum;
    return dot(i.polarization, i2.polarization) * std::polar(modulus, -mean_freq * tau);
}

Complex distinguishability_g_quadrature(const SpectralProfile& i, const SpectralProfile& i2,
                                        double abs_tol) {
    const auto [lo, hi] = pair_window(i, i2);
    const Complex pol = dot(i.polarization, i2.polarization);
    auto re = [&](double t) {
        return (pol * std::conj(scalar_amplitude(i, t)) * scalar_amplitude(i2, t)).real();
    };
    auto im = [&](double t) {
        return (pol * std::conj(scalar_amplitude(i, t)) * scalar_amplitude(i2, t)).imag();
    };
    return {GK::integrate(re, lo, hi, 15, abs_tol), GK::integrate(im, lo, hi, 15, abs_tol)};
}

Complex amplitude_overlap_f(const SourceSet& sources, const Permutation& rho) {
    const int n = sources.size();
    if (!is_permutation_of_n(rho, n)) {
        throw ValidationError("rho is not a permutation of the source indices");
    }
    Complex f{1.0, 0.0};
    for (int i = 0; i < n; ++i) {
        f *= distinguishability_g(sources.profiles[i], sources.profiles[rho[i]]);
    }
    return f;
}

}  // namespace mbcs
