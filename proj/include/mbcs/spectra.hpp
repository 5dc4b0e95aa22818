#pragma once

#include <Eigen/Core>

#include "mbcs/types.hpp"

namespace mbcs {

// Scalar part of the temporal detection amplitude of a photon with the given
// profile:
//   (2Δω²/π)^{1/4} exp[−Δω²(t−t₀−Δt)²] exp[−iω₀(t−t₀−Δt)].
// This is the Fourier transform (kernel e^{−iωt}) of the Gaussian spectral
// amplitude; |·|² integrates to 1 over the real line.
Complex scalar_amplitude(const SpectralProfile& profile, double t, double delta_t = 0.0);

// χ(t): polarization vector times scalar amplitude, as a complex 2-vector in
// the {e1, e2} basis.
Eigen::Vector2cd temporal_amplitude(const SpectralProfile& profile, double t, double delta_t = 0.0);

// Projection of χ onto a detection polarization: <p, χ> (Hermitian).
Complex project(const PolarizationVector& p, const Eigen::Vector2cd& chi);

// Overlap of the moduli of two temporal amplitudes times the polarization
// overlap, a(s,s') ∈ [0,1]. Independent of both central frequencies; decays
// with the emission-time difference. Closed form for Gaussian profiles.
double overlap_modulus_a(const SpectralProfile& s, const SpectralProfile& s2);

// Same quantity by adaptive quadrature of ∫|<χ_s(t), χ_s'(t)>| dt; the
// cross-validation route for the closed form.
double overlap_modulus_a_quadrature(const SpectralProfile& s, const SpectralProfile& s2,
                                    double abs_tol = 1e-10);

// Two-photon distinguishability factor g(i,i') = ∫ <χ_i(t), χ_i'(t)> dt with
// the Hermitian inner product (first argument conjugated), so g(i,i) = 1 and
// g(i,i') = conj(g(i',i)). Closed form: three exponential factors for color
// difference, emission-time difference and a beat phase.
Complex distinguishability_g(const SpectralProfile& i, const SpectralProfile& i2);

// g(i,i') by adaptive quadrature of the time-domain integral.
Complex distinguishability_g_quadrature(const SpectralProfile& i, const SpectralProfile& i2,
                                        double abs_tol = 1e-10);

// N-photon amplitude overlap f_ρ = ∏_i g(i, ρ(i)).
Complex amplitude_overlap_f(const SourceSet& sources, const Permutation& rho);

}  // namespace mbcs
