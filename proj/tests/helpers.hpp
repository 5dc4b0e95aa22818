#pragma once

#include <random>

#include "mbcs/types.hpp"

namespace mbcs::test {

// Random Gaussian profile in the regime the closed forms are validated over:
// bandwidths in [0.5, 2], emission times within ±5 inverse bandwidths, colors
// well inside the narrow-bandwidth regime with offsets up to 10 bandwidths.
inline SpectralProfile random_profile(std::mt19937_64& rng, bool random_polarization = false) {
    std::uniform_real_distribution<double> bw(0.5, 2.0);
    std::uniform_real_distribution<double> t0(-5.0, 5.0);
    std::uniform_real_distribution<double> dw0(0.0, 10.0);
    std::uniform_real_distribution<double> angle(0.0, 1.5707963267948966);
    SpectralProfile profile;
    profile.bandwidth = bw(rng);
    profile.central_frequency = 60.0 + dw0(rng);
    profile.emission_time = t0(rng);
    profile.polarization = random_polarization ? PolarizationVector::linear(angle(rng))
                                               : PolarizationVector::e1();
    return profile;
}

inline SpectralProfile gaussian_photon(double bandwidth, double color, double emission_time,
                                       PolarizationVector pol = PolarizationVector::e1()) {
    SpectralProfile profile;
    profile.bandwidth = bandwidth;
    profile.central_frequency = color;
    profile.emission_time = emission_time;
    profile.polarization = pol;
    return profile;
}

inline Permutation random_permutation(int n, std::mt19937_64& rng) {
    Permutation p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    std::shuffle(p.begin(), p.end(), rng);
    return p;
}

}  // namespace mbcs::test
