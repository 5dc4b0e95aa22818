#include "mbcs/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mbcs {

PortSample::PortSample(std::vector<int> ports) : ports_(std::move(ports)) {
    if (ports_.empty()) {
        throw ValidationError("port sample must contain at least one port");
    }
    for (int p : ports_) {
        if (p < 1) throw ValidationError("port indices are 1-based");
    }
    std::sort(ports_.begin(), ports_.end());
}

std::vector<std::pair<int, int>> PortSample::multiplicities() const {
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < ports_.size();) {
        std::size_t j = i;
        while (j < ports_.size() && ports_[j] == ports_[i]) ++j;
        out.emplace_back(ports_[i], static_cast<int>(j - i));
        i = j;
    }
    return out;
}

double PortSample::bunching_factor() const {
    double f = 1.0;
    for (const auto& [port, n] : multiplicities()) {
        for (int k = 2; k <= n; ++k) f *= k;
    }
    return f;
}

void SourceSet::validate(int m) const {
    if (ports.empty()) throw ValidationError("source set must not be empty");
    if (ports.size() != profiles.size()) {
        throw ValidationError("source ports and profiles must have equal length");
    }
    std::vector<int> sorted = ports;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ValidationError("source ports must be pairwise distinct");
    }
    for (int p : ports) {
        if (p < 1 || (m > 0 && p > m)) {
            throw ValidationError("source port " + std::to_string(p) + " out of range");
        }
    }
    if (m > 0 && static_cast<int>(ports.size()) > m) {
        throw ValidationError("more sources than interferometer ports");
    }
    for (const auto& profile : profiles) profile.validate();
}

DetectionSample DetectionSample::make(std::vector<int> ports, std::vector<double> times,
                                      std::vector<PolarizationVector> polarizations) {
    if (ports.size() != times.size() || ports.size() != polarizations.size()) {
        throw ValidationError("detection ports, times and polarizations must have equal length");
    }
    // Co-sort by port so the lists stay aligned with the canonical order.
    std::vector<std::size_t> order(ports.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return ports[a] < ports[b]; });
    DetectionSample sample;
    std::vector<int> sorted_ports(ports.size());
    sample.times.resize(ports.size());
    sample.polarizations.resize(ports.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        sorted_ports[k] = ports[order[k]];
        sample.times[k] = times[order[k]];
        sample.polarizations[k] = polarizations[order[k]];
    }
    sample.ports = PortSample(std::move(sorted_ports));
    return sample;
}

bool is_permutation_of_n(const Permutation& p, int n) {
    if (static_cast<int>(p.size()) != n) return false;
    std::vector<bool> seen(n, false);
    for (int v : p) {
        if (v < 0 || v >= n || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

}  // namespace mbcs
