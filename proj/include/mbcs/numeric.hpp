#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "mbcs/types.hpp"

namespace mbcs {

// Execution policy for the data-parallel kernels. Serial paths are kept as
// reference implementations and for the benchmark target.
enum class Exec { serial, parallel };

// Neumaier compensated accumulator; bounds error growth when summing the
// 2^n Ryser terms and the N! permutation terms.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + comp; }
};

struct CompensatedComplexSum {
    CompensatedSum re, im;

    void add(const Complex& v) {
        re.add(v.real());
        im.add(v.imag());
    }
    Complex value() const { return {re.value(), im.value()}; }
};

// Splits [0, total) into `num_chunks` ranges, evaluates `fn(begin, end)` for
// each and returns the partial results indexed by chunk. The chunk count must
// be derived from the problem size only, so that combining the partials in
// chunk order yields thread-count-independent results.
template <typename T, typename ChunkFn>
std::vector<T> map_chunks(std::size_t total, std::size_t num_chunks, Exec exec, ChunkFn&& fn) {
    if (num_chunks < 1) num_chunks = 1;
    if (num_chunks > total && total > 0) num_chunks = total;
    std::vector<T> partials(num_chunks);
    const auto chunk_begin = [&](std::size_t c) { return total * c / num_chunks; };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long long c = 0; c < static_cast<long long>(num_chunks); ++c) {
            partials[static_cast<std::size_t>(c)] =
                fn(chunk_begin(static_cast<std::size_t>(c)), chunk_begin(static_cast<std::size_t>(c) + 1));
        }
    } else {
        for (std::size_t c = 0; c < num_chunks; ++c) {
            partials[c] = fn(chunk_begin(c), chunk_begin(c + 1));
        }
    }
    return partials;
}

inline double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

inline double sqr(double x) { return x * x; }

}  // namespace mbcs
