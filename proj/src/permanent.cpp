#include "mbcs/permanent.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <vector>

namespace mbcs {

namespace {

// Chunk count for splitting the 2^n−1 subset range; a function of n only so
// the reduction order is reproducible.
std::size_t ryser_chunks(int n) {
    if (n < 16) return 1;
    return std::min<std::size_t>(256, std::size_t{1} << (n - 15));
}

// Partial Ryser sum over subset indices k in [begin, end), 1 <= k < 2^n.
// Subsets are visited in Gray-code order, gray(k) = k ^ (k >> 1); entering a
// chunk costs one O(n²) row-sum rebuild.
Complex ryser_range(const Eigen::MatrixXcd& a, std::uint64_t begin, std::uint64_t end) {
    const int n = static_cast<int>(a.rows());
    std::vector<Complex> row_sums(n, Complex{0.0, 0.0});
    const std::uint64_t g0 = begin ^ (begin >> 1);
    for (int j = 0; j < n; ++j) {
        if (g0 & (std::uint64_t{1} << j)) {
            for (int i = 0; i < n; ++i) row_sums[i] += a(i, j);
        }
    }
    CompensatedComplexSum acc;
    auto add_term = [&](std::uint64_t gray) {
        Complex prod{1.0, 0.0};
        for (int i = 0; i < n; ++i) prod *= row_sums[i];
        const int popcount = std::popcount(gray);
        acc.add(((n - popcount) & 1) ? -prod : prod);
    };
    add_term(g0);
    for (std::uint64_t k = begin + 1; k < end; ++k) {
        const int j = std::countr_zero(k);
        const std::uint64_t bit = std::uint64_t{1} << j;
        const std::uint64_t gray = k ^ (k >> 1);
        if (gray & bit) {
            for (int i = 0; i < n; ++i) row_sums[i] += a(i, j);
        } else {
            for (int i = 0; i < n; ++i) row_sums[i] -= a(i, j);
        }
        add_term(gray);
    }
    return acc.value();
}

}  // namespace

Complex perm_naive(const Eigen::MatrixXcd& a) {
    const int n = static_cast<int>(a.rows());
    if (n < 1 || a.cols() != n) throw ValidationError("permanent needs a square matrix");
    if (n > limits::max_naive_permanent_dim) {
        throw SizeError("perm_naive limited to n <= " +
                        std::to_string(limits::max_naive_permanent_dim));
    }
    std::vector<int> cols(n);
    std::iota(cols.begin(), cols.end(), 0);
    CompensatedComplexSum acc;
    do {
        Complex prod{1.0, 0.0};
        for (int i = 0; i < n; ++i) prod *= a(i, cols[i]);
        acc.add(prod);
    } while (std::next_permutation(cols.begin(), cols.end()));
    return acc.value();
}

Complex perm_ryser(const Eigen::MatrixXcd& a, Exec exec) {
    const int n = static_cast<int>(a.rows());
    if (n < 1 || a.cols() != n) throw ValidationError("permanent needs a square matrix");
    if (n > limits::max_ryser_permanent_dim) {
        throw SizeError("perm_ryser limited to n <= " +
                        std::to_string(limits::max_ryser_permanent_dim));
    }
    const std::uint64_t total = (std::uint64_t{1} << n) - 1;
    const auto partials = map_chunks<Complex>(
        total, ryser_chunks(n), exec,
        [&](std::size_t begin, std::size_t end) { return ryser_range(a, begin + 1, end + 1); });
    CompensatedComplexSum acc;
    for (const Complex& p : partials) acc.add(p);
    return acc.value();
}

}  // namespace mbcs
