#pragma once

#include <Eigen/Core>

#include "mbcs/numeric.hpp"
#include "mbcs/types.hpp"

namespace mbcs {

// Definition-faithful permanent: sum over all n! permutations. Reference
// engine and correctness oracle; guarded at n <= 10.
Complex perm_naive(const Eigen::MatrixXcd& a);

// Ryser's formula with Gray-code row-sum updates, O(2^n·n); guarded at
// n <= 30. The subset range is split into size-derived chunks whose partial
// sums are combined in fixed order, so parallel results do not depend on the
// thread count and match the serial path bit for bit.
Complex perm_ryser(const Eigen::MatrixXcd& a, Exec exec = Exec::parallel);

}  // namespace mbcs
