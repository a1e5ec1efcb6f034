/*
 * Copyright 2026 The phobic Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <bit>
#include <cstdint>
#include <string>

#include "phobic/matrix_functions.hpp"
#include "phobic/numerics.hpp"

namespace phobic {

namespace {

// Pairs the lowest unmatched vertex with every other unmatched vertex in turn.
template <typename T>
T matchings(const Matrix<T> &a, std::uint32_t unmatched) {
    if (unmatched == 0) {
        return T{1};
    }
    const int i = std::countr_zero(unmatched);
    std::uint32_t rest = unmatched & (unmatched - 1);
    T total{};
    for (std::uint32_t others = rest; others != 0; others &= others - 1) {
        const int j = std::countr_zero(others);
        const T aij = a(i, j);
        if (aij == T{}) {
            continue;
        }
        total += aij * matchings(a, rest & ~(std::uint32_t{1} << j));
    }
    return total;
}

}  // namespace

template <typename T>
T hafnian(const Matrix<T> &a) {
    if (!a.is_square()) {
        throw ShapeError("hafnian: matrix is not square");
    }
    const std::size_t n = a.rows();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(a(i, j) - a(j, i)) > kSymmetryTol) {
                throw ShapeError("hafnian: matrix is not symmetric");
            }
        }
    }
    if (n % 2 == 1) {
        return T{};
    }
    if (n > kMaxHafnianOrder) {
        throw CapacityError("hafnian: order " + std::to_string(n) + " exceeds cap " +
                            std::to_string(kMaxHafnianOrder));
    }
    const std::uint32_t all = n == 0 ? 0U : static_cast<std::uint32_t>((std::uint64_t{1} << n) - 1);
    return matchings(a, all);
}

template double hafnian<double>(const RealMatrix &);
template Complex hafnian<Complex>(const ComplexMatrix &);

}  // namespace phobic
