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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "phobic/matrix_functions.hpp"
#include "phobic/numerics.hpp"
#include "phobic/parallel.hpp"

namespace phobic {

namespace {

std::size_t check_torontonian_input(std::size_t rows, std::size_t cols) {
    if (rows != cols) {
        throw ShapeError("torontonian: matrix is not square");
    }
    if (rows % 2 != 0) {
        throw ShapeError("torontonian: dimension must be even");
    }
    const std::size_t k = rows / 2;
    if (k > kMaxTorontonianModes) {
        throw CapacityError("torontonian: " + std::to_string(k) + " modes exceeds cap");
    }
    return k;
}

double inverse_sqrt_det(const Matrix<double> &m) {
    const double det = determinant(m);
    if (!(det > 1e-300)) {
        throw NumericalError("torontonian: I - O_ZZ is singular or indefinite (det " + std::to_string(det) + ")");
    }
    return 1.0 / std::sqrt(det);
}

double inverse_sqrt_det(const Matrix<Complex> &m) {
    const Complex det = determinant(m);
    if (std::abs(det) < 1e-300) {
        throw NumericalError("torontonian: I - O_ZZ is singular");
    }
    return std::real(1.0 / std::sqrt(det));
}

// (-1)^(k-|Z|) / sqrt(det(I - O_ZZ)) for the mode subset encoded by `mask`.
template <typename T>
double subset_term(const Matrix<T> &o, std::size_t k, std::uint64_t mask) {
    const int size = std::popcount(mask);
    std::vector<std::size_t> idx;
    idx.reserve(2 * static_cast<std::size_t>(size));
    for (std::size_t z = 0; z < k; ++z) {
        if ((mask >> z) & 1U) {
            idx.push_back(z);
        }
    }
    for (int t = 0; t < size; ++t) {
        idx.push_back(idx[static_cast<std::size_t>(t)] + k);
    }
    Matrix<T> block = submatrix(o, std::span<const std::size_t>(idx), std::span<const std::size_t>(idx));
    for (auto &v : block.data()) {
        v = -v;
    }
    for (std::size_t d = 0; d < block.rows(); ++d) {
        block(d, d) += T{1};
    }
    const double sign = ((k - static_cast<std::size_t>(size)) % 2 == 0) ? 1.0 : -1.0;
    return sign * inverse_sqrt_det(block);
}

template <typename T>
double subset_range_sum(const Matrix<T> &o, std::size_t k, std::uint64_t first, std::uint64_t last) {
    double acc = 0.0;
    for (std::uint64_t mask = first; mask < last; ++mask) {
        acc += subset_term(o, k, mask);
    }
    return acc;
}

}  // namespace

namespace reference {

template <typename T>
double torontonian_serial(const Matrix<T> &o) {
    const std::size_t k = check_torontonian_input(o.rows(), o.cols());
    return subset_range_sum(o, k, 0, std::uint64_t{1} << k);
}

template double torontonian_serial<double>(const RealMatrix &);
template double torontonian_serial<Complex>(const ComplexMatrix &);

}  // namespace reference

template <typename T>
double torontonian(const Matrix<T> &o) {
    const std::size_t k = check_torontonian_input(o.rows(), o.cols());
    const std::uint64_t total = std::uint64_t{1} << k;
    const std::uint64_t chunks = k <= 8 ? 1 : std::min<std::uint64_t>(256, total);
    std::vector<double> partial(chunks);
    if (chunks == 1) {
        partial[0] = subset_range_sum(o, k, 0, total);
    } else {
        parallel::ExceptionCollector errors;
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
            errors.run([&] {
                const auto r = parallel::chunk_range(total, chunks, static_cast<std::uint64_t>(c));
                partial[c] = subset_range_sum(o, k, r.begin, r.end);
            });
        }
        errors.rethrow();
    }
    return parallel::pairwise_sum(partial);
}

template double torontonian<double>(const RealMatrix &);
template double torontonian<Complex>(const ComplexMatrix &);

}  // namespace phobic
