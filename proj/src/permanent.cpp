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
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "phobic/matrix_functions.hpp"
#include "phobic/parallel.hpp"

namespace phobic {

namespace {

void check_permanent_input(std::size_t rows, std::size_t cols, std::size_t cap) {
    if (rows != cols) {
        throw ShapeError("permanent: matrix is not square");
    }
    if (rows > cap) {
        throw CapacityError("permanent: order " + std::to_string(rows) + " exceeds cap " + std::to_string(cap));
    }
}

// Glynn sum over Gray-code steps [first, last) of the 2^(n-1) sign vectors. Row 0 keeps
// weight +1; bit b of the Gray code g(k) = k ^ (k >> 1) sets the weight of row b+1 to -1.
template <typename T>
T glynn_partial(const Matrix<T> &m, std::uint64_t first, std::uint64_t last) {
    const std::size_t n = m.rows();
    std::vector<T> colsum(n, T{});
    std::vector<int> weight(n, 1);
    const std::uint64_t gray = first ^ (first >> 1);
    for (std::size_t i = 1; i < n; ++i) {
        if ((gray >> (i - 1)) & 1U) {
            weight[i] = -1;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = m.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            colsum[j] += static_cast<double>(weight[i]) * row[j];
        }
    }
    double sign = (std::popcount(gray) % 2 == 0) ? 1.0 : -1.0;

    T acc{};
    for (std::uint64_t k = first; k < last; ++k) {
        T prod = colsum[0];
        for (std::size_t j = 1; j < n; ++j) {
            prod *= colsum[j];
        }
        acc += sign * prod;
        if (k + 1 < last) {
            const std::size_t i = static_cast<std::size_t>(std::countr_zero(k + 1)) + 1;
            weight[i] = -weight[i];
            const double twice = 2.0 * weight[i];
            const auto row = m.row(i);
            for (std::size_t j = 0; j < n; ++j) {
                colsum[j] += twice * row[j];
            }
            sign = -sign;
        }
    }
    return acc;
}

// Chunk count depends only on the order, never on the thread count.
std::uint64_t glynn_chunks(std::size_t n) { return n <= 12 ? 1 : 256; }

template <typename T>
T permanent_gray_code(const Matrix<T> &m) {
    const std::size_t n = m.rows();
    if (n == 0) {
        return T{1};
    }
    if (n == 1) {
        return m(0, 0);
    }
    const std::uint64_t total = std::uint64_t{1} << (n - 1);
    const std::uint64_t chunks = std::min(glynn_chunks(n), total);
    std::vector<T> partial(chunks);
    if (chunks == 1) {
        partial[0] = glynn_partial(m, 0, total);
    } else {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
            const auto r = parallel::chunk_range(total, chunks, static_cast<std::uint64_t>(c));
            partial[c] = glynn_partial(m, r.begin, r.end);
        }
    }
    return parallel::pairwise_sum(partial) / static_cast<double>(total);
}

}  // namespace

namespace reference {

template <typename T>
T permanent_naive(const Matrix<T> &m) {
    check_permanent_input(m.rows(), m.cols(), kMaxNaiveOrder);
    const std::size_t n = m.rows();
    std::vector<std::size_t> sigma(n);
    std::iota(sigma.begin(), sigma.end(), 0);
    T total{};
    do {
        T prod{1};
        for (std::size_t i = 0; i < n; ++i) {
            prod *= m(i, sigma[i]);
        }
        total += prod;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return total;
}

template <typename T>
T permanent_glynn_serial(const Matrix<T> &m) {
    check_permanent_input(m.rows(), m.cols(), kMaxGrayCodeOrder);
    const std::size_t n = m.rows();
    if (n == 0) {
        return T{1};
    }
    const std::uint64_t total = std::uint64_t{1} << (n - 1);
    return glynn_partial(m, 0, total) / static_cast<double>(total);
}

template double permanent_naive<double>(const RealMatrix &);
template Complex permanent_naive<Complex>(const ComplexMatrix &);
template double permanent_glynn_serial<double>(const RealMatrix &);
template Complex permanent_glynn_serial<Complex>(const ComplexMatrix &);

}  // namespace reference

template <typename T>
T permanent(const Matrix<T> &m, PermanentMethod method) {
    if (method == PermanentMethod::naive) {
        return reference::permanent_naive(m);
    }
    check_permanent_input(m.rows(), m.cols(), kMaxGrayCodeOrder);
    return permanent_gray_code(m);
}

template <typename T>
Matrix<T> select_submatrix(const Matrix<T> &m, const SubmatrixSpec &spec) {
    if (spec.row_multiplicities.size() != m.rows() || spec.col_multiplicities.size() != m.cols()) {
        throw DimensionError("select_submatrix: multiplicity lengths do not match matrix dimensions");
    }
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (spec.row_multiplicities[i] < 0) {
            throw SpecError("select_submatrix: negative row multiplicity");
        }
        rows.insert(rows.end(), static_cast<std::size_t>(spec.row_multiplicities[i]), i);
    }
    for (std::size_t j = 0; j < m.cols(); ++j) {
        if (spec.col_multiplicities[j] < 0) {
            throw SpecError("select_submatrix: negative column multiplicity");
        }
        cols.insert(cols.end(), static_cast<std::size_t>(spec.col_multiplicities[j]), j);
    }
    if (rows.size() != cols.size()) {
        throw SpecError("select_submatrix: row and column multiplicity totals differ");
    }
    return submatrix(m, std::span<const std::size_t>(rows), std::span<const std::size_t>(cols));
}

template double permanent<double>(const RealMatrix &, PermanentMethod);
template Complex permanent<Complex>(const ComplexMatrix &, PermanentMethod);
template RealMatrix select_submatrix<double>(const RealMatrix &, const SubmatrixSpec &);
template ComplexMatrix select_submatrix<Complex>(const ComplexMatrix &, const SubmatrixSpec &);

}  // namespace phobic
