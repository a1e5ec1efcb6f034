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

#pragma once

#include <cstddef>
#include <vector>

#include "phobic/matrix.hpp"

namespace phobic {

enum class PermanentMethod { gray_code, naive };

inline constexpr std::size_t kMaxGrayCodeOrder = 24;
inline constexpr std::size_t kMaxNaiveOrder = 9;
inline constexpr std::size_t kMaxHafnianOrder = 16;
inline constexpr std::size_t kMaxTorontonianModes = 30;

/// Row/column repetition counts used to build the n x n matrices whose permanent or
/// hafnian gives a Fock-state amplitude.
struct SubmatrixSpec {
    std::vector<int> row_multiplicities;
    std::vector<int> col_multiplicities;
};

/// Permanent of a square matrix. gray_code is Glynn's formula in Gray-code order,
/// parallelised over fixed chunks; naive sums all N! permutations.
/// Per of the 0x0 matrix is 1.
template <typename T>
T permanent(const Matrix<T> &m, PermanentMethod method = PermanentMethod::gray_code);

/// Sum over perfect matchings of a symmetric matrix; diagonal ignored, odd order gives 0.
template <typename T>
T hafnian(const Matrix<T> &a);

/// Torontonian of a 2k x 2k matrix O in the doubled (a, a^dagger) basis:
///   sum over Z subset of {0..k-1} of (-1)^(k-|Z|) / sqrt(det(I - O_ZZ)),
/// where O_ZZ keeps indices z and z+k for every z in Z.
template <typename T>
double torontonian(const Matrix<T> &o);

/// Repeats row i row_multiplicities[i] times and column j col_multiplicities[j] times,
/// in ascending index order.
template <typename T>
Matrix<T> select_submatrix(const Matrix<T> &m, const SubmatrixSpec &spec);

/// Serial kernels. They define the numbers the parallel kernels must reproduce and are
/// what the benchmarks compare against.
namespace reference {

template <typename T>
T permanent_naive(const Matrix<T> &m);

/// Glynn/Gray-code permanent over a single contiguous pass.
template <typename T>
T permanent_glynn_serial(const Matrix<T> &m);

template <typename T>
double torontonian_serial(const Matrix<T> &o);

}  // namespace reference

}  // namespace phobic
