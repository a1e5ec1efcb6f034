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

#include <vector>

#include "phobic/matrix.hpp"

namespace phobic {

inline constexpr double kSymmetryTol = 1e-10;
inline constexpr double kUnitaryTol = 1e-8;
inline constexpr double kReconstructionTol = 1e-8;
// Eigenvalues of a PSD input may dip this far below zero before it counts as indefinite.
inline constexpr double kPsdTol = 1e-10;

/// Eigenpairs of a real symmetric matrix. Column k of `vectors` pairs with `values[k]`;
/// values are ascending.
struct SymmetricEigen {
    std::vector<double> values;
    RealMatrix vectors;
};

/// Autonne-Takagi factors of a real symmetric A: A = unitary * diag(lambdas) * unitary^T,
/// lambdas non-negative and descending.
struct TakagiResult {
    ComplexMatrix unitary;
    std::vector<double> lambdas;
};

bool is_symmetric(const RealMatrix &m, double tol = kSymmetryTol);

/// Cyclic Jacobi eigensolver. Throws ShapeError on non-square or asymmetric input.
SymmetricEigen symmetric_eigen(const RealMatrix &s);

double sigma_max(const RealMatrix &m);

/// Principal square root of a symmetric positive semidefinite matrix. Eigenvalues in
/// [-kPsdTol, 0) are clamped to zero; anything more negative raises NumericalError.
RealMatrix psd_sqrt(const RealMatrix &s);

TakagiResult takagi_real_symmetric(const RealMatrix &a);

/// True iff max|U^dagger U - I| <= tol.
bool validate_unitary(const ComplexMatrix &u, double tol = kUnitaryTol);
bool validate_unitary(const RealMatrix &u, double tol = kUnitaryTol);

/// LU determinant with partial pivoting; det of the 0x0 matrix is 1.
template <typename T>
T determinant(Matrix<T> m);

/// Gauss-Jordan inverse with partial pivoting. Throws NumericalError when singular.
template <typename T>
Matrix<T> inverse(const Matrix<T> &m);

}  // namespace phobic
