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

#include "phobic/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace phobic {

namespace {

constexpr int kMaxJacobiSweeps = 100;

void require_square(std::size_t rows, std::size_t cols, const char *what) {
    if (rows != cols) {
        throw ShapeError(std::string(what) + ": matrix is not square");
    }
}

}  // namespace

bool is_symmetric(const RealMatrix &m, double tol) {
    if (!m.is_square()) {
        return false;
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = i + 1; j < m.cols(); ++j) {
            if (std::abs(m(i, j) - m(j, i)) > tol) {
                return false;
            }
        }
    }
    return true;
}

SymmetricEigen symmetric_eigen(const RealMatrix &s) {
    require_square(s.rows(), s.cols(), "symmetric_eigen");
    if (!is_symmetric(s)) {
        throw ShapeError("symmetric_eigen: matrix is not symmetric");
    }
    const std::size_t n = s.rows();
    RealMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a(i, j) = 0.5 * (s(i, j) + s(j, i));
        }
    }
    RealMatrix v = RealMatrix::identity(n);

    double frob2 = 0.0;
    for (double x : a.data()) {
        frob2 += x * x;
    }
    const double stop = frob2 * 1e-32;

    for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += a(p, q) * a(p, q);
            }
        }
        if (off <= stop) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

    SymmetricEigen out{std::vector<double>(n), RealMatrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) {
            out.vectors(i, k) = v(i, order[k]);
        }
    }
    return out;
}

double sigma_max(const RealMatrix &m) {
    if (m.empty()) {
        throw DimensionError("sigma_max: empty matrix");
    }
    // Gram matrix on the smaller side.
    const RealMatrix gram = m.rows() <= m.cols() ? m * m.transpose() : m.transpose() * m;
    const auto eig = symmetric_eigen(gram);
    return std::sqrt(std::max(0.0, eig.values.back()));
}

RealMatrix psd_sqrt(const RealMatrix &s) {
    require_square(s.rows(), s.cols(), "psd_sqrt");
    const auto eig = symmetric_eigen(s);
    const std::size_t n = s.rows();
    if (n > 0 && eig.values.front() < -kPsdTol) {
        throw NumericalError("psd_sqrt: matrix is not positive semidefinite (eigenvalue " +
                             std::to_string(eig.values.front()) + ")");
    }
    RealMatrix q(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double root = std::sqrt(std::max(0.0, eig.values[k]));
        if (root == 0.0) {
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double vi = eig.vectors(i, k) * root;
            for (std::size_t j = 0; j < n; ++j) {
                q(i, j) += vi * eig.vectors(j, k);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (q(i, j) + q(j, i));
            q(i, j) = avg;
            q(j, i) = avg;
        }
    }
    return q;
}

TakagiResult takagi_real_symmetric(const RealMatrix &a) {
    require_square(a.rows(), a.cols(), "takagi_real_symmetric");
    if (!is_symmetric(a)) {
        throw ShapeError("takagi_real_symmetric: matrix is not symmetric");
    }
    const auto eig = symmetric_eigen(a);
    const std::size_t n = a.rows();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return std::abs(eig.values[x]) > std::abs(eig.values[y]); });

    TakagiResult out{ComplexMatrix(n, n), std::vector<double>(n)};
    for (std::size_t k = 0; k < n; ++k) {
        const double e = eig.values[order[k]];
        out.lambdas[k] = std::abs(e);
        // A negative eigenvalue is absorbed by the phase i: (i v)(i v)^T = -v v^T.
        const Complex phase = e < 0.0 ? Complex(0.0, 1.0) : Complex(1.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            out.unitary(i, k) = phase * eig.vectors(i, order[k]);
        }
    }
    return out;
}

bool validate_unitary(const ComplexMatrix &u, double tol) {
    require_square(u.rows(), u.cols(), "validate_unitary");
    const std::size_t n = u.rows();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            Complex acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                acc += std::conj(u(k, i)) * u(k, j);
            }
            if (i == j) {
                acc -= 1.0;
            }
            if (std::abs(acc) > tol) {
                return false;
            }
        }
    }
    return true;
}

bool validate_unitary(const RealMatrix &u, double tol) {
    require_square(u.rows(), u.cols(), "validate_unitary");
    const RealMatrix gram = u.transpose() * u;
    return max_abs_diff(gram, RealMatrix::identity(u.rows())) <= tol;
}

template <typename T>
T determinant(Matrix<T> m) {
    require_square(m.rows(), m.cols(), "determinant");
    const std::size_t n = m.rows();
    T det{1};
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(m(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(m(r, col)) > best) {
                best = std::abs(m(r, col));
                pivot = r;
            }
        }
        if (best == 0.0) {
            return T{0};
        }
        if (pivot != col) {
            for (std::size_t j = col; j < n; ++j) {
                std::swap(m(col, j), m(pivot, j));
            }
            det = -det;
        }
        const T diag = m(col, col);
        det *= diag;
        for (std::size_t r = col + 1; r < n; ++r) {
            const T factor = m(r, col) / diag;
            if (factor == T{0}) {
                continue;
            }
            for (std::size_t j = col + 1; j < n; ++j) {
                m(r, j) -= factor * m(col, j);
            }
        }
    }
    return det;
}

template <typename T>
Matrix<T> inverse(const Matrix<T> &input) {
    require_square(input.rows(), input.cols(), "inverse");
    const std::size_t n = input.rows();
    Matrix<T> m = input;
    Matrix<T> inv = Matrix<T>::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(m(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(m(r, col)) > best) {
                best = std::abs(m(r, col));
                pivot = r;
            }
        }
        if (best < 1e-300) {
            throw NumericalError("inverse: matrix is singular");
        }
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m(col, j), m(pivot, j));
                std::swap(inv(col, j), inv(pivot, j));
            }
        }
        const T diag = m(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            m(col, j) /= diag;
            inv(col, j) /= diag;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) {
                continue;
            }
            const T factor = m(r, col);
            if (factor == T{0}) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                m(r, j) -= factor * m(col, j);
                inv(r, j) -= factor * inv(col, j);
            }
        }
    }
    return inv;
}

template double determinant<double>(RealMatrix);
template Complex determinant<Complex>(ComplexMatrix);
template RealMatrix inverse<double>(const RealMatrix &);
template ComplexMatrix inverse<Complex>(const ComplexMatrix &);

}  // namespace phobic
