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

// Independent oracles and fixtures shared by the unit tests. Nothing here calls the
// library kernels it is used to check.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "phobic/matrix.hpp"
#include "phobic/rng.hpp"

namespace phobic::testing {

inline RealMatrix random_real(std::size_t r, std::size_t c, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    Rng rng(seed, 77);
    RealMatrix m(r, c);
    for (double &x : m.data()) {
        x = rng.uniform(lo, hi);
    }
    return m;
}

inline ComplexMatrix random_complex(std::size_t n, std::uint64_t seed) {
    Rng rng(seed, 78);
    ComplexMatrix m(n, n);
    for (Complex &x : m.data()) {
        x = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    }
    return m;
}

inline RealMatrix random_symmetric(std::size_t n, std::uint64_t seed) {
    RealMatrix a = random_real(n, n, seed, -1.0, 1.0);
    RealMatrix s(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            s(i, j) = 0.5 * (a(i, j) + a(j, i));
        }
    }
    return s;
}

/// Sum over all N! permutations via std::next_permutation.
template <typename T>
T oracle_permanent(const Matrix<T> &m) {
    std::vector<std::size_t> p(m.rows());
    std::iota(p.begin(), p.end(), 0);
    T total{};
    do {
        T prod{1};
        for (std::size_t i = 0; i < p.size(); ++i) {
            prod *= m(i, p[i]);
        }
        total += prod;
    } while (std::next_permutation(p.begin(), p.end()));
    return total;
}

/// Haf(A) = 1 / (2^(n/2) (n/2)!) * sum over permutations of prod A[s(2i), s(2i+1)].
template <typename T>
T oracle_hafnian(const Matrix<T> &a) {
    const std::size_t n = a.rows();
    if (n % 2 == 1) {
        return T{};
    }
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    T total{};
    do {
        T prod{1};
        for (std::size_t i = 0; i < n; i += 2) {
            prod *= a(p[i], p[i + 1]);
        }
        total += prod;
    } while (std::next_permutation(p.begin(), p.end()));
    double norm = 1.0;
    for (std::size_t k = 1; k <= n / 2; ++k) {
        norm *= 2.0 * static_cast<double>(k);
    }
    return total / norm;
}

/// Largest singular value by power iteration on M^T M.
inline double oracle_sigma_max(const RealMatrix &m) {
    const RealMatrix g = m.transpose() * m;
    std::vector<double> v(g.cols(), 1.0);
    double lambda = 0.0;
    for (int it = 0; it < 20000; ++it) {
        std::vector<double> w(v.size(), 0.0);
        for (std::size_t i = 0; i < g.rows(); ++i) {
            for (std::size_t j = 0; j < g.cols(); ++j) {
                w[i] += g(i, j) * v[j];
            }
        }
        double norm = 0.0;
        for (double x : w) {
            norm += x * x;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            return 0.0;
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = w[i] / norm;
        }
        if (std::abs(norm - lambda) <= 1e-15 * norm) {
            lambda = norm;
            break;
        }
        lambda = norm;
    }
    return std::sqrt(lambda);
}

/// Output distribution of a linear network by expanding prod_j (sum_i U[i][j] a_i^dagger)
/// over the input photons and collecting monomials.
inline std::map<std::vector<int>, double> oracle_fock_distribution(const RealMatrix &u, const std::vector<int> &input) {
    std::vector<std::size_t> photons;
    for (std::size_t j = 0; j < input.size(); ++j) {
        photons.insert(photons.end(), static_cast<std::size_t>(input[j]), j);
    }
    const std::size_t m = u.rows();
    std::map<std::vector<int>, double> amp;
    std::vector<std::size_t> target(photons.size(), 0);
    while (true) {
        double a = 1.0;
        std::vector<int> counts(m, 0);
        for (std::size_t k = 0; k < photons.size(); ++k) {
            a *= u(target[k], photons[k]);
            ++counts[target[k]];
        }
        amp[counts] += a;
        std::size_t k = 0;
        while (k < target.size() && ++target[k] == m) {
            target[k++] = 0;
        }
        if (k == target.size()) {
            break;
        }
    }
    auto fact = [](int n) {
        double f = 1.0;
        for (int i = 2; i <= n; ++i) {
            f *= i;
        }
        return f;
    };
    double in_norm = 1.0;
    for (int n : input) {
        in_norm *= fact(n);
    }
    std::map<std::vector<int>, double> out;
    for (const auto &[counts, a] : amp) {
        double out_norm = 1.0;
        for (int n : counts) {
            out_norm *= fact(n);
        }
        // |coef|^2 * prod n_i! / prod n_j!
        out[counts] = a * a * out_norm / in_norm;
    }
    return out;
}

template <typename T>
double rel_err(T got, T want) {
    const double scale = std::max(1.0, std::abs(want));
    return std::abs(got - want) / scale;
}

}  // namespace phobic::testing
