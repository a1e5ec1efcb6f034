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

#include "phobic/gbs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "phobic/matrix_functions.hpp"
#include "phobic/parallel.hpp"

namespace phobic {

namespace {

double product_sech(std::span<const double> r) {
    double p = 1.0;
    for (double x : r) {
        p /= std::cosh(x);
    }
    return p;
}

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) {
        f *= k;
    }
    return f;
}

std::vector<std::size_t> doubled_indices(std::uint64_t mask, std::size_t m) {
    std::vector<std::size_t> idx;
    for (std::size_t z = 0; z < m; ++z) {
        if ((mask >> z) & 1U) {
            idx.push_back(z);
        }
    }
    const std::size_t half = idx.size();
    for (std::size_t t = 0; t < half; ++t) {
        idx.push_back(idx[t] + m);
    }
    return idx;
}

// 1 / sqrt(det(I - O_ZZ)) over both halves of the subset.
double inverse_sqrt_det_complement(const RealMatrix &o, std::size_t m, std::uint64_t mask) {
    const auto idx = doubled_indices(mask, m);
    RealMatrix block = submatrix(o, std::span<const std::size_t>(idx), std::span<const std::size_t>(idx));
    for (auto &v : block.data()) {
        v = -v;
    }
    for (std::size_t d = 0; d < block.rows(); ++d) {
        block(d, d) += 1.0;
    }
    const double det = determinant(block);
    if (!(det > 1e-300)) {
        throw NumericalError("threshold_distribution: I - O_ZZ is singular");
    }
    return 1.0 / std::sqrt(det);
}

}  // namespace

std::vector<bool> ClickPattern::clicks() const {
    std::vector<bool> out(modes);
    for (std::size_t i = 0; i < modes; ++i) {
        out[i] = clicked(i);
    }
    return out;
}

ClickPattern ThresholdDistribution::argmax() const {
    // First maximum wins, i.e. the numerically smallest mask.
    const auto it = std::max_element(probabilities.begin(), probabilities.end());
    return ClickPattern{static_cast<std::uint64_t>(it - probabilities.begin()), modes};
}

RealMatrix build_adjacency(const RealMatrix &d) {
    const std::size_t d1 = d.rows();
    const std::size_t d2 = d.cols();
    RealMatrix adj(d1 + d2, d1 + d2);
    for (std::size_t i = 0; i < d1; ++i) {
        for (std::size_t j = 0; j < d2; ++j) {
            adj(i, d1 + j) = d(i, j);
            adj(d1 + j, i) = d(i, j);
        }
    }
    return adj;
}

double mean_photon_number(double c, std::span<const double> lambdas) {
    double n = 0.0;
    for (double l : lambdas) {
        const double x = c * l;
        n += x * x / (1.0 - x * x);
    }
    return n;
}

double solve_scaling(std::span<const double> lambdas, double nbar_target) {
    if (!(nbar_target > 0.0)) {
        throw DomainError("solve_scaling: target mean photon number must be positive");
    }
    const double lmax = lambdas.empty() ? 0.0 : *std::max_element(lambdas.begin(), lambdas.end());
    if (!(lmax > 0.0)) {
        throw DomainError("solve_scaling: all Takagi values are zero, nothing to squeeze");
    }
    double lo = 0.0;
    double hi = (1.0 - kScalingMargin) / lmax;
    if (mean_photon_number(hi, lambdas) <= nbar_target) {
        return hi;
    }
    for (int it = 0; it < 2000; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (mean_photon_number(mid, lambdas) < nbar_target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double rlo = std::abs(mean_photon_number(lo, lambdas) - nbar_target);
    const double rhi = std::abs(mean_photon_number(hi, lambdas) - nbar_target);
    return rlo <= rhi ? lo : hi;
}

std::vector<double> squeezing_params(double c, std::span<const double> lambdas) {
    std::vector<double> r(lambdas.size());
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const double x = c * lambdas[i];
        if (x >= 1.0 || x < 0.0) {
            throw DomainError("squeezing_params: c * lambda = " + std::to_string(x) + " outside [0, 1)");
        }
        r[i] = std::atanh(x);
    }
    return r;
}

double resolve_nbar(double nbar, NbarInterpretation interp, std::size_t modes) {
    return interp == NbarInterpretation::per_mode ? nbar * static_cast<double>(modes) : nbar;
}

GBSProgram make_program_from_symmetric(const RealMatrix &a, double nbar_total, std::size_t d1, std::size_t d2) {
    GBSProgram prog;
    prog.takagi = takagi_real_symmetric(a);
    prog.c = solve_scaling(prog.takagi.lambdas, nbar_total);
    prog.r = squeezing_params(prog.c, prog.takagi.lambdas);
    prog.b = prog.c * a;
    prog.d1 = d1;
    prog.d2 = d2;
    prog.nbar_target = nbar_total;

    // B must equal U diag(c lambda) U^T.
    const std::size_t n = a.rows();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            Complex acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                acc += prog.takagi.unitary(i, k) * (prog.c * prog.takagi.lambdas[k]) * prog.takagi.unitary(j, k);
            }
            worst = std::max(worst, std::abs(acc - prog.b(i, j)));
        }
    }
    if (worst > kReconstructionTol) {
        throw NumericalError("make_program: Takagi reconstruction error " + std::to_string(worst));
    }
    return prog;
}

GBSProgram make_program(const RealMatrix &d, double nbar, NbarInterpretation interp) {
    const RealMatrix adj = build_adjacency(d);
    return make_program_from_symmetric(adj, resolve_nbar(nbar, interp, adj.rows()), d.rows(), d.cols());
}

double pnr_probability(const GBSProgram &prog, const FockState &pattern) {
    if (pattern.modes() != prog.modes()) {
        throw DimensionError("pnr_probability: pattern length does not match program modes");
    }
    const int n = pattern.total();
    if (n % 2 == 1) {
        return 0.0;
    }
    if (static_cast<std::size_t>(n) > kMaxHafnianOrder) {
        throw CapacityError("pnr_probability: " + std::to_string(n) + " photons exceeds the hafnian cap");
    }
    const RealMatrix sub = select_submatrix(prog.b, SubmatrixSpec{pattern.counts, pattern.counts});
    const double haf = hafnian(sub);
    double norm = 1.0;
    for (int c : pattern.counts) {
        norm *= factorial(c);
    }
    return product_sech(prog.r) * haf * haf / norm;
}

HusimiForm husimi_form(const GBSProgram &prog) {
    const std::size_t m = prog.modes();
    HusimiForm h;
    h.o = RealMatrix(2 * m, 2 * m);
    // X [[B, 0], [0, conj B]] = [[0, conj B], [B, 0]]; B is real here.
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            h.o(i, m + j) = prog.b(i, j);
            h.o(m + i, j) = prog.b(i, j);
        }
    }
    const RealMatrix q_inv = RealMatrix::identity(2 * m) - h.o;
    const double det = determinant(q_inv);
    if (!(det > 0.0)) {
        throw NumericalError("husimi_form: I - O is not positive definite");
    }
    h.sqrt_det_sigma_q_inv = std::sqrt(det);
    h.sigma_q = inverse(q_inv);

    const double vacuum = h.sqrt_det_sigma_q_inv;
    const double expected = product_sech(prog.r);
    if (std::abs(vacuum - expected) > 1e-9) {
        throw NumericalError("husimi_form: vacuum probability " + std::to_string(vacuum) +
                             " disagrees with prod sech r = " + std::to_string(expected));
    }
    return h;
}

double click_probability(const HusimiForm &h, const ClickPattern &pattern) {
    const std::size_t m = h.o.rows() / 2;
    if (pattern.modes != m) {
        throw DimensionError("click_probability: pattern length does not match program modes");
    }
    const auto idx = doubled_indices(pattern.mask, m);
    const RealMatrix os = submatrix(h.o, std::span<const std::size_t>(idx), std::span<const std::size_t>(idx));
    return torontonian(os) * h.sqrt_det_sigma_q_inv;
}

ThresholdDistribution threshold_distribution(const GBSProgram &prog) {
    const std::size_t m = prog.modes();
    if (m > kMaxThresholdModes) {
        throw CapacityError("threshold_distribution: " + std::to_string(m) + " modes exceeds cap " +
                            std::to_string(kMaxThresholdModes) + "; use chain_rule_sample");
    }
    const HusimiForm h = husimi_form(prog);
    const std::uint64_t total = std::uint64_t{1} << m;

    // q[Z] = 1 / sqrt(det(I - O_ZZ)); the torontonian of every O_S is a signed subset
    // sum of q, so one Moebius transform yields all 2^m patterns.
    std::vector<double> q(total);
    parallel::ExceptionCollector errors;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t z = 0; z < static_cast<std::int64_t>(total); ++z) {
        errors.run([&] {
            q[static_cast<std::size_t>(z)] = inverse_sqrt_det_complement(h.o, m, static_cast<std::uint64_t>(z));
        });
    }
    errors.rethrow();
    for (std::size_t bit = 0; bit < m; ++bit) {
        const std::uint64_t b = std::uint64_t{1} << bit;
        for (std::uint64_t s = 0; s < total; ++s) {
            if (s & b) {
                q[s] -= q[s ^ b];
            }
        }
    }
    ThresholdDistribution out{m, std::move(q)};
    for (auto &p : out.probabilities) {
        p *= h.sqrt_det_sigma_q_inv;
    }
    return out;
}

ClickSampler::ClickSampler(const GBSProgram &prog) : ClickSampler(husimi_form(prog)) {}

ClickSampler::ClickSampler(HusimiForm form) : form_(std::move(form)), modes_(form_.o.rows() / 2) {
    if (modes_ > kMaxClickModes) {
        throw CapacityError("ClickSampler: too many modes");
    }
}

double ClickSampler::vacuum_probability(std::uint64_t subset) {
    if (subset == 0) {
        return 1.0;
    }
    if (auto it = vacuum_.find(subset); it != vacuum_.end()) {
        return it->second;
    }
    const auto idx = doubled_indices(subset, modes_);
    const RealMatrix block =
        submatrix(form_.sigma_q, std::span<const std::size_t>(idx), std::span<const std::size_t>(idx));
    const double det = determinant(block);
    if (!(det > 0.0)) {
        throw NumericalError("ClickSampler: reduced sigma_Q is not positive definite");
    }
    const double v = 1.0 / std::sqrt(det);
    vacuum_.emplace(subset, v);
    return v;
}

double ClickSampler::prefix_probability(std::size_t k, std::uint64_t mask) {
    const std::uint64_t key = mask | (std::uint64_t{1} << k);
    if (auto it = prefix_.find(key); it != prefix_.end()) {
        return it->second;
    }
    const std::uint64_t window = k == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
    const std::uint64_t dark = window & ~mask;
    // Inclusion-exclusion over which clicked modes are forced dark.
    double p = 0.0;
    std::uint64_t t = 0;
    do {
        const double term = vacuum_probability(dark | t);
        p += (std::popcount(t) % 2 == 0) ? term : -term;
        t = (t - mask) & mask;
    } while (t != 0);
    prefix_.emplace(key, p);
    return p;
}

ClickPattern ClickSampler::draw(Rng &rng, double *path_probability) {
    std::uint64_t mask = 0;
    double prefix = 1.0;
    for (std::size_t k = 0; k < modes_; ++k) {
        const double dark = prefix_probability(k + 1, mask);
        double p_click = prefix > 0.0 ? 1.0 - dark / prefix : 0.0;
        // Both prefix values are signed sums of 2^|mask| vacuum terms of order one, so
        // their absolute rounding error grows with the number of clicks so far.
        const double noise = kInclusionExclusionEps * std::ldexp(1.0, std::popcount(mask) + 1);
        const double tol = kConditionalTol + (prefix > 0.0 ? noise / prefix : 0.0);
        if (p_click < -tol || p_click > 1.0 + tol) {
            throw NumericalError("ClickSampler: conditional click probability " + std::to_string(p_click) +
                                 " outside [0, 1]");
        }
        p_click = std::clamp(p_click, 0.0, 1.0);
        if (rng.uniform() < p_click) {
            mask |= std::uint64_t{1} << k;
            prefix -= dark;
        } else {
            prefix = dark;
        }
    }
    if (path_probability != nullptr) {
        *path_probability = prefix;
    }
    return ClickPattern{mask, modes_};
}

std::vector<ClickPattern> chain_rule_sample(const GBSProgram &prog, std::size_t num_samples, std::uint64_t seed) {
    const HusimiForm form = husimi_form(prog);
    std::vector<ClickPattern> out(num_samples);
    const std::size_t blocks = (num_samples + kClickSampleBlock - 1) / kClickSampleBlock;
    parallel::ExceptionCollector errors;
#pragma omp parallel
    {
        ClickSampler sampler(form);
#pragma omp for schedule(static)
        for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
            errors.run([&] {
                Rng rng(seed, static_cast<std::uint64_t>(b));
                const std::size_t begin = static_cast<std::size_t>(b) * kClickSampleBlock;
                const std::size_t end = std::min(num_samples, begin + kClickSampleBlock);
                for (std::size_t s = begin; s < end; ++s) {
                    out[s] = sampler.draw(rng);
                }
            });
        }
    }
    errors.rethrow();
    return out;
}

DecodedClicks decode_clicks(const ClickPattern &pattern, std::size_t d1, std::size_t d2) {
    if (pattern.modes != d1 + d2) {
        throw DimensionError("decode_clicks: pattern length is not d1 + d2");
    }
    DecodedClicks out;
    for (std::size_t i = 0; i < d1; ++i) {
        if (pattern.clicked(i)) {
            out.rows.push_back(i);
        }
    }
    for (std::size_t j = 0; j < d2; ++j) {
        if (pattern.clicked(d1 + j)) {
            out.cols.push_back(j);
        }
    }
    return out;
}

}  // namespace phobic
