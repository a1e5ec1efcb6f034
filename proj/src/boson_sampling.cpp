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

#include "phobic/boson_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "phobic/matrix_functions.hpp"
#include "phobic/numerics.hpp"
#include "phobic/parallel.hpp"
#include "phobic/rng.hpp"

namespace phobic {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) {
        f *= k;
    }
    return f;
}

template <typename C>
double factorial_product(std::span<const C> counts) {
    double f = 1.0;
    for (auto c : counts) {
        f *= factorial(static_cast<int>(c));
    }
    return f;
}

void append_compositions(int remaining, std::size_t mode, std::vector<std::uint8_t> &current,
                         std::vector<std::uint8_t> &out) {
    const std::size_t m = current.size();
    if (mode + 1 == m) {
        current[mode] = static_cast<std::uint8_t>(remaining);
        out.insert(out.end(), current.begin(), current.end());
        return;
    }
    for (int c = 0; c <= remaining; ++c) {
        current[mode] = static_cast<std::uint8_t>(c);
        append_compositions(remaining - c, mode + 1, current, out);
    }
}

}  // namespace

int FockState::total() const noexcept { return std::accumulate(counts.begin(), counts.end(), 0); }

OutcomeDistribution::OutcomeDistribution(std::size_t modes, int total_photons, std::vector<std::uint8_t> counts,
                                         std::vector<double> probabilities)
    : modes_(modes),
      total_photons_(total_photons),
      counts_(std::move(counts)),
      probabilities_(std::move(probabilities)),
      cdf_(probabilities_.size()) {
    if (modes_ * probabilities_.size() != counts_.size()) {
        throw DimensionError("OutcomeDistribution: counts and probabilities disagree in length");
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < probabilities_.size(); ++k) {
        acc += std::max(0.0, probabilities_[k]);
        cdf_[k] = acc;
    }
}

FockState OutcomeDistribution::outcome(std::size_t index) const {
    const auto c = counts(index);
    return FockState{std::vector<int>(c.begin(), c.end())};
}

std::size_t OutcomeDistribution::find(const FockState &state) const {
    if (state.modes() != modes_) {
        return size();
    }
    std::vector<std::uint8_t> key(state.counts.begin(), state.counts.end());
    // Outcomes are sorted lexicographically, so binary search applies.
    std::size_t lo = 0;
    std::size_t hi = size();
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        const auto c = counts(mid);
        if (std::lexicographical_compare(c.begin(), c.end(), key.begin(), key.end())) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    if (lo < size() && std::equal(key.begin(), key.end(), counts(lo).begin())) {
        return lo;
    }
    return size();
}

std::size_t OutcomeDistribution::locate(double u) const {
    const double target = u * cdf_.back();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
    std::size_t idx = static_cast<std::size_t>(it - cdf_.begin());
    if (idx >= size()) {
        idx = size() - 1;
    }
    // Never land on a zero-probability outcome sharing the previous cdf value.
    while (idx > 0 && probabilities_[idx] <= 0.0) {
        --idx;
    }
    return idx;
}

bool PostselectRule::accepts(std::span<const int> counts) const {
    for (std::size_t i = 0; i < d1 && i < counts.size(); ++i) {
        if (counts[i] > tau) {
            return false;
        }
    }
    for (std::size_t i = d1; i < d1 + d2 && i < counts.size(); ++i) {
        if (counts[i] != 0) {
            return false;
        }
    }
    return true;
}

bool PostselectRule::accepts(std::span<const std::uint8_t> counts) const {
    for (std::size_t i = 0; i < d1 && i < counts.size(); ++i) {
        if (counts[i] > tau) {
            return false;
        }
    }
    for (std::size_t i = d1; i < d1 + d2 && i < counts.size(); ++i) {
        if (counts[i] != 0) {
            return false;
        }
    }
    return true;
}

DilatedUnitary dilate(const RealMatrix &d, bool pre_scaled) {
    if (d.empty()) {
        throw DimensionError("dilate: empty dataset");
    }
    for (double v : d.data()) {
        if (!std::isfinite(v)) {
            throw DomainError("dilate: dataset has non-finite entries");
        }
    }
    const std::size_t d1 = d.rows();
    const std::size_t d2 = d.cols();
    double scale = 1.0;
    RealMatrix ds = d;
    if (!pre_scaled) {
        scale = sigma_max(d);
        if (scale == 0.0) {
            throw DomainError("dilate: all-zero dataset has no singular-value scale");
        }
        for (double &v : ds.data()) {
            v /= scale;
        }
    }
    const RealMatrix dst = ds.transpose();
    const RealMatrix top_right = psd_sqrt(RealMatrix::identity(d1) - ds * dst);
    const RealMatrix bottom_left = psd_sqrt(RealMatrix::identity(d2) - dst * ds);

    DilatedUnitary out{RealMatrix(d1 + d2, d1 + d2), d1, d2, scale};
    for (std::size_t i = 0; i < d1; ++i) {
        for (std::size_t j = 0; j < d2; ++j) {
            out.matrix(i, j) = ds(i, j);
            out.matrix(d1 + j, d2 + i) = -ds(i, j);
        }
        for (std::size_t j = 0; j < d1; ++j) {
            out.matrix(i, d2 + j) = top_right(i, j);
        }
    }
    for (std::size_t i = 0; i < d2; ++i) {
        for (std::size_t j = 0; j < d2; ++j) {
            out.matrix(d1 + i, j) = bottom_left(i, j);
        }
    }
    if (!validate_unitary(out.matrix, kUnitaryTol)) {
        throw NumericalError("dilate: dilation failed the unitarity check");
    }
    return out;
}

FockState build_input(std::span<const std::size_t> columns, std::size_t modes) {
    FockState s{std::vector<int>(modes, 0)};
    for (std::size_t c : columns) {
        if (c >= modes) {
            throw BoundsError("build_input: mode " + std::to_string(c) + " out of range");
        }
        if (s.counts[c] != 0) {
            throw BoundsError("build_input: mode " + std::to_string(c) + " listed twice");
        }
        s.counts[c] = 1;
    }
    return s;
}

template <typename T>
double outcome_probability(const Matrix<T> &network, const FockState &input, const FockState &output) {
    if (input.modes() != network.cols() || output.modes() != network.rows()) {
        throw DimensionError("outcome_probability: Fock state length does not match the network");
    }
    if (input.total() != output.total()) {
        throw ConservationError("outcome_probability: input has " + std::to_string(input.total()) +
                                " photons, output has " + std::to_string(output.total()));
    }
    const Matrix<T> sub = select_submatrix(network, SubmatrixSpec{output.counts, input.counts});
    const double amp = std::abs(permanent(sub));
    return amp * amp /
           (factorial_product(std::span<const int>(input.counts)) * factorial_product(std::span<const int>(output.counts)));
}

template double outcome_probability<double>(const RealMatrix &, const FockState &, const FockState &);
template double outcome_probability<Complex>(const ComplexMatrix &, const FockState &, const FockState &);

double outcome_probability(const DilatedUnitary &u, const FockState &input, const FockState &output) {
    return outcome_probability(u.matrix, input, output);
}

std::uint64_t composition_count(int n, std::size_t m) {
    if (m == 0) {
        return n == 0 ? 1 : 0;
    }
    // C(n + m - 1, n) computed incrementally; each partial product is itself a binomial.
    unsigned __int128 c = 1;
    for (int k = 1; k <= n; ++k) {
        c = c * (m - 1 + static_cast<std::size_t>(k)) / static_cast<unsigned>(k);
        if (c > std::numeric_limits<std::uint64_t>::max()) {
            return std::numeric_limits<std::uint64_t>::max();
        }
    }
    return static_cast<std::uint64_t>(c);
}

OutcomeDistribution enumerate_distribution(const RealMatrix &network, const FockState &input) {
    if (!network.is_square() || input.modes() != network.rows()) {
        throw DimensionError("enumerate_distribution: input length does not match the network");
    }
    const std::size_t m = input.modes();
    const int n = input.total();
    if (n > kMaxEnumeratedPhotons) {
        throw CapacityError("enumerate_distribution: " + std::to_string(n) + " photons exceeds cap " +
                            std::to_string(kMaxEnumeratedPhotons) + "; reduce the number of input columns");
    }
    const std::uint64_t count = composition_count(n, m);
    if (count > kMaxEnumeratedOutcomes) {
        throw CapacityError("enumerate_distribution: " + std::to_string(count) +
                            " outcomes exceeds cap; reduce modes or photons");
    }

    std::vector<std::uint8_t> counts;
    counts.reserve(count * m);
    std::vector<std::uint8_t> current(m, 0);
    append_compositions(n, 0, current, counts);

    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < m; ++j) {
        cols.insert(cols.end(), static_cast<std::size_t>(input.counts[j]), j);
    }
    const double input_norm = factorial_product(std::span<const int>(input.counts));

    std::vector<double> probs(count);
#pragma omp parallel
    {
        std::vector<std::size_t> rows;
        RealMatrix sub(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
#pragma omp for schedule(static)
        for (std::int64_t k = 0; k < static_cast<std::int64_t>(count); ++k) {
            const std::uint8_t *c = counts.data() + static_cast<std::size_t>(k) * m;
            rows.clear();
            double output_norm = 1.0;
            for (std::size_t i = 0; i < m; ++i) {
                rows.insert(rows.end(), c[i], i);
                output_norm *= factorial(c[i]);
            }
            for (std::size_t a = 0; a < rows.size(); ++a) {
                for (std::size_t b = 0; b < cols.size(); ++b) {
                    sub(a, b) = network(rows[a], cols[b]);
                }
            }
            const double per = reference::permanent_glynn_serial(sub);
            probs[static_cast<std::size_t>(k)] = per * per / (input_norm * output_norm);
        }
    }

    const double total = parallel::pairwise_sum(probs);
    if (std::abs(total - 1.0) > kDistributionNormTol) {
        throw NumericalError("enumerate_distribution: probabilities sum to " + std::to_string(total));
    }
    return OutcomeDistribution(m, n, std::move(counts), std::move(probs));
}

OutcomeDistribution enumerate_distribution(const DilatedUnitary &u, const FockState &input) {
    return enumerate_distribution(u.matrix, input);
}

std::vector<std::size_t> sample_indices(const OutcomeDistribution &dist, std::size_t num_samples,
                                        std::uint64_t seed) {
    std::vector<std::size_t> out(num_samples);
    if (dist.size() == 0 || num_samples == 0) {
        return out;
    }
    const std::size_t blocks = (num_samples + kSampleBlock - 1) / kSampleBlock;
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
        Rng rng(seed, static_cast<std::uint64_t>(b));
        const std::size_t begin = static_cast<std::size_t>(b) * kSampleBlock;
        const std::size_t end = std::min(num_samples, begin + kSampleBlock);
        for (std::size_t k = begin; k < end; ++k) {
            out[k] = dist.locate(rng.uniform());
        }
    }
    return out;
}

std::vector<FockState> sample(const OutcomeDistribution &dist, std::size_t num_samples, std::uint64_t seed) {
    const auto idx = sample_indices(dist, num_samples, seed);
    std::vector<FockState> out;
    out.reserve(idx.size());
    for (std::size_t k : idx) {
        out.push_back(dist.outcome(k));
    }
    return out;
}

PostselectResult postselect(std::span<const FockState> samples, const PostselectRule &rule) {
    PostselectResult out;
    out.total_count = samples.size();
    for (const auto &s : samples) {
        if (rule.accepts(std::span<const int>(s.counts))) {
            out.kept.push_back(s);
        }
    }
    out.kept_count = out.kept.size();
    return out;
}

std::vector<std::size_t> extract_rows(const FockState &sample, std::size_t d1) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < d1 && i < sample.modes(); ++i) {
        if (sample.counts[i] > 0) {
            rows.push_back(i);
        }
    }
    return rows;
}

}  // namespace phobic
