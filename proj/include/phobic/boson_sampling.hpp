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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "phobic/matrix.hpp"

namespace phobic {

/// Photon count per mode.
struct FockState {
    std::vector<int> counts;

    std::size_t modes() const noexcept { return counts.size(); }
    int total() const noexcept;

    friend auto operator<=>(const FockState &, const FockState &) = default;
};

/// Unitary dilation of a scaled dataset:
///   [[D_s, sqrt(I - D_s D_s^T)], [sqrt(I - D_s^T D_s), -D_s^T]].
/// Modes 0..d2-1 carry column identity on input; modes 0..d1-1 carry row identity on
/// output, so the transfer amplitude from mode j to mode i is matrix(i, j) = D_s(i, j).
struct DilatedUnitary {
    RealMatrix matrix;
    std::size_t d1 = 0;
    std::size_t d2 = 0;
    double scale = 1.0;  // sigma_max used to form D_s (1 when pre-scaled)

    std::size_t modes() const noexcept { return d1 + d2; }
};

/// Exact output distribution for one input state. Outcomes are weak compositions of the
/// photon number, stored in ascending lexicographic order of their mode counts.
class OutcomeDistribution {
  public:
    OutcomeDistribution() = default;
    OutcomeDistribution(std::size_t modes, int total_photons, std::vector<std::uint8_t> counts,
                        std::vector<double> probabilities);

    std::size_t modes() const noexcept { return modes_; }
    int total_photons() const noexcept { return total_photons_; }
    std::size_t size() const noexcept { return probabilities_.size(); }

    std::span<const std::uint8_t> counts(std::size_t outcome) const noexcept {
        return {counts_.data() + outcome * modes_, modes_};
    }
    FockState outcome(std::size_t index) const;
    double probability(std::size_t index) const noexcept { return probabilities_[index]; }
    std::span<const double> probabilities() const noexcept { return probabilities_; }

    /// Index of `state`, or size() when absent.
    std::size_t find(const FockState &state) const;

    /// Outcome index for a uniform variate u in [0, 1).
    std::size_t locate(double u) const;

  private:
    std::size_t modes_ = 0;
    int total_photons_ = 0;
    std::vector<std::uint8_t> counts_;
    std::vector<double> probabilities_;
    std::vector<double> cdf_;
};

/// Postselection E = E1 and E2: every row mode (< d1) holds at most tau photons and every
/// mode in [d1, d1 + d2) is empty.
struct PostselectRule {
    int tau = 1;
    std::size_t d1 = 0;
    std::size_t d2 = 0;

    bool accepts(std::span<const int> counts) const;
    bool accepts(std::span<const std::uint8_t> counts) const;
};

struct PostselectResult {
    std::vector<FockState> kept;
    std::size_t kept_count = 0;
    std::size_t total_count = 0;
};

inline constexpr std::size_t kMaxEnumeratedOutcomes = 10'000'000;
inline constexpr int kMaxEnumeratedPhotons = 8;
inline constexpr double kDistributionNormTol = 1e-9;
/// Draws per RNG stream in sample(); stream b covers draws [b*kSampleBlock, (b+1)*kSampleBlock).
inline constexpr std::size_t kSampleBlock = 8192;

DilatedUnitary dilate(const RealMatrix &d, bool pre_scaled = false);

/// One photon in each listed mode (0-based), vacuum elsewhere.
FockState build_input(std::span<const std::size_t> columns, std::size_t modes);

/// |Per(U_{out,in})|^2 / (prod n_i! prod n'_j!).
template <typename T>
double outcome_probability(const Matrix<T> &network, const FockState &input, const FockState &output);
double outcome_probability(const DilatedUnitary &u, const FockState &input, const FockState &output);

/// Number of weak compositions of n into m parts, saturating at UINT64_MAX.
std::uint64_t composition_count(int n, std::size_t m);

OutcomeDistribution enumerate_distribution(const RealMatrix &network, const FockState &input);
OutcomeDistribution enumerate_distribution(const DilatedUnitary &u, const FockState &input);

/// I.i.d. categorical draws returned as outcome indices. Deterministic in (dist, seed) and
/// independent of the worker count.
std::vector<std::size_t> sample_indices(const OutcomeDistribution &dist, std::size_t num_samples,
                                        std::uint64_t seed);
std::vector<FockState> sample(const OutcomeDistribution &dist, std::size_t num_samples, std::uint64_t seed);

PostselectResult postselect(std::span<const FockState> samples, const PostselectRule &rule);

/// Unique row modes (< d1) that received at least one photon.
std::vector<std::size_t> extract_rows(const FockState &sample, std::size_t d1);

}  // namespace phobic
