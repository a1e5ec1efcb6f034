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
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "phobic/boson_sampling.hpp"
#include "phobic/matrix.hpp"
#include "phobic/numerics.hpp"
#include "phobic/rng.hpp"

namespace phobic {

enum class NbarInterpretation { total, per_mode };

inline constexpr double kScalingResidualTol = 1e-10;
inline constexpr double kScalingMargin = 1e-12;
inline constexpr std::size_t kMaxThresholdModes = 14;
inline constexpr std::size_t kMaxClickModes = 63;
inline constexpr double kConditionalTol = 1e-9;
/// Relative rounding error assumed per vacuum term in the chain-rule inclusion-exclusion.
inline constexpr double kInclusionExclusionEps = 1e-13;

/// Squeezed-light program encoding a dataset's bipartite adjacency matrix.
/// `b` is the hafnian kernel c * D_adj = U diag(tanh r) U^T.
struct GBSProgram {
    TakagiResult takagi;
    double c = 0.0;
    std::vector<double> r;
    RealMatrix b;
    std::size_t d1 = 0;
    std::size_t d2 = 0;
    double nbar_target = 0.0;

    std::size_t modes() const noexcept { return b.rows(); }
};

/// Threshold-detector outcome; bit i of `mask` is set when mode i clicked.
struct ClickPattern {
    std::uint64_t mask = 0;
    std::size_t modes = 0;

    bool clicked(std::size_t mode) const noexcept { return (mask >> mode) & 1U; }
    std::vector<bool> clicks() const;

    friend bool operator==(const ClickPattern &, const ClickPattern &) = default;
};

/// O = X (B + conj B) in the doubled basis and 1/sqrt(det sigma_Q) = sqrt(det(I - O)).
/// sigma_q is (I - O)^{-1}; its principal submatrices are the reduced states' sigma_Q.
struct HusimiForm {
    RealMatrix o;
    double sqrt_det_sigma_q_inv = 1.0;
    RealMatrix sigma_q;
};

/// Exact click distribution; probabilities[mask] is P(exactly the modes in mask click).
struct ThresholdDistribution {
    std::size_t modes = 0;
    std::vector<double> probabilities;

    ClickPattern argmax() const;
    double probability(const ClickPattern &p) const { return probabilities[p.mask]; }
};

struct DecodedClicks {
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;

    friend bool operator==(const DecodedClicks &, const DecodedClicks &) = default;
};

/// [[0, D], [D^T, 0]].
RealMatrix build_adjacency(const RealMatrix &d);

/// sum_i (c lambda_i)^2 / (1 - (c lambda_i)^2).
double mean_photon_number(double c, std::span<const double> lambdas);

/// Bisection for c in (0, (1 - kScalingMargin) / max lambda) hitting the target mean photon number.
double solve_scaling(std::span<const double> lambdas, double nbar_target);

std::vector<double> squeezing_params(double c, std::span<const double> lambdas);

/// Total mean photon number implied by a configured value under the chosen interpretation.
double resolve_nbar(double nbar, NbarInterpretation interp, std::size_t modes);

/// Program for an arbitrary real symmetric kernel. d1/d2 only label the bipartition.
GBSProgram make_program_from_symmetric(const RealMatrix &a, double nbar_total, std::size_t d1, std::size_t d2);

/// Adjacency embedding of a d1 x d2 dataset followed by scaling, Takagi and squeezing.
GBSProgram make_program(const RealMatrix &d, double nbar, NbarInterpretation interp = NbarInterpretation::total);

/// prod sech r_i * |Haf(B_n)|^2 / prod n_i!.
double pnr_probability(const GBSProgram &prog, const FockState &pattern);

HusimiForm husimi_form(const GBSProgram &prog);

/// Tor(O_S) * sqrt(det(I - O)) for one click pattern.
double click_probability(const HusimiForm &h, const ClickPattern &pattern);

ThresholdDistribution threshold_distribution(const GBSProgram &prog);

/// Mode-by-mode sampler over exact marginal click probabilities. Marginals of modes
/// 0..k-1 are computed from the reduced state, whose sigma_Q is the principal submatrix
/// of the full sigma_Q; vacuum probabilities are memoised per mode subset.
class ClickSampler {
  public:
    explicit ClickSampler(const GBSProgram &prog);
    explicit ClickSampler(HusimiForm form);

    std::size_t modes() const noexcept { return modes_; }

    /// P(modes in `mask` click and the other modes among 0..k-1 do not).
    double prefix_probability(std::size_t k, std::uint64_t mask);

    /// One sample; when `path_probability` is given it receives the product of the
    /// conditionals used along the way.
    ClickPattern draw(Rng &rng, double *path_probability = nullptr);

  private:
    double vacuum_probability(std::uint64_t subset);

    HusimiForm form_;
    std::size_t modes_ = 0;
    std::unordered_map<std::uint64_t, double> vacuum_;
    std::unordered_map<std::uint64_t, double> prefix_;
};

/// Draws per RNG stream in chain_rule_sample; each sample consumes exactly modes() uniforms.
inline constexpr std::size_t kClickSampleBlock = 1024;

std::vector<ClickPattern> chain_rule_sample(const GBSProgram &prog, std::size_t num_samples, std::uint64_t seed);

DecodedClicks decode_clicks(const ClickPattern &pattern, std::size_t d1, std::size_t d2);

}  // namespace phobic
