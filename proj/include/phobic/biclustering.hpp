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
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "phobic/boson_sampling.hpp"
#include "phobic/datasets.hpp"
#include "phobic/gbs.hpp"
#include "phobic/matrix.hpp"

namespace phobic {

enum class CostKind { permanent, frobenius_norm, mean_value };

std::string_view cost_name(CostKind k);
CostKind parse_cost(std::string_view name);

/// Cost assigned when no postselected rows survive for a column choice.
inline constexpr double kEmptyCandidateCost = -1000.0;

struct Bicluster {
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
    RealMatrix values;
    double cost = kEmptyCandidateCost;
    CostKind cost_fn = CostKind::permanent;

    bool empty() const noexcept { return rows.empty() || cols.empty(); }
};

/// Exponential decay t_i = t0 (tf / t0)^(i / p) for i = 0..p-1.
struct AnnealSchedule {
    double t0 = 100.0;
    double tf = 0.01;
    std::size_t steps = 20;

    void validate() const;
    double temperature(std::size_t i) const;
};

using Position = std::pair<std::size_t, std::size_t>;

/// Sorted set of (row, col) cells claimed by earlier biclusters.
using Ledger = std::vector<Position>;

double evaluate_candidate(const RealMatrix &beta, CostKind f);

enum class RowSelection {
    sampled,  // most frequent postselected state among num_samples draws
    exact,    // postselected state with the highest exact probability
};

struct GetRowsOptions {
    std::size_t num_samples = 100000;
    int tau_max = 1;
    RowSelection mode = RowSelection::sampled;
};

struct GetRowsResult {
    std::vector<std::size_t> rows;
    bool empty = true;
    int tau = 0;                 // postselection cap that produced the rows
    std::size_t survivors = 0;   // postselected draws at that cap (sampled mode)
    FockState state;
};

/// Boson-sampling row oracle for one scaled dataset D_s = D / scale. The dilation is built
/// once and the exact output distribution is cached per input column set.
class RowOracle {
  public:
    explicit RowOracle(RealMatrix ds, double scale = 1.0);

    const RealMatrix &ds() const noexcept { return ds_; }
    double scale() const noexcept { return scale_; }
    const DilatedUnitary &unitary() const noexcept { return unitary_; }

    const OutcomeDistribution &distribution(std::span<const std::size_t> cols);

    /// Dilate, load one photon per column, sample (or read the exact distribution),
    /// postselect with tau = 1, 2, ... tau_max until something survives, and return the
    /// unique rows of the winning state. Ties go to the lexicographically smallest state.
    GetRowsResult get_rows(std::span<const std::size_t> cols, const GetRowsOptions &opts, std::uint64_t seed);

  private:
    RealMatrix ds_;
    double scale_ = 1.0;
    DilatedUnitary unitary_;
    std::map<std::vector<std::size_t>, std::shared_ptr<const OutcomeDistribution>> cache_;
};

struct ShrinkResult {
    std::vector<std::size_t> cols;
    RealMatrix beta;
};

/// Drops |cols| - |rows| columns with the smallest L2 norm over `rows` (ties: lowest index
/// first; anchors are never dropped) and returns the square candidate rows x kept cols.
ShrinkResult shrink_columns(std::span<const std::size_t> cols, std::span<const std::size_t> rows,
                            const RealMatrix &ds, std::span<const std::size_t> anchors = {});

struct SaStepRecord {
    std::size_t trial = 0;
    std::size_t step = 0;
    double temperature = 0.0;
    std::vector<std::size_t> cols;
    std::vector<std::size_t> rows;
    double cost = 0.0;
    bool accepted = false;
    int tau = 0;
};

struct GbsAcceptRecord {
    std::size_t iteration = 0;
    std::size_t sample_index = 0;
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
    double cost = 0.0;
};

class TraceSink {
  public:
    virtual ~TraceSink() = default;
    virtual void sa_step(const SaStepRecord &) {}
    virtual void gbs_accept(const GbsAcceptRecord &) {}
};

struct SaOptions {
    std::size_t b = 6;
    GetRowsOptions rows;
    CostKind cost = CostKind::permanent;
    AnnealSchedule schedule;
    std::vector<std::size_t> anchors;  // always loaded with a photon, never reported
    TraceSink *trace = nullptr;
    std::size_t trial = 0;
};

/// Simulated annealing over column sets with boson sampling picking the rows. Candidates
/// are scored in dataset units (D_s * scale) so candidates of different sizes compare
/// fairly. Returns the best accepted bicluster (empty with cost kEmptyCandidateCost if none).
/// Candidates touching `ledger` cells are scored kEmptyCandidateCost.
Bicluster find_bicluster_sa(RowOracle &oracle, const SaOptions &opts, std::uint64_t seed, const Ledger &ledger = {});

struct HeuristicResult {
    std::vector<Bicluster> biclusters;
    Ledger ledger;
    std::string stop_reason;
};

using Termination = std::function<bool(const std::vector<Bicluster> &)>;

/// Scale once by sigma_max(D), then repeatedly anneal, record and zero R x C in D_s.
HeuristicResult bs_bicluster_main(const RealMatrix &d, std::size_t k, const SaOptions &opts,
                                  const Termination &done, std::uint64_t seed);

struct PaddedProblem {
    RealMatrix d;
    std::size_t d1 = 0;
    std::size_t d2 = 0;
    bool transposed = false;
    std::vector<std::size_t> anchors;
    std::size_t b1 = 0;
    std::size_t b2 = 0;
};

/// Transposes when b2 > b1, then appends b1 - b2 all-ones anchor columns.
PaddedProblem pad_rectangular(const RealMatrix &d, std::size_t b1, std::size_t b2);

struct GbsOptions {
    std::size_t k = 1;
    double nbar = 2.0;
    NbarInterpretation interp = NbarInterpretation::total;
    std::size_t num_samples = 10000;
    CostKind cost = CostKind::mean_value;
    double accept_threshold = 0.6;
    std::size_t min_dims = 2;
    TraceSink *trace = nullptr;
};

/// Iterative GBS extractor: sample click patterns, accept the first candidate whose mean
/// entry reaches accept_threshold with at least min_dims rows and columns, zero it, and
/// rebuild the program.
HeuristicResult gbs_bicluster_main(const RealMatrix &d, const GbsOptions &opts, std::uint64_t seed);

enum class SuccessMode { exact_rows_tau1, subset_rows_tau3, exact_clicks };

std::string_view success_mode_name(SuccessMode m);
SuccessMode parse_success_mode(std::string_view name);

struct SuccessCount {
    double numerator = 0.0;
    double denominator = 0.0;

    /// nullopt when nothing survived postselection.
    std::optional<double> probability() const;
};

/// Whether a boson-sampling outcome counts as finding `rows` (no postselection applied).
bool rows_match(std::span<const int> counts, std::span<const std::size_t> rows, std::size_t d1, SuccessMode mode);
bool rows_match(std::span<const std::uint8_t> counts, std::span<const std::size_t> rows, std::size_t d1,
                SuccessMode mode);

/// Postselection implied by a mode: tau = 1, tau = 3, or none for exact_clicks.
std::optional<PostselectRule> mode_postselection(SuccessMode mode, std::size_t d1, std::size_t d2);

/// Fraction of postselected samples that satisfy the mode's predicate.
SuccessCount success_estimate(std::span<const FockState> samples, const PlantedBlock &truth, std::size_t d1,
                              std::size_t d2, SuccessMode mode);
SuccessCount success_estimate(std::span<const ClickPattern> samples, const PlantedBlock &truth, std::size_t d1,
                              std::size_t d2);

/// Same quantity computed from exact probability mass instead of counts.
SuccessCount exact_success(const OutcomeDistribution &dist, const PlantedBlock &truth, std::size_t d1,
                           std::size_t d2, SuccessMode mode);

}  // namespace phobic
