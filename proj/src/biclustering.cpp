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

#include "phobic/biclustering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "phobic/error.hpp"
#include "phobic/matrix_functions.hpp"
#include "phobic/numerics.hpp"
#include "phobic/rng.hpp"

namespace phobic {

namespace {

// Distribution cache bound, in stored outcomes across all cached column sets.
constexpr std::size_t kCacheOutcomeBudget = 4'000'000;
constexpr std::size_t kDenseCountLimit = std::size_t{1} << 20;

std::vector<std::size_t> sorted_unique(std::span<const std::size_t> xs) {
    std::vector<std::size_t> out(xs.begin(), xs.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool contains(std::span<const std::size_t> sorted, std::size_t x) {
    return std::binary_search(sorted.begin(), sorted.end(), x);
}

bool overlaps(const Ledger &ledger, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
    if (ledger.empty()) {
        return false;
    }
    for (std::size_t r : rows) {
        for (std::size_t c : cols) {
            if (std::binary_search(ledger.begin(), ledger.end(), Position{r, c})) {
                return true;
            }
        }
    }
    return false;
}

void add_to_ledger(Ledger &ledger, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
    for (std::size_t r : rows) {
        for (std::size_t c : cols) {
            ledger.emplace_back(r, c);
        }
    }
    std::sort(ledger.begin(), ledger.end());
}

void zero_block(RealMatrix &m, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
    for (std::size_t r : rows) {
        for (std::size_t c : cols) {
            m(r, c) = 0.0;
        }
    }
}

bool all_zero(const RealMatrix &m) {
    const auto d = m.data();
    return std::all_of(d.begin(), d.end(), [](double x) { return x == 0.0; });
}

// (outcome index, draw count) pairs in ascending index order.
std::vector<std::pair<std::size_t, std::size_t>> tally(const std::vector<std::size_t> &draws, std::size_t outcomes) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (outcomes <= kDenseCountLimit) {
        std::vector<std::size_t> counts(outcomes, 0);
        for (std::size_t i : draws) {
            ++counts[i];
        }
        for (std::size_t i = 0; i < outcomes; ++i) {
            if (counts[i] > 0) {
                out.emplace_back(i, counts[i]);
            }
        }
        return out;
    }
    std::vector<std::size_t> sorted = draws;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) {
            ++j;
        }
        out.emplace_back(sorted[i], j - i);
        i = j;
    }
    return out;
}

template <typename Int>
bool rows_match_impl(std::span<const Int> counts, std::span<const std::size_t> rows, std::size_t d1,
                     SuccessMode mode) {
    const std::vector<std::size_t> r = sorted_unique(rows);
    int total = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const int n = static_cast<int>(counts[i]);
        total += n;
        const bool in_r = i < d1 && contains(r, i);
        if (mode == SuccessMode::subset_rows_tau3) {
            if (n > 0 && !in_r) {
                return false;
            }
        } else if (n != (in_r ? 1 : 0)) {
            return false;
        }
    }
    return total > 0;
}

}  // namespace

std::string_view cost_name(CostKind k) {
    switch (k) {
    case CostKind::permanent:
        return "permanent";
    case CostKind::frobenius_norm:
        return "frobenius_norm";
    case CostKind::mean_value:
        return "mean_value";
    }
    return "unknown";
}

CostKind parse_cost(std::string_view name) {
    for (CostKind k : {CostKind::permanent, CostKind::frobenius_norm, CostKind::mean_value}) {
        if (cost_name(k) == name) {
            return k;
        }
    }
    throw ConfigError("unknown cost function '" + std::string(name) + "'");
}

void AnnealSchedule::validate() const {
    if (!(tf > 0.0) || !(t0 > tf)) {
        throw DomainError("anneal schedule needs t0 > tf > 0");
    }
    if (steps == 0) {
        throw DomainError("anneal schedule needs at least one step");
    }
}

double AnnealSchedule::temperature(std::size_t i) const {
    return t0 * std::pow(tf / t0, static_cast<double>(i) / static_cast<double>(steps));
}

double evaluate_candidate(const RealMatrix &beta, CostKind f) {
    if (beta.empty()) {
        throw DimensionError("evaluate_candidate: empty candidate");
    }
    switch (f) {
    case CostKind::permanent:
        if (!beta.is_square()) {
            throw ShapeError("evaluate_candidate: permanent needs a square candidate");
        }
        return permanent(beta);
    case CostKind::frobenius_norm: {
        double s = 0.0;
        for (double x : beta.data()) {
            s += x * x;
        }
        return std::sqrt(s);
    }
    case CostKind::mean_value: {
        const auto d = beta.data();
        return std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
    }
    }
    return 0.0;
}

RowOracle::RowOracle(RealMatrix ds, double scale) : ds_(std::move(ds)), scale_(scale), unitary_(dilate(ds_, true)) {
    if (!(scale > 0.0)) {
        throw DomainError("RowOracle: scale must be positive");
    }
}

const OutcomeDistribution &RowOracle::distribution(std::span<const std::size_t> cols) {
    std::vector<std::size_t> key = sorted_unique(cols);
    if (key.size() != cols.size()) {
        throw BoundsError("get_rows: duplicate column in candidate");
    }
    if (auto it = cache_.find(key); it != cache_.end()) {
        return *it->second;
    }
    auto dist = std::make_shared<const OutcomeDistribution>(
        enumerate_distribution(unitary_, build_input(key, unitary_.modes())));
    std::size_t stored = dist->size();
    for (const auto &[k, v] : cache_) {
        stored += v->size();
    }
    if (stored > kCacheOutcomeBudget) {
        cache_.clear();
    }
    return *cache_.emplace(std::move(key), std::move(dist)).first->second;
}

GetRowsResult RowOracle::get_rows(std::span<const std::size_t> cols, const GetRowsOptions &opts,
                                  std::uint64_t seed) {
    if (cols.empty() || cols.size() > ds_.cols()) {
        throw DimensionError("get_rows: need 1 <= |C'| <= d2");
    }
    if (opts.tau_max < 1) {
        throw DomainError("get_rows: tau_max must be at least 1");
    }
    const OutcomeDistribution &dist = distribution(cols);
    const std::size_t d1 = unitary_.d1;
    const std::size_t d2 = unitary_.d2;

    GetRowsResult res;
    std::vector<std::pair<std::size_t, std::size_t>> seen;
    if (opts.mode == RowSelection::sampled) {
        if (opts.num_samples == 0) {
            throw DomainError("get_rows: num_samples must be positive");
        }
        seen = tally(sample_indices(dist, opts.num_samples, seed), dist.size());
    }

    for (int tau = 1; tau <= opts.tau_max; ++tau) {
        const PostselectRule rule{tau, d1, d2};
        std::size_t best = dist.size();
        double best_score = 0.0;
        std::size_t survivors = 0;
        if (opts.mode == RowSelection::sampled) {
            for (const auto &[idx, n] : seen) {
                if (!rule.accepts(dist.counts(idx))) {
                    continue;
                }
                survivors += n;
                if (static_cast<double>(n) > best_score) {
                    best_score = static_cast<double>(n);
                    best = idx;
                }
            }
        } else {
            for (std::size_t idx = 0; idx < dist.size(); ++idx) {
                const double p = dist.probability(idx);
                if (p > best_score && rule.accepts(dist.counts(idx))) {
                    best_score = p;
                    best = idx;
                }
            }
        }
        if (best < dist.size()) {
            res.state = dist.outcome(best);
            res.rows = extract_rows(res.state, d1);
            res.empty = false;
            res.tau = tau;
            res.survivors = survivors;
            return res;
        }
    }
    return res;
}

ShrinkResult shrink_columns(std::span<const std::size_t> cols, std::span<const std::size_t> rows,
                            const RealMatrix &ds, std::span<const std::size_t> anchors) {
    if (rows.size() > cols.size()) {
        throw DimensionError("shrink_columns: more rows than columns");
    }
    ShrinkResult out;
    if (rows.empty()) {
        return out;
    }
    const std::vector<std::size_t> anchor_set = sorted_unique(anchors);
    std::vector<std::pair<double, std::size_t>> free;
    std::vector<std::size_t> kept;
    for (std::size_t c : cols) {
        if (c >= ds.cols()) {
            throw BoundsError("shrink_columns: column index out of range");
        }
        if (contains(anchor_set, c)) {
            kept.push_back(c);
            continue;
        }
        double s = 0.0;
        for (std::size_t r : rows) {
            s += ds(r, c) * ds(r, c);
        }
        free.emplace_back(std::sqrt(s), c);
    }
    std::sort(free.begin(), free.end());
    const std::size_t drop = std::min(cols.size() - rows.size(), free.size());
    for (std::size_t i = drop; i < free.size(); ++i) {
        kept.push_back(free[i].second);
    }
    std::sort(kept.begin(), kept.end());
    out.cols = std::move(kept);
    out.beta = submatrix(ds, rows, out.cols);
    return out;
}

Bicluster find_bicluster_sa(RowOracle &oracle, const SaOptions &opts, std::uint64_t seed, const Ledger &ledger) {
    opts.schedule.validate();
    const RealMatrix &ds = oracle.ds();
    const std::vector<std::size_t> anchors = sorted_unique(opts.anchors);
    std::vector<std::size_t> pool;
    for (std::size_t c = 0; c < ds.cols(); ++c) {
        if (!contains(anchors, c)) {
            pool.push_back(c);
        }
    }
    if (opts.b == 0 || opts.b > pool.size() || opts.b + anchors.size() > ds.rows()) {
        throw DimensionError("find_bicluster_sa: need 1 <= b <= min(d1, d2)");
    }

    Rng rng(seed, 0);
    // Partial Fisher-Yates: the first b entries of `pool` form the current choice.
    for (std::size_t i = 0; i < opts.b; ++i) {
        std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
    }
    std::vector<std::size_t> current(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(opts.b));
    std::vector<std::size_t> proposal = current;

    double cost = 0.0;
    Bicluster best;
    best.cost_fn = opts.cost;

    for (std::size_t step = 0; step < opts.schedule.steps; ++step) {
        const double t = opts.schedule.temperature(step);
        std::vector<std::size_t> c_prime = proposal;
        c_prime.insert(c_prime.end(), anchors.begin(), anchors.end());
        std::sort(c_prime.begin(), c_prime.end());

        const GetRowsResult rows = oracle.get_rows(c_prime, opts.rows, derive_stream_seed(seed, step + 1));
        double cand_cost = kEmptyCandidateCost;
        ShrinkResult cand;
        if (!rows.empty) {
            cand = shrink_columns(c_prime, rows.rows, ds, anchors);
            const bool usable = !cand.cols.empty() && cand.beta.is_square() && !overlaps(ledger, rows.rows, cand.cols);
            if (usable) {
                cand.beta *= oracle.scale();
                cand_cost = evaluate_candidate(cand.beta, opts.cost);
            }
        }

        const double delta = cand_cost - cost;
        const double u = rng.uniform();
        const bool accepted = delta > 0.0 || u < std::exp(delta / t);
        if (accepted) {
            current = proposal;
            cost = cand_cost;
            if (cand_cost > kEmptyCandidateCost && (best.empty() || cand_cost > best.cost)) {
                best.rows = rows.rows;
                best.cols.clear();
                for (std::size_t c : cand.cols) {
                    if (!contains(anchors, c)) {
                        best.cols.push_back(c);
                    }
                }
                best.values = submatrix(ds, best.rows, best.cols);
                best.values *= oracle.scale();
                best.cost = cand_cost;
            }
        }
        if (opts.trace != nullptr) {
            opts.trace->sa_step({opts.trial, step, t, c_prime, rows.rows, cand_cost, accepted, rows.tau});
        }

        // Neighbour: swap one chosen column for one outside the current set.
        proposal = current;
        std::vector<std::size_t> outside;
        const std::vector<std::size_t> cur_sorted = sorted_unique(current);
        for (std::size_t c : pool) {
            if (!contains(cur_sorted, c)) {
                outside.push_back(c);
            }
        }
        std::sort(outside.begin(), outside.end());
        if (!outside.empty()) {
            const std::size_t i = rng.below(proposal.size());
            const std::size_t j = rng.below(outside.size());
            proposal[i] = outside[j];
        }
    }
    if (best.empty()) {
        best.rows.clear();
        best.cols.clear();
        best.values = RealMatrix();
        best.cost = kEmptyCandidateCost;
    }
    return best;
}

HeuristicResult bs_bicluster_main(const RealMatrix &d, std::size_t k, const SaOptions &opts, const Termination &done,
                                  std::uint64_t seed) {
    if (k == 0) {
        throw DomainError("bs_bicluster_main: k must be at least 1");
    }
    HeuristicResult out;
    if (all_zero(d)) {
        out.stop_reason = "all-zero residual";
        return out;
    }
    const double s = sigma_max(d);
    RealMatrix ds = d;
    ds *= 1.0 / s;
    for (std::size_t iter = 0; iter < k; ++iter) {
        if (done && done(out.biclusters)) {
            out.stop_reason = "termination predicate";
            return out;
        }
        if (all_zero(ds)) {
            out.stop_reason = "all-zero residual";
            return out;
        }
        RowOracle oracle(ds, s);
        SaOptions o = opts;
        o.trial = iter;
        Bicluster b = find_bicluster_sa(oracle, o, derive_stream_seed(seed, iter), out.ledger);
        if (b.empty()) {
            out.stop_reason = "no viable candidate";
            return out;
        }
        add_to_ledger(out.ledger, b.rows, b.cols);
        zero_block(ds, b.rows, b.cols);
        out.biclusters.push_back(std::move(b));
    }
    out.stop_reason = "k reached";
    return out;
}

PaddedProblem pad_rectangular(const RealMatrix &d, std::size_t b1, std::size_t b2) {
    if (b1 == 0 || b2 == 0) {
        throw DomainError("pad_rectangular: b1 and b2 must be at least 1");
    }
    PaddedProblem out;
    RealMatrix m = d;
    if (b2 > b1) {
        m = d.transpose();
        std::swap(b1, b2);
        out.transposed = true;
    }
    const std::size_t extra = b1 - b2;
    out.d = RealMatrix(m.rows(), m.cols() + extra, 1.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out.d(i, j) = m(i, j);
        }
    }
    for (std::size_t j = 0; j < extra; ++j) {
        out.anchors.push_back(m.cols() + j);
    }
    out.d1 = out.d.rows();
    out.d2 = out.d.cols();
    out.b1 = b1;
    out.b2 = b2;
    return out;
}

HeuristicResult gbs_bicluster_main(const RealMatrix &d, const GbsOptions &opts, std::uint64_t seed) {
    if (opts.k == 0) {
        throw DomainError("gbs_bicluster_main: k must be at least 1");
    }
    if (opts.num_samples == 0) {
        throw DomainError("gbs_bicluster_main: num_samples must be positive");
    }
    for (double x : d.data()) {
        if (x < 0.0 || x > 1.0) {
            throw DomainError("gbs_bicluster_main: dataset values must lie in [0, 1]");
        }
    }
    HeuristicResult out;
    RealMatrix work = d;
    for (std::size_t iter = 0; out.biclusters.size() < opts.k; ++iter) {
        if (all_zero(work)) {
            out.stop_reason = "all-zero residual";
            return out;
        }
        const GBSProgram prog = make_program(work, opts.nbar, opts.interp);
        const std::vector<ClickPattern> samples =
            chain_rule_sample(prog, opts.num_samples, derive_stream_seed(seed, iter));
        bool found = false;
        for (std::size_t s = 0; s < samples.size() && !found; ++s) {
            const DecodedClicks dc = decode_clicks(samples[s], work.rows(), work.cols());
            if (dc.rows.size() < opts.min_dims || dc.cols.size() < opts.min_dims) {
                continue;
            }
            const RealMatrix beta = submatrix(work, dc.rows, dc.cols);
            if (evaluate_candidate(beta, CostKind::mean_value) < opts.accept_threshold ||
                overlaps(out.ledger, dc.rows, dc.cols)) {
                continue;
            }
            Bicluster b{dc.rows, dc.cols, beta, evaluate_candidate(beta, opts.cost), opts.cost};
            if (opts.trace != nullptr) {
                opts.trace->gbs_accept({iter, s, b.rows, b.cols, b.cost});
            }
            add_to_ledger(out.ledger, b.rows, b.cols);
            zero_block(work, b.rows, b.cols);
            out.biclusters.push_back(std::move(b));
            found = true;
        }
        if (!found) {
            out.stop_reason = "samples exhausted";
            return out;
        }
    }
    out.stop_reason = "k reached";
    return out;
}

std::string_view success_mode_name(SuccessMode m) {
    switch (m) {
    case SuccessMode::exact_rows_tau1:
        return "exact_rows_tau1";
    case SuccessMode::subset_rows_tau3:
        return "subset_rows_tau3";
    case SuccessMode::exact_clicks:
        return "exact_clicks";
    }
    return "unknown";
}

SuccessMode parse_success_mode(std::string_view name) {
    for (SuccessMode m : {SuccessMode::exact_rows_tau1, SuccessMode::subset_rows_tau3, SuccessMode::exact_clicks}) {
        if (success_mode_name(m) == name) {
            return m;
        }
    }
    throw ConfigError("unknown success mode '" + std::string(name) + "'");
}

std::optional<double> SuccessCount::probability() const {
    if (denominator <= 0.0) {
        return std::nullopt;
    }
    return numerator / denominator;
}

bool rows_match(std::span<const int> counts, std::span<const std::size_t> rows, std::size_t d1, SuccessMode mode) {
    return rows_match_impl(counts, rows, d1, mode);
}

bool rows_match(std::span<const std::uint8_t> counts, std::span<const std::size_t> rows, std::size_t d1,
                SuccessMode mode) {
    return rows_match_impl(counts, rows, d1, mode);
}

std::optional<PostselectRule> mode_postselection(SuccessMode mode, std::size_t d1, std::size_t d2) {
    switch (mode) {
    case SuccessMode::exact_rows_tau1:
        return PostselectRule{1, d1, d2};
    case SuccessMode::subset_rows_tau3:
        return PostselectRule{3, d1, d2};
    case SuccessMode::exact_clicks:
        return std::nullopt;
    }
    return std::nullopt;
}

SuccessCount success_estimate(std::span<const FockState> samples, const PlantedBlock &truth, std::size_t d1,
                              std::size_t d2, SuccessMode mode) {
    const auto rule = mode_postselection(mode, d1, d2);
    SuccessCount out;
    for (const FockState &s : samples) {
        if (s.modes() != d1 + d2) {
            throw DimensionError("success_estimate: sample has the wrong number of modes");
        }
        if (rule && !rule->accepts(std::span<const int>(s.counts))) {
            continue;
        }
        out.denominator += 1.0;
        if (rows_match(std::span<const int>(s.counts), truth.rows, d1, mode)) {
            out.numerator += 1.0;
        }
    }
    return out;
}

SuccessCount success_estimate(std::span<const ClickPattern> samples, const PlantedBlock &truth, std::size_t d1,
                              std::size_t d2) {
    const DecodedClicks want{sorted_unique(truth.rows), sorted_unique(truth.cols)};
    SuccessCount out;
    for (const ClickPattern &p : samples) {
        out.denominator += 1.0;
        if (decode_clicks(p, d1, d2) == want) {
            out.numerator += 1.0;
        }
    }
    return out;
}

SuccessCount exact_success(const OutcomeDistribution &dist, const PlantedBlock &truth, std::size_t d1, std::size_t d2,
                           SuccessMode mode) {
    if (dist.modes() != d1 + d2) {
        throw DimensionError("exact_success: distribution has the wrong number of modes");
    }
    if (mode == SuccessMode::exact_clicks) {
        throw DomainError("exact_success: exact_clicks applies to click distributions");
    }
    const PostselectRule rule = *mode_postselection(mode, d1, d2);
    SuccessCount out;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const auto c = dist.counts(i);
        if (!rule.accepts(c)) {
            continue;
        }
        out.denominator += dist.probability(i);
        if (rows_match(c, truth.rows, d1, mode)) {
            out.numerator += dist.probability(i);
        }
    }
    return out;
}

}  // namespace phobic
