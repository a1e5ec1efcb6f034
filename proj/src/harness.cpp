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

#include "phobic/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <type_traits>

#include <toml.hpp>

#include "phobic/error.hpp"
#include "phobic/io.hpp"
#include "phobic/parallel.hpp"
#include "phobic/rng.hpp"

namespace phobic {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// TOML reading

template <typename T>
T convert(const toml::node &n, std::string_view key) {
    if constexpr (std::is_same_v<T, bool>) {
        if (auto v = n.value<bool>()) {
            return *v;
        }
    } else if constexpr (std::is_integral_v<T>) {
        if (auto v = n.value<std::int64_t>()) {
            if (std::is_unsigned_v<T> && *v < 0) {
                throw ConfigError(std::string(key) + " must be non-negative");
            }
            return static_cast<T>(*v);
        }
    } else if constexpr (std::is_floating_point_v<T>) {
        if (auto v = n.value<double>()) {
            return *v;
        }
    } else {
        if (auto v = n.value<std::string>()) {
            return *v;
        }
    }
    throw ConfigError(std::string(key) + " has the wrong type");
}

template <typename T>
bool read(const toml::table *t, std::string_view key, T &dst) {
    const toml::node *n = t != nullptr ? t->get(key) : nullptr;
    if (n == nullptr) {
        return false;
    }
    dst = convert<T>(*n, key);
    return true;
}

// Accepts either a scalar or an array.
template <typename T>
bool read_list(const toml::table *t, std::string_view key, std::vector<T> &dst) {
    const toml::node *n = t != nullptr ? t->get(key) : nullptr;
    if (n == nullptr) {
        return false;
    }
    dst.clear();
    if (const toml::array *a = n->as_array()) {
        for (const toml::node &el : *a) {
            dst.push_back(convert<T>(el, key));
        }
    } else {
        dst.push_back(convert<T>(*n, key));
    }
    return true;
}

void check_keys(const toml::table *t, std::string_view section, std::initializer_list<std::string_view> allowed) {
    if (t == nullptr) {
        return;
    }
    for (const auto &[k, v] : *t) {
        if (std::find(allowed.begin(), allowed.end(), k.str()) == allowed.end()) {
            throw ConfigError("unknown key '" + std::string(k.str()) + "' in " + std::string(section));
        }
    }
}

NbarInterpretation parse_interp(std::string_view s) {
    if (s == "total") {
        return NbarInterpretation::total;
    }
    if (s == "per-mode" || s == "per_mode") {
        return NbarInterpretation::per_mode;
    }
    throw ConfigError("nbar_interpretation must be 'total' or 'per-mode'");
}

std::string_view interp_name(NbarInterpretation i) { return i == NbarInterpretation::total ? "total" : "per-mode"; }

// ---------------------------------------------------------------------------
// Experiment helpers

Dataset resolve_dataset(const ExperimentConfig &c, Generator fallback) {
    if (!c.dataset_path.empty()) {
        return load_dataset(c.dataset_path);
    }
    SyntheticSpec s = c.dataset;
    if (!c.dataset_set) {
        s.generator = fallback;
    }
    s.seed = c.dataset_seed.value_or(c.seed);
    return generate(s);
}

PlantedBlock first_block(const Dataset &d) {
    const auto blocks = d.truth.located();
    if (blocks.empty()) {
        throw ConfigError("dataset carries no planted block to score against");
    }
    return blocks.front();
}

std::uint64_t click_mask(const PlantedBlock &b, std::size_t d1) {
    std::uint64_t m = 0;
    for (std::size_t r : b.rows) {
        m |= std::uint64_t{1} << r;
    }
    for (std::size_t c : b.cols) {
        m |= std::uint64_t{1} << (d1 + c);
    }
    return m;
}

RealMatrix variant_values(const Dataset &d, const std::string &variant) {
    return variant == "binary" ? binarize(d.values, kBinaryThreshold) : d.values;
}

json block_json(const PlantedBlock &b) { return {{"rows", b.rows}, {"cols", b.cols}}; }

RealMatrix random_dataset(std::size_t rows, std::size_t cols, std::uint64_t seed, std::uint64_t stream) {
    Rng rng(seed, stream);
    RealMatrix d(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            d(i, j) = rng.uniform();
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// Experiments

json run_bs1(const ExperimentConfig &c) {
    struct Condition {
        std::string label;
        int alpha;
        Dataset data;
    };
    std::vector<Condition> conds;
    if (!c.dataset_path.empty()) {
        Dataset d = load_dataset(c.dataset_path);
        conds.push_back({"file", d.alpha, std::move(d)});
    } else {
        const std::uint64_t base = c.dataset_seed.value_or(c.seed);
        for (std::size_t s = 0; s < c.dataset_seeds; ++s) {
            for (int a : c.alphas) {
                conds.push_back({"D" + std::to_string(a), a, gen_bs_problem1(a, base + s, c.dataset.shared_block)});
            }
            if (c.include_binary) {
                conds.push_back({"D6", 0, gen_bs_problem1_binary(base + s)});
            }
        }
    }

    json rows = json::array();
    for (std::size_t i = 0; i < conds.size(); ++i) {
        const Dataset &d = conds[i].data;
        const PlantedBlock truth = first_block(d);
        const std::size_t d1 = d.values.rows();
        const std::size_t d2 = d.values.cols();
        const DilatedUnitary u = dilate(d.values);
        const OutcomeDistribution dist = enumerate_distribution(u, build_input(truth.cols, u.modes()));

        SuccessCount tau1;
        SuccessCount tau3;
        SuccessCount raw;
        if (c.exact) {
            tau1 = exact_success(dist, truth, d1, d2, SuccessMode::exact_rows_tau1);
            tau3 = exact_success(dist, truth, d1, d2, SuccessMode::subset_rows_tau3);
            raw.denominator = 1.0;
            for (std::size_t k = 0; k < dist.size(); ++k) {
                if (rows_match(dist.counts(k), truth.rows, d1, SuccessMode::exact_rows_tau1)) {
                    raw.numerator += dist.probability(k);
                }
            }
        } else {
            const std::vector<FockState> samples = sample(dist, c.num_samples, derive_stream_seed(c.seed, i));
            tau1 = success_estimate(samples, truth, d1, d2, SuccessMode::exact_rows_tau1);
            tau3 = success_estimate(samples, truth, d1, d2, SuccessMode::subset_rows_tau3);
            raw.denominator = static_cast<double>(samples.size());
            for (const FockState &s : samples) {
                if (rows_match(std::span<const int>(s.counts), truth.rows, d1, SuccessMode::exact_rows_tau1)) {
                    raw.numerator += 1.0;
                }
            }
        }
        rows.push_back({{"dataset", conds[i].label},
                        {"alpha", conds[i].alpha},
                        {"dataset_seed", d.seed},
                        {"sigma_max", u.scale},
                        {"outcomes", dist.size()},
                        {"truth", block_json(truth)},
                        {"tau1", to_json(tau1)},
                        {"tau3", to_json(tau3)},
                        {"no_postselection", to_json(raw)}});
    }
    return {{"mode", c.exact ? "exact" : "sampled"}, {"rows", rows}};
}

json run_bs2(const ExperimentConfig &c) {
    const Dataset d = resolve_dataset(c, Generator::bs_problem2);
    const PlantedBlock truth = first_block(d);
    const double scale = sigma_max(d.values);
    RealMatrix ds = d.values;
    ds *= 1.0 / scale;

    std::unique_ptr<std::ofstream> trace_file;
    if (!c.trace.empty()) {
        trace_file = std::make_unique<std::ofstream>(c.trace);
        if (!*trace_file) {
            throw ConfigError("cannot open trace file " + c.trace);
        }
    }

    json per_p = json::array();
    for (std::size_t p : c.steps) {
        SaOptions base;
        base.b = c.b;
        base.rows = {c.num_samples, c.tau.value_or(static_cast<int>(c.b) - 1), c.exact ? RowSelection::exact : RowSelection::sampled};
        base.rows.tau_max = std::max(base.rows.tau_max, 1);
        base.cost = c.cost;
        base.schedule = {c.t0, c.tf, p};

        std::vector<Bicluster> found(c.trials);
        std::vector<MemoryTraceSink> traces(trace_file ? c.trials : 0);
        const std::uint64_t p_seed = derive_stream_seed(c.seed, p);
        parallel::ExceptionCollector errors;
#pragma omp parallel
        {
            RowOracle oracle(ds, scale);
#pragma omp for schedule(dynamic, 1)
            for (std::size_t t = 0; t < c.trials; ++t) {
                errors.run([&] {
                    SaOptions o = base;
                    o.trial = t;
                    o.trace = trace_file ? &traces[t] : nullptr;
                    found[t] = find_bicluster_sa(oracle, o, derive_stream_seed(p_seed, t));
                });
            }
        }
        errors.rethrow();

        std::size_t successes = 0;
        json trials = json::array();
        for (std::size_t t = 0; t < c.trials; ++t) {
            const bool ok = found[t].rows == truth.rows && found[t].cols == truth.cols;
            successes += ok ? 1 : 0;
            trials.push_back({{"trial", t}, {"bicluster", to_json(found[t])}, {"success", ok}});
            if (trace_file) {
                for (const SaStepRecord &r : traces[t].sa) {
                    json j = to_json(r);
                    j["p"] = p;
                    *trace_file << j.dump() << '\n';
                }
            }
        }
        const SuccessCount sc{static_cast<double>(successes), static_cast<double>(c.trials)};
        per_p.push_back({{"p", p}, {"success", to_json(sc)}, {"trials", trials}});
    }
    return {{"dataset", {{"generator", d.generator}, {"seed", d.seed}, {"rows", d.values.rows()}, {"cols", d.values.cols()}}},
            {"truth", block_json(truth)},
            {"mode", c.exact ? "exact" : "sampled"},
            {"per_p", per_p}};
}

json run_gbs1(const ExperimentConfig &c) {
    const Dataset d = resolve_dataset(c, Generator::gbs_problem1_small);
    const PlantedBlock truth = first_block(d);
    const std::size_t d1 = d.values.rows();
    const std::size_t d2 = d.values.cols();
    const std::uint64_t mask = click_mask(truth, d1);

    json rows = json::array();
    std::size_t idx = 0;
    for (const std::string &variant : c.variants) {
        const RealMatrix values = variant_values(d, variant);
        for (double nbar : c.nbars) {
            const GBSProgram prog = make_program(values, nbar, c.interp);
            json row{{"variant", variant}, {"nbar", nbar}, {"nbar_total", prog.nbar_target}, {"c", prog.c}};
            if (c.exact) {
                const ThresholdDistribution td = threshold_distribution(prog);
                const ClickPattern top = td.argmax();
                const double p = td.probabilities[mask];
                const DecodedClicks dc = decode_clicks(top, d1, d2);
                row["exact"] = {{"probability", p},
                                {"modal", top.mask == mask},
                                {"argmax", {{"rows", dc.rows}, {"cols", dc.cols}, {"probability", td.probability(top)}}},
                                {"uniform_ratio", p * std::ldexp(1.0, static_cast<int>(prog.modes()))}};
            } else {
                const auto samples = chain_rule_sample(prog, c.num_samples, derive_stream_seed(c.seed, idx));
                row["sampled"] = to_json(success_estimate(samples, truth, d1, d2));
            }
            rows.push_back(std::move(row));
            ++idx;
        }
    }
    return {{"dataset", {{"generator", d.generator}, {"seed", d.seed}, {"rows", d1}, {"cols", d2}}},
            {"truth", block_json(truth)},
            {"interpretation", interp_name(c.interp)},
            {"mode", c.exact ? "exact" : "sampled"},
            {"rows", rows}};
}

json run_gbs2(const ExperimentConfig &c) {
    const Dataset d = resolve_dataset(c, Generator::gbs_problem2_small);
    const std::vector<PlantedBlock> blocks = d.truth.located();
    if (blocks.empty()) {
        throw ConfigError("gbs2 needs a dataset with planted blocks");
    }
    const std::size_t d1 = d.values.rows();
    const std::size_t d2 = d.values.cols();

    json rows = json::array();
    std::uint64_t stream = 0;
    auto measure = [&](const RealMatrix &values, double nbar) {
        const GBSProgram prog = make_program(values, nbar, c.interp);
        std::vector<double> metric(blocks.size(), 0.0);
        if (c.exact) {
            const ThresholdDistribution td = threshold_distribution(prog);
            for (std::size_t b = 0; b < blocks.size(); ++b) {
                metric[b] = td.probabilities[click_mask(blocks[b], d1)];
            }
        } else {
            const auto samples = chain_rule_sample(prog, c.num_samples, derive_stream_seed(c.seed, stream++));
            for (std::size_t b = 0; b < blocks.size(); ++b) {
                metric[b] = success_estimate(samples, blocks[b], d1, d2).numerator;
            }
        }
        return metric;
    };

    for (const std::string &variant : c.variants) {
        const RealMatrix values = variant_values(d, variant);
        for (double nbar : c.nbars) {
            const std::vector<double> before = measure(values, nbar);
            const std::size_t top =
                static_cast<std::size_t>(std::max_element(before.begin(), before.end()) - before.begin());
            RealMatrix zeroed = values;
            for (std::size_t r : blocks[top].rows) {
                for (std::size_t col : blocks[top].cols) {
                    zeroed(r, col) = 0.0;
                }
            }
            const std::vector<double> after = measure(zeroed, nbar);
            bool increased = blocks.size() > 1;
            for (std::size_t b = 0; b < blocks.size(); ++b) {
                if (b != top && !(after[b] > before[b])) {
                    increased = false;
                }
            }
            json row{{"variant", variant}, {"nbar", nbar},          {"zeroed_block", top},
                     {"before", before},   {"after", after},        {"remaining_increased", increased}};
            if (!c.exact) {
                GbsOptions g;
                g.k = blocks.size();
                g.nbar = nbar;
                g.interp = c.interp;
                g.num_samples = c.num_samples;
                g.cost = CostKind::mean_value;
                g.accept_threshold = c.accept_threshold;
                g.min_dims = c.min_dims;
                const HeuristicResult res = gbs_bicluster_main(values, g, derive_stream_seed(c.seed, stream++));
                json found = json::array();
                for (const Bicluster &b : res.biclusters) {
                    json j = to_json(b);
                    const auto it = std::find(blocks.begin(), blocks.end(), PlantedBlock{b.rows, b.cols});
                    j["truth_index"] = it == blocks.end() ? -1 : static_cast<int>(it - blocks.begin());
                    found.push_back(std::move(j));
                }
                row["extraction"] = {{"biclusters", found}, {"stop_reason", res.stop_reason}};
            }
            rows.push_back(std::move(row));
        }
    }
    json truth = json::array();
    for (const auto &b : blocks) {
        truth.push_back(block_json(b));
    }
    return {{"dataset", {{"generator", d.generator}, {"seed", d.seed}, {"rows", d1}, {"cols", d2}}},
            {"truth", truth},
            {"interpretation", interp_name(c.interp)},
            {"mode", c.exact ? "exact" : "sampled"},
            {"rows", rows}};
}

json run_custom(const ExperimentConfig &c) {
    if (c.dataset_path.empty() && !c.dataset_set) {
        throw ConfigError("custom experiment needs [dataset] path or generator");
    }
    const Dataset d = resolve_dataset(c, c.dataset.generator);
    std::unique_ptr<std::ofstream> trace_file;
    std::unique_ptr<JsonlTraceSink> sink;
    if (!c.trace.empty()) {
        trace_file = std::make_unique<std::ofstream>(c.trace);
        if (!*trace_file) {
            throw ConfigError("cannot open trace file " + c.trace);
        }
        sink = std::make_unique<JsonlTraceSink>(*trace_file);
    }

    HeuristicResult res;
    if (c.heuristic == "bs") {
        SaOptions o;
        o.b = c.b;
        o.rows = {c.num_samples, std::max(c.tau.value_or(static_cast<int>(c.b) - 1), 1),
                  c.exact ? RowSelection::exact : RowSelection::sampled};
        o.cost = c.cost;
        o.schedule = {c.t0, c.tf, c.steps.front()};
        o.trace = sink.get();
        res = bs_bicluster_main(d.values, c.k, o, nullptr, c.seed);
    } else {
        GbsOptions g;
        g.k = c.k;
        g.nbar = c.nbars.front();
        g.interp = c.interp;
        g.num_samples = c.num_samples;
        g.cost = c.cost;
        g.accept_threshold = c.accept_threshold;
        g.min_dims = c.min_dims;
        g.trace = sink.get();
        res = gbs_bicluster_main(d.values, g, c.seed);
    }
    const std::vector<PlantedBlock> blocks = d.truth.located();
    json found = json::array();
    for (const Bicluster &b : res.biclusters) {
        json j = to_json(b);
        const auto it = std::find(blocks.begin(), blocks.end(), PlantedBlock{b.rows, b.cols});
        j["truth_index"] = it == blocks.end() ? -1 : static_cast<int>(it - blocks.begin());
        found.push_back(std::move(j));
    }
    return {{"dataset", {{"generator", d.generator}, {"seed", d.seed}, {"rows", d.values.rows()}, {"cols", d.values.cols()}}},
            {"heuristic", c.heuristic},
            {"biclusters", found},
            {"ledger_size", res.ledger.size()},
            {"stop_reason", res.stop_reason}};
}

// Click distribution from photon-number probabilities, truncated at `cutoff` photons.
std::vector<double> hafnian_click_marginals(const GBSProgram &prog, int cutoff) {
    const std::size_t m = prog.modes();
    std::vector<double> out(std::size_t{1} << m, 0.0);
    FockState pattern{std::vector<int>(m, 0)};
    std::function<void(std::size_t, int)> rec = [&](std::size_t mode, int left) {
        if (mode == m) {
            std::uint64_t mask = 0;
            for (std::size_t i = 0; i < m; ++i) {
                if (pattern.counts[i] > 0) {
                    mask |= std::uint64_t{1} << i;
                }
            }
            out[mask] += pnr_probability(prog, pattern);
            return;
        }
        for (int n = 0; n <= left; ++n) {
            pattern.counts[mode] = n;
            rec(mode + 1, left - n);
        }
        pattern.counts[mode] = 0;
    };
    rec(0, cutoff);
    return out;
}

json run_gbs_formalism(const ExperimentConfig &c) {
    json rows = json::array();
    for (std::size_t i = 0; i < c.instances; ++i) {
        const RealMatrix d = random_dataset(3, 3, c.seed, i);
        const GBSProgram prog = make_program(d, c.nbars.front(), c.interp);
        const ThresholdDistribution td = threshold_distribution(prog);
        const std::vector<double> marg = hafnian_click_marginals(prog, c.photon_cutoff);
        double diff = 0.0;
        for (std::size_t k = 0; k < marg.size(); ++k) {
            diff = std::max(diff, std::abs(marg[k] - td.probabilities[k]));
        }
        rows.push_back({{"instance", i},
                        {"modes", prog.modes()},
                        {"max_abs_diff", diff},
                        {"threshold_sum", parallel::pairwise_sum(td.probabilities)},
                        {"hafnian_mass", parallel::pairwise_sum(marg)}});
    }
    return {{"photon_cutoff", c.photon_cutoff}, {"rows", rows}};
}

json run_gbs_sampler(const ExperimentConfig &c) {
    json rows = json::array();
    for (std::size_t i = 0; i < c.instances; ++i) {
        const RealMatrix d = random_dataset(5, 5, c.seed, 100 + i);
        const GBSProgram prog = make_program(d, c.nbars.front(), c.interp);
        const ThresholdDistribution td = threshold_distribution(prog);
        const auto samples = chain_rule_sample(prog, c.num_samples, derive_stream_seed(c.seed, i));
        std::vector<double> freq(td.probabilities.size(), 0.0);
        for (const ClickPattern &p : samples) {
            freq[p.mask] += 1.0;
        }
        double tv = 0.0;
        for (std::size_t k = 0; k < freq.size(); ++k) {
            tv += std::abs(freq[k] / static_cast<double>(samples.size()) - td.probabilities[k]);
        }
        rows.push_back({{"instance", i}, {"modes", prog.modes()}, {"samples", samples.size()}, {"total_variation", 0.5 * tv}});
    }
    return {{"rows", rows}};
}

}  // namespace

void ExperimentConfig::validate() const {
    static const std::vector<std::string> kinds{"bs1", "bs2", "gbs1", "gbs2", "custom", "gbs-formalism", "gbs-sampler"};
    if (std::find(kinds.begin(), kinds.end(), experiment) == kinds.end()) {
        throw ConfigError("unknown experiment '" + experiment + "'");
    }
    if (workers < 1) {
        throw ConfigError("workers must be at least 1");
    }
    if (num_samples < 1) {
        throw ConfigError("num_samples must be at least 1");
    }
    if (tau && *tau < 1) {
        throw ConfigError("tau must be at least 1");
    }
    if (nbars.empty()) {
        throw ConfigError("nbar must list at least one value");
    }
    for (double n : nbars) {
        if (!(n > 0.0)) {
            throw ConfigError("nbar values must be positive");
        }
    }
    for (int a : alphas) {
        if (a < 1 || a > 5) {
            throw ConfigError("alphas must lie in 1..5");
        }
    }
    if (experiment == "bs1" && alphas.empty() && !include_binary && dataset_path.empty()) {
        throw ConfigError("bs1 has no datasets to run");
    }
    if (b < 1 || k < 1 || trials < 1 || dataset_seeds < 1) {
        throw ConfigError("b, k, trials and dataset_seeds must be at least 1");
    }
    if (!(tf > 0.0) || !(t0 > tf)) {
        throw ConfigError("schedule needs t0 > tf > 0");
    }
    if (steps.empty() || std::find(steps.begin(), steps.end(), std::size_t{0}) != steps.end()) {
        throw ConfigError("steps must list positive step counts");
    }
    for (const auto &v : variants) {
        if (v != "real" && v != "binary") {
            throw ConfigError("variants must be 'real' or 'binary'");
        }
    }
    if (variants.empty()) {
        throw ConfigError("variants must not be empty");
    }
    if (heuristic != "bs" && heuristic != "gbs") {
        throw ConfigError("heuristic must be 'bs' or 'gbs'");
    }
    if (heuristic == "gbs" && experiment == "custom" && cost == CostKind::permanent) {
        throw ConfigError("gbs candidates may be rectangular; choose frobenius_norm or mean_value");
    }
    if (photon_cutoff < 0 || min_dims < 1) {
        throw ConfigError("photon_cutoff must be non-negative and min_dims positive");
    }
    if (dataset.binarize_threshold && !(*dataset.binarize_threshold > 0.0 && *dataset.binarize_threshold < 1.0)) {
        throw ConfigError("binarize_threshold must lie in (0, 1)");
    }
}

ExperimentConfig parse_config(std::string_view text) {
    toml::table root;
    try {
        root = toml::parse(text);
    } catch (const toml::parse_error &e) {
        throw ParseError(std::string(e.description()), e.source().begin.line);
    }
    check_keys(&root, "top level",
               {"experiment", "seed", "workers", "out", "trace", "dataset", "sampler", "bs1", "sa", "gbs", "custom"});
    ExperimentConfig c;
    read(&root, "experiment", c.experiment);
    read(&root, "seed", c.seed);
    read(&root, "workers", c.workers);
    read(&root, "out", c.out);
    read(&root, "trace", c.trace);

    const toml::table *ds = root["dataset"].as_table();
    check_keys(ds, "[dataset]", {"generator", "seed", "alpha", "binarize_threshold", "shared_block", "path"});
    std::string gen;
    if (read(ds, "generator", gen)) {
        c.dataset.generator = parse_generator(gen);
        c.dataset_set = true;
    }
    std::uint64_t dseed = 0;
    if (read(ds, "seed", dseed)) {
        c.dataset_seed = dseed;
    }
    read(ds, "alpha", c.dataset.alpha);
    double thr = 0.0;
    if (read(ds, "binarize_threshold", thr)) {
        c.dataset.binarize_threshold = thr;
    }
    read(ds, "shared_block", c.dataset.shared_block);
    read(ds, "path", c.dataset_path);

    const toml::table *sm = root["sampler"].as_table();
    check_keys(sm, "[sampler]", {"num_samples", "tau", "nbar", "nbar_interpretation", "exact"});
    read(sm, "num_samples", c.num_samples);
    int tau = 0;
    if (read(sm, "tau", tau)) {
        c.tau = tau;
    }
    read_list(sm, "nbar", c.nbars);
    std::string interp;
    if (read(sm, "nbar_interpretation", interp)) {
        c.interp = parse_interp(interp);
    }
    read(sm, "exact", c.exact);

    const toml::table *b1 = root["bs1"].as_table();
    check_keys(b1, "[bs1]", {"alphas", "include_binary", "dataset_seeds"});
    read_list(b1, "alphas", c.alphas);
    read(b1, "include_binary", c.include_binary);
    read(b1, "dataset_seeds", c.dataset_seeds);

    const toml::table *sa = root["sa"].as_table();
    check_keys(sa, "[sa]", {"b", "k", "t0", "tf", "steps", "trials", "cost"});
    read(sa, "b", c.b);
    read(sa, "k", c.k);
    read(sa, "t0", c.t0);
    read(sa, "tf", c.tf);
    read_list(sa, "steps", c.steps);
    read(sa, "trials", c.trials);
    std::string cost;
    if (read(sa, "cost", cost)) {
        c.cost = parse_cost(cost);
    }

    const toml::table *g = root["gbs"].as_table();
    check_keys(g, "[gbs]", {"variants", "accept_threshold", "min_dims", "instances", "photon_cutoff"});
    read_list(g, "variants", c.variants);
    read(g, "accept_threshold", c.accept_threshold);
    read(g, "min_dims", c.min_dims);
    read(g, "instances", c.instances);
    read(g, "photon_cutoff", c.photon_cutoff);

    const toml::table *cu = root["custom"].as_table();
    check_keys(cu, "[custom]", {"heuristic"});
    read(cu, "heuristic", c.heuristic);
    return c;
}

ExperimentConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

json config_to_json(const ExperimentConfig &c) {
    json ds{{"generator", c.dataset_set ? json(generator_name(c.dataset.generator)) : json(nullptr)},
            {"seed", c.dataset_seed ? json(*c.dataset_seed) : json(nullptr)},
            {"alpha", c.dataset.alpha},
            {"binarize_threshold", c.dataset.binarize_threshold ? json(*c.dataset.binarize_threshold) : json(nullptr)},
            {"shared_block", c.dataset.shared_block},
            {"path", c.dataset_path}};
    return {{"experiment", c.experiment},
            {"seed", c.seed},
            {"workers", c.workers},
            {"out", c.out},
            {"trace", c.trace},
            {"dataset", ds},
            {"sampler",
             {{"num_samples", c.num_samples},
              {"tau", c.tau ? json(*c.tau) : json(nullptr)},
              {"nbar", c.nbars},
              {"nbar_interpretation", interp_name(c.interp)},
              {"exact", c.exact}}},
            {"bs1", {{"alphas", c.alphas}, {"include_binary", c.include_binary}, {"dataset_seeds", c.dataset_seeds}}},
            {"sa",
             {{"b", c.b},
              {"k", c.k},
              {"t0", c.t0},
              {"tf", c.tf},
              {"steps", c.steps},
              {"trials", c.trials},
              {"cost", cost_name(c.cost)}}},
            {"gbs",
             {{"variants", c.variants},
              {"accept_threshold", c.accept_threshold},
              {"min_dims", c.min_dims},
              {"instances", c.instances},
              {"photon_cutoff", c.photon_cutoff}}},
            {"custom", {{"heuristic", c.heuristic}}}};
}

json run_experiment(const ExperimentConfig &c) {
    c.validate();
    parallel::set_worker_count(c.workers);
    const auto start = std::chrono::steady_clock::now();
    json results;
    try {
        if (c.experiment == "bs1") {
            results = run_bs1(c);
        } else if (c.experiment == "bs2") {
            results = run_bs2(c);
        } else if (c.experiment == "gbs1") {
            results = run_gbs1(c);
        } else if (c.experiment == "gbs2") {
            results = run_gbs2(c);
        } else if (c.experiment == "custom") {
            results = run_custom(c);
        } else if (c.experiment == "gbs-formalism") {
            results = run_gbs_formalism(c);
        } else {
            results = run_gbs_sampler(c);
        }
    } catch (const CapacityError &e) {
        throw CapacityError(std::string(e.what()) + "; reduce the dataset size, photon number or sample count");
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json report{{"experiment", c.experiment},
                {"config", config_to_json(c)},
                {"rng", kRngName},
                {"seed_triple", {{"seed", c.seed}, {"stream", 0}, {"worker_count", c.workers}}},
                {"results", results},
                {"timing", {{"wall_seconds", secs}}}};
    if (!c.out.empty()) {
        write_report(c.out, report);
    }
    return report;
}

std::string canonical_report(json report) {
    report.erase("timing");
    return report.dump(2);
}

void write_report(const std::string &path, const json &report) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot open output file " + path);
    }
    out << report.dump(2) << '\n';
}

json analyze(std::istream &samples, const PlantedBlock &truth, SuccessMode mode, std::optional<std::size_t> d1,
             std::optional<std::size_t> d2) {
    const SampleFile f = read_samples_jsonl(samples);
    if (!d1 && f.meta) {
        d1 = f.meta->d1;
    }
    if (!d2 && f.meta) {
        d2 = f.meta->d2;
    }
    if (!d1 || !d2) {
        throw ConfigError("analyze: d1/d2 not given and the sample file has no meta record");
    }
    SuccessCount sc;
    std::size_t records = 0;
    if (!f.clicks.empty()) {
        if (mode != SuccessMode::exact_clicks) {
            throw ConfigError("analyze: click samples need mode exact_clicks");
        }
        sc = success_estimate(f.clicks, truth, *d1, *d2);
        records = f.clicks.size();
    } else {
        if (mode == SuccessMode::exact_clicks) {
            throw ConfigError("analyze: exact_clicks needs click samples");
        }
        sc = success_estimate(f.fock, truth, *d1, *d2, mode);
        records = f.fock.size();
    }
    json j = to_json(sc);
    j["mode"] = success_mode_name(mode);
    j["records"] = records;
    j["truth"] = block_json(truth);
    return j;
}

std::vector<std::string> repro_names() {
    return {"table1-d6",    "table1-trend", "table2-reduced", "table2-full",      "gbs-formalism",
            "gbs-sampler",  "gbs1-desk",    "gbs1-desk-sampled", "gbs2-desk"};
}

ExperimentConfig repro_config(std::string_view name) {
    ExperimentConfig c;
    if (name == "table1-d6") {
        c.experiment = "bs1";
        c.alphas = {};
        c.include_binary = true;
        c.exact = true;
    } else if (name == "table1-trend") {
        c.experiment = "bs1";
        c.include_binary = false;
        c.dataset_seeds = 5;
        c.exact = true;
    } else if (name == "table2-reduced") {
        c.experiment = "bs2";
        c.dataset.generator = Generator::bs_problem2_small;
        c.dataset_set = true;
        c.b = 4;
        c.trials = 30;
        c.steps = {20, 200};
        c.num_samples = 100000;
    } else if (name == "table2-full") {
        c.experiment = "bs2";
        c.dataset.generator = Generator::bs_problem2;
        c.dataset_set = true;
        c.b = 6;
        c.trials = 100;
        c.steps = {20, 200};
        c.num_samples = 100000;
    } else if (name == "gbs-formalism") {
        c.experiment = "gbs-formalism";
        c.instances = 5;
        c.nbars = {0.5};
        c.photon_cutoff = 10;
    } else if (name == "gbs-sampler") {
        c.experiment = "gbs-sampler";
        c.instances = 1;
        c.nbars = {1.0};
        c.num_samples = 100000;
    } else if (name == "gbs1-desk" || name == "gbs1-desk-sampled") {
        c.experiment = "gbs1";
        c.nbars = {1.0, 2.0, 4.0, 6.0, 10.0};
        c.variants = {"real", "binary"};
        c.exact = name == "gbs1-desk";
        c.num_samples = 10000;
    } else if (name == "gbs2-desk") {
        c.experiment = "gbs2";
        c.nbars = {2.0};
        c.variants = {"binary"};
        c.exact = true;
    } else {
        throw ConfigError("unknown repro scenario '" + std::string(name) + "'");
    }
    return c;
}

}  // namespace phobic
