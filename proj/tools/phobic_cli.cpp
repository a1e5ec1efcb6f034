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

// Command-line front end: dataset generation, raw sampling dumps, heuristic runs,
// offline analysis and the named reproduction scenarios.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phobic/biclustering.hpp"
#include "phobic/boson_sampling.hpp"
#include "phobic/datasets.hpp"
#include "phobic/error.hpp"
#include "phobic/gbs.hpp"
#include "phobic/harness.hpp"
#include "phobic/io.hpp"
#include "phobic/parallel.hpp"

namespace {

using namespace phobic;

struct Globals {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    std::optional<int> tau;
    std::optional<double> nbar;
    std::optional<std::string> interp;
    std::optional<int> workers;
    std::string out;
    bool exact = false;
};

struct DatasetArgs {
    std::string path;
    std::string generator = "bs_problem1";
    int alpha = 1;
    std::optional<double> threshold;
    bool independent_blocks = false;
    std::optional<std::uint64_t> dataset_seed;
};

void add_dataset_options(CLI::App *sub, DatasetArgs &a) {
    sub->add_option("--dataset", a.path, "Dataset CSV file (overrides --generator)");
    sub->add_option("--generator", a.generator, "Synthetic generator name");
    sub->add_option("--alpha", a.alpha, "Background level for bs_problem1 (1..5)");
    sub->add_option("--threshold", a.threshold, "Binarize entries >= threshold");
    sub->add_option("--dataset-seed", a.dataset_seed, "Dataset seed (defaults to --seed)");
    sub->add_flag("--independent-blocks", a.independent_blocks, "Draw a fresh planted block per alpha");
}

Dataset load_or_generate(const DatasetArgs &a, const Globals &g) {
    if (!a.path.empty()) {
        Dataset d = load_dataset(a.path);
        if (a.threshold) {
            d.values = binarize(d.values, *a.threshold);
            d.threshold = a.threshold;
        }
        return d;
    }
    SyntheticSpec s;
    s.generator = parse_generator(a.generator);
    s.seed = a.dataset_seed.value_or(g.seed.value_or(1));
    s.alpha = a.alpha;
    s.binarize_threshold = a.threshold;
    s.shared_block = !a.independent_blocks;
    return generate(s);
}

// Writes to --out when given, stdout otherwise.
class Output {
  public:
    explicit Output(const std::string &path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) {
                throw ConfigError("cannot open output file " + path);
            }
        }
    }
    std::ostream &stream() { return file_ ? *file_ : std::cout; }

  private:
    std::unique_ptr<std::ofstream> file_;
};

ExperimentConfig base_config(const Globals &g) {
    return g.config.empty() ? ExperimentConfig{} : load_config(g.config);
}

void apply_overrides(ExperimentConfig &c, const Globals &g) {
    if (g.seed) {
        c.seed = *g.seed;
    }
    if (g.samples) {
        c.num_samples = *g.samples;
    }
    if (g.tau) {
        c.tau = *g.tau;
    }
    if (g.nbar) {
        c.nbars = {*g.nbar};
    }
    if (g.interp) {
        c.interp = *g.interp == "total" ? NbarInterpretation::total : NbarInterpretation::per_mode;
    }
    if (g.workers) {
        c.workers = *g.workers;
    }
    if (!g.out.empty()) {
        c.out = g.out;
    }
    if (g.exact) {
        c.exact = true;
    }
}

void apply_dataset(ExperimentConfig &c, const DatasetArgs &a, bool given) {
    if (!given) {
        return;
    }
    if (!a.path.empty()) {
        c.dataset_path = a.path;
        return;
    }
    c.dataset.generator = parse_generator(a.generator);
    c.dataset.alpha = a.alpha;
    c.dataset.binarize_threshold = a.threshold;
    c.dataset.shared_block = !a.independent_blocks;
    c.dataset_set = true;
    if (a.dataset_seed) {
        c.dataset_seed = a.dataset_seed;
    }
}

std::vector<std::size_t> default_columns(const Dataset &d, const std::vector<std::size_t> &cols) {
    if (!cols.empty()) {
        return cols;
    }
    const auto blocks = d.truth.located();
    if (blocks.empty()) {
        throw ConfigError("--cols is required for datasets without a planted block");
    }
    return blocks.front().cols;
}

void emit_report(const nlohmann::json &report, const Globals &g) {
    if (g.out.empty()) {
        std::cout << report.dump(2) << '\n';
    }
}

int run(int argc, char **argv) {
    CLI::App app{"phobic: boson sampling and Gaussian boson sampling for biclustering"};
    app.require_subcommand(1);
    Globals g;
    std::string interp_text;
    app.add_option("--config", g.config, "TOML experiment config")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "Master seed");
    app.add_option("--samples", g.samples, "Number of samples")->check(CLI::PositiveNumber);
    app.add_option("--tau", g.tau, "Postselection cap")->check(CLI::PositiveNumber);
    app.add_option("--nbar", g.nbar, "Mean photon number")->check(CLI::PositiveNumber);
    app.add_option("--nbar-interpretation", g.interp, "How --nbar is read")
        ->check(CLI::IsMember({"total", "per-mode"}));
    app.add_option("--workers", g.workers, "OpenMP worker count")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "Output path (stdout when omitted)");
    app.add_flag("--exact", g.exact, "Use exact distributions instead of sampling");

    auto fallthrough = [](CLI::App *s) { s->fallthrough(); };

    // gen-dataset
    DatasetArgs gen_args;
    CLI::App *gen = app.add_subcommand("gen-dataset", "Write a synthetic dataset CSV");
    add_dataset_options(gen, gen_args);
    fallthrough(gen);

    // bs-dist / bs-sample
    DatasetArgs bs_args;
    std::vector<std::size_t> bs_cols;
    CLI::App *bs_dist = app.add_subcommand("bs-dist", "Dump the exact boson-sampling distribution (JSONL)");
    add_dataset_options(bs_dist, bs_args);
    bs_dist->add_option("--cols", bs_cols, "Input columns (default: planted block)")->delimiter(',');
    fallthrough(bs_dist);
    CLI::App *bs_sample = app.add_subcommand("bs-sample", "Draw boson-sampling outcomes (JSONL)");
    add_dataset_options(bs_sample, bs_args);
    bs_sample->add_option("--cols", bs_cols, "Input columns (default: planted block)")->delimiter(',');
    fallthrough(bs_sample);

    // bs-bicluster
    DatasetArgs bsb_args;
    std::optional<std::size_t> b_opt;
    std::optional<std::size_t> k_opt;
    std::optional<std::size_t> steps_opt;
    std::optional<std::string> cost_opt;
    std::string trace;
    CLI::App *bs_bic = app.add_subcommand("bs-bicluster", "Simulated annealing with boson-sampling rows");
    add_dataset_options(bs_bic, bsb_args);
    bs_bic->add_option("--b", b_opt, "Columns per candidate");
    bs_bic->add_option("--k", k_opt, "Number of biclusters");
    bs_bic->add_option("--steps", steps_opt, "Annealing steps p");
    bs_bic->add_option("--cost", cost_opt, "permanent | frobenius_norm | mean_value");
    bs_bic->add_option("--trace", trace, "JSONL trace output");
    fallthrough(bs_bic);

    // gbs-dist / gbs-sample
    DatasetArgs gbs_args;
    CLI::App *gbs_dist = app.add_subcommand("gbs-dist", "Dump the exact click distribution (JSONL)");
    add_dataset_options(gbs_dist, gbs_args);
    fallthrough(gbs_dist);
    CLI::App *gbs_sample = app.add_subcommand("gbs-sample", "Draw click patterns with the chain-rule sampler (JSONL)");
    add_dataset_options(gbs_sample, gbs_args);
    fallthrough(gbs_sample);

    // gbs-bicluster
    DatasetArgs gbb_args;
    std::optional<double> accept_opt;
    CLI::App *gbs_bic = app.add_subcommand("gbs-bicluster", "Iterative GBS bicluster extraction");
    add_dataset_options(gbs_bic, gbb_args);
    gbs_bic->add_option("--k", k_opt, "Number of biclusters");
    gbs_bic->add_option("--accept", accept_opt, "Mean-value acceptance threshold");
    gbs_bic->add_option("--cost", cost_opt, "frobenius_norm | mean_value");
    gbs_bic->add_option("--trace", trace, "JSONL trace output");
    fallthrough(gbs_bic);

    // analyze
    std::string input;
    std::string mode_text = "exact_rows_tau1";
    DatasetArgs an_args;
    std::size_t block = 0;
    std::vector<std::size_t> an_rows;
    std::vector<std::size_t> an_cols;
    std::optional<std::size_t> d1_opt;
    std::optional<std::size_t> d2_opt;
    CLI::App *an = app.add_subcommand("analyze", "Success probability from a JSONL sample file");
    an->add_option("--input", input, "Sample JSONL file")->required()->check(CLI::ExistingFile);
    an->add_option("--mode", mode_text, "exact_rows_tau1 | subset_rows_tau3 | exact_clicks");
    add_dataset_options(an, an_args);
    an->add_option("--block", block, "Planted block index in the dataset");
    an->add_option("--rows", an_rows, "Truth rows (instead of a dataset)")->delimiter(',');
    an->add_option("--truth-cols", an_cols, "Truth columns (instead of a dataset)")->delimiter(',');
    an->add_option("--d1", d1_opt, "Row count when the file has no meta record");
    an->add_option("--d2", d2_opt, "Column count when the file has no meta record");
    fallthrough(an);

    // repro / run
    std::string scenario;
    CLI::App *repro = app.add_subcommand("repro", "Run a named reproduction scenario");
    repro->add_option("scenario", scenario, "Scenario name")->required()->check(CLI::IsMember(repro_names()));
    fallthrough(repro);
    CLI::App *run_cmd = app.add_subcommand("run", "Run the experiment described by --config");
    fallthrough(run_cmd);

    CLI11_PARSE(app, argc, argv);

    if (g.workers) {
        parallel::set_worker_count(*g.workers);
    }
    const std::uint64_t seed = g.seed.value_or(1);
    const int workers = g.workers.value_or(parallel::worker_count());

    if (gen->parsed()) {
        const Dataset d = load_or_generate(gen_args, g);
        Output out(g.out);
        write_dataset_csv(out.stream(), d);
        return 0;
    }
    if (bs_dist->parsed() || bs_sample->parsed()) {
        const Dataset d = load_or_generate(bs_args, g);
        const DilatedUnitary u = dilate(d.values);
        const auto cols = default_columns(d, bs_cols);
        const OutcomeDistribution dist = enumerate_distribution(u, build_input(cols, u.modes()));
        const SampleMeta meta{seed, 0, workers, u.d1, u.d2};
        Output out(g.out);
        if (bs_dist->parsed()) {
            write_distribution_jsonl(out.stream(), meta, dist);
        } else {
            const auto samples = sample(dist, g.samples.value_or(100000), seed);
            write_samples_jsonl(out.stream(), meta, samples);
        }
        return 0;
    }
    if (gbs_dist->parsed() || gbs_sample->parsed()) {
        const Dataset d = load_or_generate(gbs_args, g);
        const NbarInterpretation interp =
            g.interp && *g.interp == "per-mode" ? NbarInterpretation::per_mode : NbarInterpretation::total;
        const GBSProgram prog = make_program(d.values, g.nbar.value_or(2.0), interp);
        const SampleMeta meta{seed, 0, workers, d.values.rows(), d.values.cols()};
        Output out(g.out);
        if (gbs_dist->parsed()) {
            write_click_distribution_jsonl(out.stream(), meta, threshold_distribution(prog));
        } else {
            const auto samples = chain_rule_sample(prog, g.samples.value_or(10000), seed);
            write_clicks_jsonl(out.stream(), meta, samples);
        }
        return 0;
    }
    if (bs_bic->parsed() || gbs_bic->parsed()) {
        const bool is_bs = bs_bic->parsed();
        ExperimentConfig c = base_config(g);
        const bool keep_kind =
            !g.config.empty() && (is_bs ? c.experiment == "bs2" : (c.experiment == "gbs1" || c.experiment == "gbs2"));
        if (!keep_kind) {
            c.experiment = "custom";
            c.heuristic = is_bs ? "bs" : "gbs";
            if (!is_bs && g.config.empty()) {
                c.cost = CostKind::mean_value;
            }
        }
        const DatasetArgs &da = is_bs ? bsb_args : gbb_args;
        CLI::App *sub = is_bs ? bs_bic : gbs_bic;
        const bool ds_given = sub->count("--dataset") + sub->count("--generator") + sub->count("--alpha") +
                                  sub->count("--threshold") + sub->count("--dataset-seed") >
                              0;
        apply_dataset(c, da, ds_given || (g.config.empty() && c.experiment == "custom"));
        apply_overrides(c, g);
        if (b_opt) {
            c.b = *b_opt;
        }
        if (k_opt) {
            c.k = *k_opt;
        }
        if (steps_opt) {
            c.steps = {*steps_opt};
        }
        if (cost_opt) {
            c.cost = parse_cost(*cost_opt);
        }
        if (accept_opt) {
            c.accept_threshold = *accept_opt;
        }
        if (!trace.empty()) {
            c.trace = trace;
        }
        emit_report(run_experiment(c), g);
        return 0;
    }
    if (an->parsed()) {
        PlantedBlock truth;
        std::optional<std::size_t> d1 = d1_opt;
        std::optional<std::size_t> d2 = d2_opt;
        if (!an_rows.empty()) {
            truth = {an_rows, an_cols};
        } else {
            const Dataset d = load_or_generate(an_args, g);
            const auto blocks = d.truth.located();
            if (block >= blocks.size()) {
                throw ConfigError("--block is out of range for this dataset");
            }
            truth = blocks[block];
            d1 = d1.value_or(d.values.rows());
            d2 = d2.value_or(d.values.cols());
        }
        std::ifstream in(input);
        const nlohmann::json j = analyze(in, truth, parse_success_mode(mode_text), d1, d2);
        Output out(g.out);
        out.stream() << j.dump(2) << '\n';
        return 0;
    }
    if (repro->parsed() || run_cmd->parsed()) {
        ExperimentConfig c;
        if (repro->parsed()) {
            c = repro_config(scenario);
        } else {
            if (g.config.empty()) {
                throw ConfigError("run needs --config");
            }
            c = load_config(g.config);
        }
        apply_overrides(c, g);
        emit_report(run_experiment(c), g);
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    try {
        return run(argc, argv);
    } catch (const phobic::ParseError &e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 3;
    } catch (const phobic::ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const phobic::Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
