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

#include <gtest/gtest.h>

#include <sstream>

#include "phobic/error.hpp"
#include "phobic/harness.hpp"
#include "phobic/io.hpp"

namespace phobic {
namespace {

using nlohmann::json;

TEST(ParseConfig, AllSections) {
    const ExperimentConfig c = parse_config(R"(
experiment = "bs2"
seed = 42
workers = 2
out = "report.json"

[dataset]
generator = "bs_problem2_small"
seed = 9
alpha = 3
binarize_threshold = 0.7
shared_block = false

[sampler]
num_samples = 5000
tau = 2
nbar = [1.0, 4.0]
nbar_interpretation = "per-mode"
exact = true

[bs1]
alphas = [1, 5]
include_binary = false
dataset_seeds = 3

[sa]
b = 4
k = 2
t0 = 50.0
tf = 0.1
steps = [10, 30]
trials = 7
cost = "frobenius_norm"

[gbs]
variants = ["binary"]
accept_threshold = 0.8
min_dims = 3
instances = 2
photon_cutoff = 8

[custom]
heuristic = "gbs"
)");
    EXPECT_EQ(c.experiment, "bs2");
    EXPECT_EQ(c.seed, 42U);
    EXPECT_EQ(c.workers, 2);
    EXPECT_EQ(c.out, "report.json");
    EXPECT_TRUE(c.dataset_set);
    EXPECT_EQ(c.dataset.generator, Generator::bs_problem2_small);
    EXPECT_EQ(c.dataset_seed, 9U);
    EXPECT_EQ(c.dataset.alpha, 3);
    EXPECT_EQ(c.dataset.binarize_threshold, 0.7);
    EXPECT_FALSE(c.dataset.shared_block);
    EXPECT_EQ(c.num_samples, 5000U);
    EXPECT_EQ(c.tau, 2);
    EXPECT_EQ(c.nbars, (std::vector<double>{1.0, 4.0}));
    EXPECT_EQ(c.interp, NbarInterpretation::per_mode);
    EXPECT_TRUE(c.exact);
    EXPECT_EQ(c.alphas, (std::vector<int>{1, 5}));
    EXPECT_FALSE(c.include_binary);
    EXPECT_EQ(c.dataset_seeds, 3U);
    EXPECT_EQ(c.b, 4U);
    EXPECT_EQ(c.k, 2U);
    EXPECT_EQ(c.t0, 50.0);
    EXPECT_EQ(c.tf, 0.1);
    EXPECT_EQ(c.steps, (std::vector<std::size_t>{10, 30}));
    EXPECT_EQ(c.trials, 7U);
    EXPECT_EQ(c.cost, CostKind::frobenius_norm);
    EXPECT_EQ(c.variants, (std::vector<std::string>{"binary"}));
    EXPECT_EQ(c.accept_threshold, 0.8);
    EXPECT_EQ(c.min_dims, 3U);
    EXPECT_EQ(c.instances, 2U);
    EXPECT_EQ(c.photon_cutoff, 8);
    EXPECT_EQ(c.heuristic, "gbs");
}

TEST(ParseConfig, ScalarNbarAndDefaults) {
    const ExperimentConfig c = parse_config("[sampler]\nnbar = 6.0\n");
    EXPECT_EQ(c.nbars, (std::vector<double>{6.0}));
    EXPECT_EQ(c.experiment, "bs1");
    EXPECT_EQ(c.num_samples, 100000U);
    EXPECT_FALSE(c.dataset_set);
    EXPECT_EQ(c.interp, NbarInterpretation::total);
}

TEST(ParseConfig, Errors) {
    EXPECT_THROW(parse_config("bogus = 1\n"), ConfigError);
    EXPECT_THROW(parse_config("[sa]\nsteps_count = 3\n"), ConfigError);
    EXPECT_THROW(parse_config("[dataset]\ngenerator = \"nope\"\n"), ConfigError);
    EXPECT_THROW(parse_config("seed = \"one\"\n"), ConfigError);
    try {
        parse_config("seed = 1\n\n[sa\n");
        FAIL() << "malformed TOML accepted";
    } catch (const ParseError &e) {
        EXPECT_EQ(e.line(), 3U);
    }
}

TEST(ConfigValidate, RejectsBadValues) {
    ExperimentConfig c;
    c.num_samples = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = ExperimentConfig{};
    c.experiment = "bs9";
    EXPECT_THROW(c.validate(), ConfigError);
    c = ExperimentConfig{};
    c.variants = {"grey"};
    EXPECT_THROW(c.validate(), ConfigError);
    c = ExperimentConfig{};
    c.tf = 200.0;
    EXPECT_THROW(c.validate(), ConfigError);
    EXPECT_NO_THROW(ExperimentConfig{}.validate());
}

TEST(ConfigJson, EchoesResolvedValues) {
    ExperimentConfig c;
    c.seed = 5;
    c.nbars = {3.0};
    const json j = config_to_json(c);
    EXPECT_EQ(j["seed"], 5);
    EXPECT_EQ(j["sampler"]["nbar"], json::array({3.0}));
    EXPECT_EQ(j["sa"]["cost"], "permanent");
}

TEST(RunExperiment, BinaryBlockExactIsCertain) {
    const ExperimentConfig c = repro_config("table1-d6");
    const json r = run_experiment(c);
    ASSERT_EQ(r["results"]["rows"].size(), 1U);
    const json &row = r["results"]["rows"][0];
    EXPECT_EQ(row["dataset"], "D6");
    EXPECT_EQ(row["outcomes"], 475020);
    EXPECT_NEAR(row["tau1"]["probability"].get<double>(), 1.0, 1e-12);
    EXPECT_NEAR(row["tau3"]["probability"].get<double>(), 1.0, 1e-12);
    EXPECT_TRUE(r.contains("timing"));
    EXPECT_EQ(r["seed_triple"]["worker_count"], 1);
}

TEST(RunExperiment, SampledBs1ReportsConsistentTriples) {
    ExperimentConfig c;
    c.experiment = "bs1";
    c.alphas = {1};
    c.include_binary = false;
    c.num_samples = 20000;
    const json r = run_experiment(c);
    for (const char *key : {"tau1", "tau3", "no_postselection"}) {
        const json &t = r["results"]["rows"][0][key];
        EXPECT_LE(t["numerator"].get<double>(), t["denominator"].get<double>());
    }
    EXPECT_EQ(canonical_report(r), canonical_report(run_experiment(c)));
}

TEST(RunExperiment, CustomGbsDeterministic) {
    ExperimentConfig c;
    c.experiment = "custom";
    c.heuristic = "gbs";
    c.cost = CostKind::mean_value;
    c.dataset.generator = Generator::gbs_problem2_small;
    c.dataset.binarize_threshold = 0.7;
    c.dataset_set = true;
    c.k = 2;
    c.num_samples = 2000;
    const json a = run_experiment(c);
    EXPECT_EQ(canonical_report(a), canonical_report(run_experiment(c)));
    EXPECT_FALSE(a["results"]["biclusters"].empty());
}

TEST(RunExperiment, ReducedBs2Deterministic) {
    ExperimentConfig c = repro_config("table2-reduced");
    c.trials = 2;
    c.steps = {3};
    c.num_samples = 2000;
    const json a = run_experiment(c);
    EXPECT_EQ(canonical_report(a), canonical_report(run_experiment(c)));
    EXPECT_EQ(a["results"]["per_p"][0]["trials"].size(), 2U);
}

TEST(CanonicalReport, DropsTiming) {
    const json r{{"a", 1}, {"timing", {{"wall_seconds", 3.0}}}};
    EXPECT_EQ(canonical_report(r), json({{"a", 1}}).dump(2));
}

TEST(Repro, NamesResolve) {
    for (const std::string &n : repro_names()) {
        EXPECT_NO_THROW(repro_config(n).validate()) << n;
    }
    EXPECT_THROW(repro_config("table9"), ConfigError);
}

TEST(Analyze, FockTriple) {
    std::stringstream ss;
    const std::vector<FockState> samples{FockState{{1, 1, 0, 0}}, FockState{{1, 0, 1, 0}}, FockState{{0, 0, 0, 2}}};
    write_samples_jsonl(ss, SampleMeta{1, 0, 1, 3, 1}, samples);
    const json j = analyze(ss, PlantedBlock{{0, 1}, {0}}, SuccessMode::exact_rows_tau1);
    EXPECT_EQ(j["numerator"], 1.0);
    EXPECT_EQ(j["denominator"], 2.0);
    EXPECT_EQ(j["probability"], 0.5);
    EXPECT_EQ(j["records"], 3);
}

TEST(Analyze, EmptySurvivorsAreUndefined) {
    std::stringstream ss;
    const std::vector<FockState> samples(4, FockState{{0, 0, 0, 2}});
    write_samples_jsonl(ss, SampleMeta{1, 0, 1, 3, 1}, samples);
    const json j = analyze(ss, PlantedBlock{{0, 1}, {0}}, SuccessMode::exact_rows_tau1);
    EXPECT_EQ(j["probability"], "undefined");
    EXPECT_EQ(j["denominator"], 0.0);
}

TEST(Analyze, PerfectClicks) {
    std::stringstream ss;
    const std::vector<ClickPattern> clicks(3, ClickPattern{0b101, 3});
    write_clicks_jsonl(ss, SampleMeta{1, 0, 1, 2, 1}, clicks);
    const json j = analyze(ss, PlantedBlock{{0}, {0}}, SuccessMode::exact_clicks);
    EXPECT_EQ(j["probability"], 1.0);
}

TEST(Analyze, NeedsDimensions) {
    std::stringstream ss("{\"draw_index\":0,\"mode_counts\":[1,0]}\n");
    EXPECT_THROW(analyze(ss, PlantedBlock{{0}, {0}}, SuccessMode::exact_rows_tau1), ConfigError);
}

TEST(SamplesJsonl, RoundTripAndLineNumbers) {
    std::stringstream ss;
    const std::vector<FockState> samples{FockState{{0, 2, 1}}, FockState{{3, 0, 0}}};
    write_samples_jsonl(ss, SampleMeta{7, 2, 4, 2, 1}, samples);
    const SampleFile f = read_samples_jsonl(ss);
    ASSERT_TRUE(f.meta.has_value());
    EXPECT_EQ(f.meta->seed, 7U);
    EXPECT_EQ(f.meta->stream, 2U);
    EXPECT_EQ(f.meta->workers, 4);
    EXPECT_EQ(f.fock, samples);

    std::stringstream bad("{\"meta\":{\"seed\":1,\"stream\":0,\"worker_count\":1,\"d1\":1,\"d2\":1}}\n"
                          "{\"draw_index\":0,\"mode_counts\":[1,0]}\n"
                          "{not json}\n");
    try {
        read_samples_jsonl(bad);
        FAIL() << "malformed record accepted";
    } catch (const ParseError &e) {
        EXPECT_EQ(e.line(), 3U);
    }
}

TEST(ClicksJsonl, RoundTrip) {
    std::stringstream ss;
    const std::vector<ClickPattern> clicks{ClickPattern{0b0110, 4}, ClickPattern{0, 4}};
    write_clicks_jsonl(ss, SampleMeta{1, 0, 1, 2, 2}, clicks);
    const SampleFile f = read_samples_jsonl(ss);
    EXPECT_EQ(f.clicks, clicks);
    EXPECT_TRUE(f.fock.empty());
}

TEST(TraceJsonl, OneRecordPerLine) {
    std::stringstream ss;
    JsonlTraceSink sink(ss);
    sink.sa_step(SaStepRecord{0, 3, 1.5, {1, 2}, {4}, 0.25, true, 1});
    sink.gbs_accept(GbsAcceptRecord{1, 17, {0, 1}, {2, 3}, 0.9});
    std::string line;
    std::getline(ss, line);
    const json a = json::parse(line);
    EXPECT_EQ(a["step"], 3);
    EXPECT_EQ(a["accepted"], true);
    std::getline(ss, line);
    const json b = json::parse(line);
    EXPECT_EQ(b["sample_index"], 17);
    EXPECT_FALSE(std::getline(ss, line));
}

}  // namespace
}  // namespace phobic
