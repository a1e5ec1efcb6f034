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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "phobic/biclustering.hpp"
#include "phobic/datasets.hpp"
#include "phobic/gbs.hpp"

namespace phobic {

/// Experiment kinds: bs1, bs2, gbs1, gbs2, custom, plus the gbs-formalism and
/// gbs-sampler consistency checks used by the repro scenarios.
struct ExperimentConfig {
    std::string experiment = "bs1";
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out;
    std::string trace;

    // [dataset]
    SyntheticSpec dataset;
    bool dataset_set = false;  // generator given explicitly; otherwise each experiment picks its own
    std::optional<std::uint64_t> dataset_seed;  // defaults to the master seed
    std::string dataset_path;

    // [sampler]
    std::size_t num_samples = 100000;
    std::optional<int> tau;  // SA postselection cap; defaults to b - 1
    std::vector<double> nbars{2.0};
    NbarInterpretation interp = NbarInterpretation::total;
    bool exact = false;

    // [bs1]
    std::vector<int> alphas{1, 2, 3, 4, 5};
    bool include_binary = true;
    std::size_t dataset_seeds = 1;

    // [sa]
    std::size_t b = 6;
    std::size_t k = 1;
    double t0 = 100.0;
    double tf = 0.01;
    std::vector<std::size_t> steps{20, 200};
    std::size_t trials = 100;
    CostKind cost = CostKind::permanent;

    // [gbs]
    std::vector<std::string> variants{"real", "binary"};
    double accept_threshold = 0.6;
    std::size_t min_dims = 2;
    std::size_t instances = 5;
    int photon_cutoff = 10;

    // [custom]
    std::string heuristic = "bs";

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

ExperimentConfig parse_config(std::string_view toml_text);
ExperimentConfig load_config(const std::string &path);
nlohmann::json config_to_json(const ExperimentConfig &cfg);

/// Runs one experiment end to end. The report's "timing" member holds wall times and is
/// the only field that may differ between identical runs.
nlohmann::json run_experiment(const ExperimentConfig &cfg);

/// Report serialised without the "timing" member.
std::string canonical_report(nlohmann::json report);

/// Writes report JSON (2-space indent, trailing newline) to `path`.
void write_report(const std::string &path, const nlohmann::json &report);

/// Success triple for a JSONL sample file. d1/d2 default to the file's meta record.
nlohmann::json analyze(std::istream &samples, const PlantedBlock &truth, SuccessMode mode,
                       std::optional<std::size_t> d1 = std::nullopt, std::optional<std::size_t> d2 = std::nullopt);

std::vector<std::string> repro_names();
ExperimentConfig repro_config(std::string_view name);

}  // namespace phobic
