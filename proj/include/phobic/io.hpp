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
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "phobic/biclustering.hpp"
#include "phobic/boson_sampling.hpp"
#include "phobic/gbs.hpp"

namespace phobic {

/// Leading record of every JSONL file: {"meta": {...}}.
struct SampleMeta {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    int workers = 1;
    std::size_t d1 = 0;
    std::size_t d2 = 0;
};

nlohmann::json meta_record(const SampleMeta &m);

void write_distribution_jsonl(std::ostream &os, const SampleMeta &meta, const OutcomeDistribution &dist);
void write_samples_jsonl(std::ostream &os, const SampleMeta &meta, std::span<const FockState> samples);
void write_clicks_jsonl(std::ostream &os, const SampleMeta &meta, std::span<const ClickPattern> samples);
void write_click_distribution_jsonl(std::ostream &os, const SampleMeta &meta, const ThresholdDistribution &dist);

/// Parsed JSONL sample file; exactly one of `fock` / `clicks` is populated.
struct SampleFile {
    std::optional<SampleMeta> meta;
    std::vector<FockState> fock;
    std::vector<ClickPattern> clicks;
};

/// Throws ParseError carrying the 1-based line number of the first malformed record.
SampleFile read_samples_jsonl(std::istream &is);

/// One JSON object per line for SA steps and GBS acceptances.
class JsonlTraceSink : public TraceSink {
  public:
    explicit JsonlTraceSink(std::ostream &os) : os_(os) {}

    void sa_step(const SaStepRecord &r) override;
    void gbs_accept(const GbsAcceptRecord &r) override;

  private:
    std::ostream &os_;
};

/// Collects trace records in memory.
class MemoryTraceSink : public TraceSink {
  public:
    void sa_step(const SaStepRecord &r) override { sa.push_back(r); }
    void gbs_accept(const GbsAcceptRecord &r) override { gbs.push_back(r); }

    std::vector<SaStepRecord> sa;
    std::vector<GbsAcceptRecord> gbs;
};

nlohmann::json to_json(const SaStepRecord &r);
nlohmann::json to_json(const GbsAcceptRecord &r);
nlohmann::json to_json(const Bicluster &b);
nlohmann::json to_json(const SuccessCount &s);

}  // namespace phobic
