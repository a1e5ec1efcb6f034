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

#include "phobic/io.hpp"

#include <istream>
#include <ostream>
#include <string>

#include "phobic/error.hpp"

namespace phobic {

namespace {

void emit(std::ostream &os, const nlohmann::json &j) { os << j.dump() << '\n'; }

nlohmann::json counts_json(std::span<const std::uint8_t> c) {
    nlohmann::json a = nlohmann::json::array();
    for (auto x : c) {
        a.push_back(static_cast<int>(x));
    }
    return a;
}

}  // namespace

nlohmann::json meta_record(const SampleMeta &m) {
    return {{"meta",
             {{"seed", m.seed}, {"stream", m.stream}, {"worker_count", m.workers}, {"d1", m.d1}, {"d2", m.d2}}}};
}

void write_distribution_jsonl(std::ostream &os, const SampleMeta &meta, const OutcomeDistribution &dist) {
    emit(os, meta_record(meta));
    for (std::size_t i = 0; i < dist.size(); ++i) {
        emit(os, {{"index", i}, {"mode_counts", counts_json(dist.counts(i))}, {"probability", dist.probability(i)}});
    }
}

void write_samples_jsonl(std::ostream &os, const SampleMeta &meta, std::span<const FockState> samples) {
    emit(os, meta_record(meta));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        emit(os, {{"draw_index", i}, {"mode_counts", samples[i].counts}});
    }
}

void write_clicks_jsonl(std::ostream &os, const SampleMeta &meta, std::span<const ClickPattern> samples) {
    emit(os, meta_record(meta));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const DecodedClicks dc = decode_clicks(samples[i], meta.d1, meta.d2);
        std::vector<int> bits(samples[i].modes);
        for (std::size_t m = 0; m < bits.size(); ++m) {
            bits[m] = samples[i].clicked(m) ? 1 : 0;
        }
        emit(os, {{"draw_index", i}, {"clicks", bits}, {"rows", dc.rows}, {"cols", dc.cols}});
    }
}

void write_click_distribution_jsonl(std::ostream &os, const SampleMeta &meta, const ThresholdDistribution &dist) {
    emit(os, meta_record(meta));
    for (std::uint64_t mask = 0; mask < dist.probabilities.size(); ++mask) {
        const ClickPattern p{mask, dist.modes};
        const DecodedClicks dc = decode_clicks(p, meta.d1, meta.d2);
        std::vector<int> bits(dist.modes);
        for (std::size_t m = 0; m < bits.size(); ++m) {
            bits[m] = p.clicked(m) ? 1 : 0;
        }
        emit(os, {{"clicks", bits}, {"rows", dc.rows}, {"cols", dc.cols}, {"probability", dist.probabilities[mask]}});
    }
}

SampleFile read_samples_jsonl(std::istream &is) {
    SampleFile out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            const nlohmann::json j = nlohmann::json::parse(line);
            if (!j.is_object()) {
                throw ParseError("record is not a JSON object", lineno);
            }
            if (j.contains("meta")) {
                const auto &m = j.at("meta");
                out.meta = SampleMeta{m.at("seed").get<std::uint64_t>(), m.at("stream").get<std::uint64_t>(),
                                      m.at("worker_count").get<int>(), m.at("d1").get<std::size_t>(),
                                      m.at("d2").get<std::size_t>()};
            } else if (j.contains("mode_counts")) {
                if (!out.clicks.empty()) {
                    throw ParseError("mixed Fock and click records", lineno);
                }
                FockState s{j.at("mode_counts").get<std::vector<int>>()};
                for (int c : s.counts) {
                    if (c < 0) {
                        throw ParseError("negative photon count", lineno);
                    }
                }
                out.fock.push_back(std::move(s));
            } else if (j.contains("clicks")) {
                if (!out.fock.empty()) {
                    throw ParseError("mixed Fock and click records", lineno);
                }
                const auto bits = j.at("clicks").get<std::vector<int>>();
                if (bits.size() > kMaxClickModes) {
                    throw ParseError("click pattern longer than 63 modes", lineno);
                }
                ClickPattern p{0, bits.size()};
                for (std::size_t m = 0; m < bits.size(); ++m) {
                    if (bits[m] != 0 && bits[m] != 1) {
                        throw ParseError("click entries must be 0 or 1", lineno);
                    }
                    if (bits[m] == 1) {
                        p.mask |= std::uint64_t{1} << m;
                    }
                }
                out.clicks.push_back(p);
            } else {
                throw ParseError("record has neither mode_counts nor clicks", lineno);
            }
        } catch (const ParseError &) {
            throw;
        } catch (const nlohmann::json::exception &e) {
            throw ParseError(std::string("malformed record: ") + e.what(), lineno);
        }
    }
    return out;
}

nlohmann::json to_json(const SaStepRecord &r) {
    return {{"kind", "sa_step"}, {"trial", r.trial}, {"step", r.step},   {"temperature", r.temperature},
            {"cols", r.cols},    {"rows", r.rows},   {"cost", r.cost},   {"accepted", r.accepted},
            {"tau", r.tau}};
}

nlohmann::json to_json(const GbsAcceptRecord &r) {
    return {{"kind", "gbs_accept"}, {"iteration", r.iteration}, {"sample_index", r.sample_index},
            {"rows", r.rows},       {"cols", r.cols},           {"cost", r.cost}};
}

nlohmann::json to_json(const Bicluster &b) {
    return {{"rows", b.rows}, {"cols", b.cols}, {"cost", b.cost}, {"cost_fn", cost_name(b.cost_fn)}};
}

nlohmann::json to_json(const SuccessCount &s) {
    nlohmann::json j{{"numerator", s.numerator}, {"denominator", s.denominator}};
    if (const auto p = s.probability()) {
        j["probability"] = *p;
    } else {
        j["probability"] = "undefined";
    }
    return j;
}

void JsonlTraceSink::sa_step(const SaStepRecord &r) { emit(os_, to_json(r)); }

void JsonlTraceSink::gbs_accept(const GbsAcceptRecord &r) { emit(os_, to_json(r)); }

}  // namespace phobic
