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

#include "phobic/datasets.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "phobic/rng.hpp"

namespace phobic {

namespace {

using json = nlohmann::json;

constexpr std::array<double, 3> kBlockLevels = {0.7, 0.8, 0.9};

// RNG stream layout for one master seed.
constexpr std::uint64_t kSharedBlockStream = 0;
constexpr std::uint64_t kPerAlphaBlockStream = 10;
constexpr std::uint64_t kBackgroundStream = 100;
constexpr std::uint64_t kMultiBlockStream = 200;
constexpr std::uint64_t kMultiBackgroundStream = 201;
constexpr std::uint64_t kRowShuffleStream = 1000;
constexpr std::uint64_t kColShuffleStream = 1001;

std::vector<std::size_t> iota_from(std::size_t first, std::size_t count) {
    std::vector<std::size_t> v(count);
    std::iota(v.begin(), v.end(), first);
    return v;
}

// Fills block cells (row-major, block by block) from `block_value` and every other cell
// (row-major) from `background`.
RealMatrix planted_matrix(std::size_t rows, std::size_t cols, const std::vector<PlantedBlock> &blocks,
                          const std::function<double()> &block_value, const std::function<double()> &background) {
    RealMatrix m(rows, cols);
    std::vector<char> in_block(rows * cols, 0);
    for (const auto &b : blocks) {
        for (std::size_t i : b.rows) {
            for (std::size_t j : b.cols) {
                m(i, j) = block_value();
                in_block[i * cols + j] = 1;
            }
        }
    }
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            if (!in_block[i * cols + j]) {
                m(i, j) = background();
            }
        }
    }
    return m;
}

std::vector<std::size_t> random_permutation(std::size_t n, Rng &rng) {
    std::vector<std::size_t> p = iota_from(0, n);
    for (std::size_t i = n; i > 1; --i) {
        std::swap(p[i - 1], p[rng.below(i)]);
    }
    return p;
}

Dataset discrete_planted(std::string name, std::size_t size, std::vector<PlantedBlock> blocks, int alpha,
                         std::uint64_t seed, bool shared_block) {
    if (alpha < 1 || alpha > 5) {
        throw DomainError("alpha must lie in 1..5, got " + std::to_string(alpha));
    }
    Rng block_rng(seed, shared_block ? kSharedBlockStream : kPerAlphaBlockStream + static_cast<std::uint64_t>(alpha));
    Rng bg_rng(seed, kBackgroundStream + static_cast<std::uint64_t>(alpha));
    const auto levels = static_cast<std::size_t>(alpha) + 1;
    Dataset d;
    d.values = planted_matrix(
        size, size, blocks, [&] { return kBlockLevels[block_rng.below(kBlockLevels.size())]; },
        [&] { return static_cast<double>(bg_rng.below(levels)) / 10.0; });
    d.generator = std::move(name);
    d.seed = seed;
    d.alpha = alpha;
    d.shared_block = shared_block;
    d.truth.blocks = std::move(blocks);
    return d;
}

Dataset continuous_planted(std::string name, std::size_t size, std::size_t block, std::size_t count,
                           std::uint64_t seed) {
    std::vector<PlantedBlock> blocks;
    for (std::size_t b = 0; b < count; ++b) {
        blocks.push_back({iota_from(b * block, block), iota_from(b * block, block)});
    }
    Rng block_rng(seed, kMultiBlockStream);
    Rng bg_rng(seed, kMultiBackgroundStream);
    Dataset d;
    d.values = planted_matrix(
        size, size, blocks, [&] { return block_rng.uniform(0.7, 0.9); }, [&] { return bg_rng.uniform(0.0, 0.2); });
    d.generator = std::move(name);
    d.seed = seed;
    d.truth.blocks = std::move(blocks);
    return shuffle(d, seed);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(std::string_view s, std::size_t line) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError("dataset: malformed number '" + std::string(s) + "'", line);
    }
    return v;
}

json blocks_to_json(const std::vector<PlantedBlock> &blocks) {
    json arr = json::array();
    for (const auto &b : blocks) {
        arr.push_back({{"rows", b.rows}, {"cols", b.cols}});
    }
    return arr;
}

}  // namespace

std::vector<PlantedBlock> GroundTruth::located() const {
    auto position_of = [](const std::vector<std::size_t> &perm, std::size_t original) {
        if (perm.empty()) {
            return original;
        }
        const auto it = std::find(perm.begin(), perm.end(), original);
        return static_cast<std::size_t>(it - perm.begin());
    };
    std::vector<PlantedBlock> out;
    for (const auto &b : blocks) {
        PlantedBlock p;
        for (std::size_t r : b.rows) {
            p.rows.push_back(position_of(row_perm, r));
        }
        for (std::size_t c : b.cols) {
            p.cols.push_back(position_of(col_perm, c));
        }
        std::sort(p.rows.begin(), p.rows.end());
        std::sort(p.cols.begin(), p.cols.end());
        out.push_back(std::move(p));
    }
    return out;
}

std::string_view generator_name(Generator g) {
    switch (g) {
        case Generator::bs_problem1: return "bs_problem1";
        case Generator::bs_problem1_binary: return "bs_problem1_binary";
        case Generator::bs_problem2: return "bs_problem2";
        case Generator::gbs_problem2: return "gbs_problem2";
        case Generator::bs_problem2_small: return "bs_problem2_small";
        case Generator::gbs_problem1_small: return "gbs_problem1_small";
        case Generator::gbs_problem2_small: return "gbs_problem2_small";
    }
    return "unknown";
}

Generator parse_generator(std::string_view name) {
    for (auto g : {Generator::bs_problem1, Generator::bs_problem1_binary, Generator::bs_problem2,
                   Generator::gbs_problem2, Generator::bs_problem2_small, Generator::gbs_problem1_small,
                   Generator::gbs_problem2_small}) {
        if (generator_name(g) == name) {
            return g;
        }
    }
    throw ConfigError("unknown dataset generator '" + std::string(name) + "'");
}

Dataset gen_bs_problem1(int alpha, std::uint64_t seed, bool shared_block) {
    const auto block = iota_from(3, 6);
    return discrete_planted("bs_problem1", 12, {{block, block}}, alpha, seed, shared_block);
}

Dataset gen_bs_problem1_binary(std::uint64_t seed) {
    const auto block = iota_from(3, 6);
    Dataset d;
    d.values = RealMatrix(12, 12);
    for (std::size_t i : block) {
        for (std::size_t j : block) {
            d.values(i, j) = 1.0;
        }
    }
    d.generator = "bs_problem1_binary";
    d.seed = seed;
    d.truth.blocks = {{block, block}};
    return d;
}

Dataset shuffle(const Dataset &d, std::uint64_t seed) {
    Rng row_rng(seed, kRowShuffleStream);
    Rng col_rng(seed, kColShuffleStream);
    const auto p = random_permutation(d.values.rows(), row_rng);
    const auto q = random_permutation(d.values.cols(), col_rng);
    Dataset out = d;
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = 0; j < q.size(); ++j) {
            out.values(i, j) = d.values(p[i], q[j]);
        }
    }
    out.truth.row_perm.resize(p.size());
    out.truth.col_perm.resize(q.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        out.truth.row_perm[i] = d.truth.row_perm.empty() ? p[i] : d.truth.row_perm[p[i]];
    }
    for (std::size_t j = 0; j < q.size(); ++j) {
        out.truth.col_perm[j] = d.truth.col_perm.empty() ? q[j] : d.truth.col_perm[q[j]];
    }
    return out;
}

Dataset gen_gbs_problem2(std::uint64_t seed) { return continuous_planted("gbs_problem2", 12, 4, 3, seed); }

Dataset gen_bs_problem2(std::uint64_t seed) {
    Dataset d = shuffle(gen_bs_problem1(2, seed), seed);
    d.generator = "bs_problem2";
    return d;
}

Dataset gen_bs_problem2_small(std::uint64_t seed) {
    const auto block = iota_from(2, 4);
    Dataset d = shuffle(discrete_planted("bs_problem2_small", 8, {{block, block}}, 2, seed, true), seed);
    return d;
}

Dataset gen_gbs_problem1_small(std::uint64_t seed) {
    const auto block = iota_from(1, 3);
    return shuffle(discrete_planted("gbs_problem1_small", 6, {{block, block}}, 2, seed, true), seed);
}

Dataset gen_gbs_problem2_small(std::uint64_t seed) { return continuous_planted("gbs_problem2_small", 6, 3, 2, seed); }

RealMatrix binarize(const RealMatrix &d, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw DomainError("binarize: threshold must lie in (0, 1)");
    }
    RealMatrix out(d.rows(), d.cols());
    for (std::size_t k = 0; k < d.size(); ++k) {
        out.data()[k] = d.data()[k] >= threshold ? 1.0 : 0.0;
    }
    return out;
}

Dataset generate(const SyntheticSpec &spec) {
    Dataset d;
    switch (spec.generator) {
        case Generator::bs_problem1: d = gen_bs_problem1(spec.alpha, spec.seed, spec.shared_block); break;
        case Generator::bs_problem1_binary: d = gen_bs_problem1_binary(spec.seed); break;
        case Generator::bs_problem2: d = gen_bs_problem2(spec.seed); break;
        case Generator::gbs_problem2: d = gen_gbs_problem2(spec.seed); break;
        case Generator::bs_problem2_small: d = gen_bs_problem2_small(spec.seed); break;
        case Generator::gbs_problem1_small: d = gen_gbs_problem1_small(spec.seed); break;
        case Generator::gbs_problem2_small: d = gen_gbs_problem2_small(spec.seed); break;
    }
    if (spec.binarize_threshold) {
        d.values = binarize(d.values, *spec.binarize_threshold);
        d.threshold = spec.binarize_threshold;
    }
    return d;
}

void write_dataset_csv(std::ostream &os, const Dataset &d) {
    json header = {
        {"generator", d.generator},
        {"seed", d.seed},
        {"alpha", d.alpha},
        {"threshold", d.threshold ? json(*d.threshold) : json(nullptr)},
        {"shared_block", d.shared_block},
        {"rng", kRngName},
        {"rows", d.values.rows()},
        {"cols", d.values.cols()},
        {"truth", {{"blocks", blocks_to_json(d.truth.blocks)},
                   {"row_perm", d.truth.row_perm},
                   {"col_perm", d.truth.col_perm}}},
    };
    os << "# " << header.dump() << '\n';
    for (std::size_t i = 0; i < d.values.rows(); ++i) {
        for (std::size_t j = 0; j < d.values.cols(); ++j) {
            if (j > 0) {
                os << ',';
            }
            os << format_double(d.values(i, j));
        }
        os << '\n';
    }
}

Dataset read_dataset_csv(std::istream &is) {
    Dataset d;
    std::string line;
    std::size_t line_no = 0;
    std::vector<double> entries;
    std::size_t rows = 0;
    std::size_t cols = 0;
    bool have_header = false;
    json header;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            if (line_no != 1) {
                continue;
            }
            try {
                header = json::parse(line.substr(1));
            } catch (const json::exception &e) {
                throw ParseError(std::string("dataset: malformed header: ") + e.what(), line_no);
            }
            have_header = true;
            continue;
        }
        std::size_t count = 0;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            const std::string_view cell(line.data() + start,
                                        (comma == std::string::npos ? line.size() : comma) - start);
            entries.push_back(parse_double(cell, line_no));
            ++count;
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        if (rows == 0) {
            cols = count;
        } else if (count != cols) {
            throw ParseError("dataset: ragged row", line_no);
        }
        ++rows;
    }
    d.values = RealMatrix(rows, cols, std::move(entries));
    if (have_header) {
        try {
            d.generator = header.at("generator").get<std::string>();
            d.seed = header.at("seed").get<std::uint64_t>();
            d.alpha = header.value("alpha", 0);
            if (header.contains("threshold") && !header["threshold"].is_null()) {
                d.threshold = header["threshold"].get<double>();
            }
            d.shared_block = header.value("shared_block", true);
            const auto &truth = header.at("truth");
            for (const auto &b : truth.at("blocks")) {
                d.truth.blocks.push_back(
                    {b.at("rows").get<std::vector<std::size_t>>(), b.at("cols").get<std::vector<std::size_t>>()});
            }
            d.truth.row_perm = truth.at("row_perm").get<std::vector<std::size_t>>();
            d.truth.col_perm = truth.at("col_perm").get<std::vector<std::size_t>>();
            if (header.at("rows").get<std::size_t>() != rows || header.at("cols").get<std::size_t>() != cols) {
                throw ParseError("dataset: header dimensions disagree with the data", 1);
            }
        } catch (const json::exception &e) {
            throw ParseError(std::string("dataset: header field error: ") + e.what(), 1);
        }
    }
    return d;
}

void save_dataset(const std::string &path, const Dataset &d) {
    std::ofstream os(path);
    if (!os) {
        throw ConfigError("cannot open '" + path + "' for writing");
    }
    write_dataset_csv(os, d);
}

Dataset load_dataset(const std::string &path) {
    std::ifstream is(path);
    if (!is) {
        throw ConfigError("cannot open dataset '" + path + "'");
    }
    return read_dataset_csv(is);
}

}  // namespace phobic
