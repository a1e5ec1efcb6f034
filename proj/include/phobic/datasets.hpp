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
#include <string>
#include <string_view>
#include <vector>

#include "phobic/matrix.hpp"

namespace phobic {

struct PlantedBlock {
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;

    friend bool operator==(const PlantedBlock &, const PlantedBlock &) = default;
};

/// Planted blocks in pre-shuffle coordinates plus the shuffle that was applied:
/// shuffled(i, j) = original(row_perm[i], col_perm[j]). Empty permutations mean identity.
struct GroundTruth {
    std::vector<PlantedBlock> blocks;
    std::vector<std::size_t> row_perm;
    std::vector<std::size_t> col_perm;

    /// Block coordinates in the shuffled matrix, each index list sorted ascending.
    std::vector<PlantedBlock> located() const;
};

enum class Generator {
    bs_problem1,
    bs_problem1_binary,
    bs_problem2,
    gbs_problem2,
    // Reduced-size variants used for desk-scale experiments.
    bs_problem2_small,
    gbs_problem1_small,
    gbs_problem2_small,
};

std::string_view generator_name(Generator g);
Generator parse_generator(std::string_view name);

struct SyntheticSpec {
    Generator generator = Generator::bs_problem1;
    std::uint64_t seed = 0;
    int alpha = 1;
    std::optional<double> binarize_threshold;
    // D(1)..D(5) for one seed share the planted block values when set.
    bool shared_block = true;
};

/// Dataset matrix with values in [0, 1] and its generation provenance.
struct Dataset {
    RealMatrix values;
    std::string generator = "file";
    std::uint64_t seed = 0;
    int alpha = 0;
    std::optional<double> threshold;
    bool shared_block = true;
    GroundTruth truth;
};

inline constexpr double kBinaryThreshold = 0.7;

/// 12 x 12; block rows = cols = {3..8} drawn from {0.7, 0.8, 0.9}; every other cell from
/// {0, 0.1, ..., 0.1 alpha}.
Dataset gen_bs_problem1(int alpha, std::uint64_t seed, bool shared_block = true);

/// 12 x 12 with ones on {3..8} x {3..8} and zeros elsewhere.
Dataset gen_bs_problem1_binary(std::uint64_t seed);

/// Uniform random row and column permutations; composes with any earlier shuffle.
Dataset shuffle(const Dataset &d, std::uint64_t seed);

/// 12 x 12 with three 4 x 4 diagonal blocks in [0.7, 0.9), background in [0, 0.2), shuffled.
Dataset gen_gbs_problem2(std::uint64_t seed);

/// Shuffled bs_problem1 at alpha = 2.
Dataset gen_bs_problem2(std::uint64_t seed);

/// 8 x 8, one 4 x 4 block, otherwise as gen_bs_problem2.
Dataset gen_bs_problem2_small(std::uint64_t seed);

/// 6 x 6, one 3 x 3 block from {0.7, 0.8, 0.9}, background {0, 0.1, 0.2}, shuffled.
Dataset gen_gbs_problem1_small(std::uint64_t seed);

/// 6 x 6, two 3 x 3 diagonal blocks in [0.7, 0.9), background in [0, 0.2), shuffled.
Dataset gen_gbs_problem2_small(std::uint64_t seed);

/// entry >= threshold -> 1, else 0.
RealMatrix binarize(const RealMatrix &d, double threshold);

Dataset generate(const SyntheticSpec &spec);

/// CSV with a leading "# {json}" provenance line; values use 17 significant digits so a
/// reload is bit-exact. Files without the header load as generator "file".
void write_dataset_csv(std::ostream &os, const Dataset &d);
Dataset read_dataset_csv(std::istream &is);
void save_dataset(const std::string &path, const Dataset &d);
Dataset load_dataset(const std::string &path);

}  // namespace phobic
