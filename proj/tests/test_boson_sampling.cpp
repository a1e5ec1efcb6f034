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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "phobic/boson_sampling.hpp"
#include "phobic/datasets.hpp"
#include "phobic/error.hpp"
#include "phobic/numerics.hpp"
#include "phobic/parallel.hpp"
#include "test_support.hpp"

namespace phobic {
namespace {

FockState fock(std::vector<int> c) { return FockState{std::move(c)}; }

RealMatrix beam_splitter() {
    const double h = 1.0 / std::sqrt(2.0);
    return RealMatrix{{h, h}, {h, -h}};
}

TEST(Dilate, ZeroAndUnitBlocks) {
    const DilatedUnitary z = dilate(RealMatrix{{0.0}}, true);
    EXPECT_EQ(z.matrix, (RealMatrix{{0.0, 1.0}, {1.0, 0.0}}));
    const DilatedUnitary one = dilate(RealMatrix{{1.0}}, true);
    EXPECT_EQ(one.matrix, (RealMatrix{{1.0, 0.0}, {0.0, -1.0}}));
}

TEST(Dilate, Random12x12IsUnitaryWithScaledTopBlock) {
    const RealMatrix d = testing::random_real(12, 12, 5);
    const DilatedUnitary u = dilate(d);
    ASSERT_EQ(u.matrix.rows(), 24U);
    EXPECT_TRUE(validate_unitary(u.matrix, 1e-8));
    const double s = testing::oracle_sigma_max(d);
    EXPECT_NEAR(u.scale, s, 1e-9 * s);
    for (std::size_t i = 0; i < 12; ++i) {
        for (std::size_t j = 0; j < 12; ++j) {
            EXPECT_EQ(u.matrix(i, j), d(i, j) / u.scale);
        }
    }
}

TEST(Dilate, RectangularShapes) {
    const DilatedUnitary u = dilate(testing::random_real(5, 3, 8));
    EXPECT_EQ(u.d1, 5U);
    EXPECT_EQ(u.d2, 3U);
    EXPECT_EQ(u.modes(), 8U);
    EXPECT_TRUE(validate_unitary(u.matrix, 1e-8));
}

TEST(Dilate, Errors) {
    EXPECT_THROW(dilate(RealMatrix(2, 2)), DomainError);
    EXPECT_THROW(dilate(RealMatrix{{std::nan("")}}), DomainError);
    EXPECT_THROW(dilate(RealMatrix()), DimensionError);
}

TEST(BuildInput, Constructions) {
    const std::vector<std::size_t> block{3, 4, 5, 6, 7, 8};
    const FockState s = build_input(block, 24);
    EXPECT_EQ(s.total(), 6);
    for (std::size_t i = 0; i < 24; ++i) {
        EXPECT_EQ(s.counts[i], (i >= 3 && i <= 8) ? 1 : 0);
    }
    EXPECT_EQ(build_input(std::vector<std::size_t>{}, 4).total(), 0);
    EXPECT_EQ(build_input(std::vector<std::size_t>{0}, 2), fock({1, 0}));
    EXPECT_THROW(build_input(std::vector<std::size_t>{4}, 4), BoundsError);
    EXPECT_THROW(build_input(std::vector<std::size_t>{1, 1}, 4), BoundsError);
}

TEST(OutcomeProbability, IdentityAndBeamSplitter) {
    EXPECT_DOUBLE_EQ(outcome_probability(RealMatrix::identity(3), fock({1, 0, 2}), fock({1, 0, 2})), 1.0);
    const RealMatrix bs = beam_splitter();
    EXPECT_NEAR(outcome_probability(bs, fock({1, 1}), fock({1, 1})), 0.0, 1e-15);
    EXPECT_NEAR(outcome_probability(bs, fock({1, 1}), fock({2, 0})), 0.5, 1e-15);
    EXPECT_NEAR(outcome_probability(bs, fock({1, 1}), fock({0, 2})), 0.5, 1e-15);
    EXPECT_THROW(outcome_probability(bs, fock({1, 1}), fock({1, 0})), ConservationError);
}

TEST(CompositionCount, StarsAndBars) {
    EXPECT_EQ(composition_count(6, 24), 475020U);
    EXPECT_EQ(composition_count(0, 5), 1U);
    EXPECT_EQ(composition_count(3, 1), 1U);
    EXPECT_EQ(composition_count(2, 3), 6U);
}

TEST(EnumerateDistribution, MatchesPolynomialExpansion) {
    for (std::uint64_t s = 0; s < 6; ++s) {
        const DilatedUnitary u = dilate(testing::random_real(3, 3, 40 + s));
        std::vector<int> in(6, 0);
        in[0] = 1;
        in[1] = 1 + static_cast<int>(s % 2);
        in[2] = 1;
        const OutcomeDistribution dist = enumerate_distribution(u.matrix, fock(in));
        const auto want = testing::oracle_fock_distribution(u.matrix, in);
        ASSERT_EQ(dist.size(), composition_count(fock(in).total(), 6));
        double sum = 0.0;
        for (std::size_t k = 0; k < dist.size(); ++k) {
            const FockState o = dist.outcome(k);
            EXPECT_EQ(o.total(), fock(in).total());
            const auto it = want.find(o.counts);
            const double w = it == want.end() ? 0.0 : it->second;
            EXPECT_NEAR(dist.probability(k), w, 1e-12);
            EXPECT_GE(dist.probability(k), 0.0);
            sum += dist.probability(k);
        }
        EXPECT_NEAR(sum, 1.0, 1e-9);
    }
}

TEST(EnumerateDistribution, OutcomesSortedAndFindable) {
    const OutcomeDistribution dist = enumerate_distribution(beam_splitter(), fock({1, 1}));
    ASSERT_EQ(dist.size(), 3U);
    EXPECT_EQ(dist.outcome(0), fock({0, 2}));
    EXPECT_EQ(dist.outcome(2), fock({2, 0}));
    EXPECT_EQ(dist.find(fock({1, 1})), 1U);
    EXPECT_EQ(dist.find(fock({3, 0})), dist.size());
}

TEST(EnumerateDistribution, IdentityIsPointMass) {
    const FockState in = fock({0, 1, 1, 0});
    const OutcomeDistribution dist = enumerate_distribution(RealMatrix::identity(4), in);
    EXPECT_DOUBLE_EQ(dist.probability(dist.find(in)), 1.0);
}

TEST(EnumerateDistribution, FullSizeOutcomeCount) {
    const Dataset d = gen_bs_problem1_binary(0);
    const DilatedUnitary u = dilate(d.values);
    const std::vector<std::size_t> block{3, 4, 5, 6, 7, 8};
    const OutcomeDistribution dist = enumerate_distribution(u, build_input(block, u.modes()));
    EXPECT_EQ(dist.size(), 475020U);
    // Rows outside the planted block are zero, so every postselected outcome lands in it.
    const PostselectRule rule{1, 12, 12};
    double kept = 0.0;
    double hit = 0.0;
    for (std::size_t k = 0; k < dist.size(); ++k) {
        const auto c = dist.counts(k);
        if (!rule.accepts(c)) {
            continue;
        }
        kept += dist.probability(k);
        bool in_block = true;
        for (std::size_t i = 0; i < 12; ++i) {
            in_block = in_block && (c[i] == 0 || (i >= 3 && i <= 8));
        }
        if (in_block) {
            hit += dist.probability(k);
        }
    }
    ASSERT_GT(kept, 0.0);
    EXPECT_EQ(hit / kept, 1.0);
}

TEST(EnumerateDistribution, ParallelMatchesSingleWorker) {
    const DilatedUnitary u = dilate(testing::random_real(4, 4, 77));
    const FockState in = build_input(std::vector<std::size_t>{0, 1, 2, 3}, 8);
    parallel::set_worker_count(1);
    const OutcomeDistribution a = enumerate_distribution(u, in);
    parallel::set_worker_count(4);
    const OutcomeDistribution b = enumerate_distribution(u, in);
    parallel::set_worker_count(1);
    ASSERT_EQ(a.size(), b.size());
    EXPECT_TRUE(std::equal(a.probabilities().begin(), a.probabilities().end(), b.probabilities().begin()));
}

TEST(EnumerateDistribution, CapacityAndDimensionErrors) {
    const RealMatrix id = RealMatrix::identity(2);
    EXPECT_THROW(enumerate_distribution(id, fock({9, 0})), CapacityError);
    EXPECT_THROW(enumerate_distribution(id, fock({1, 0, 0})), DimensionError);
    EXPECT_THROW(enumerate_distribution(RealMatrix::identity(40), build_input(std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7}, 40)),
                 CapacityError);
}

TEST(EnumerateDistribution, RowPermutationEquivariance) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const RealMatrix d = testing::random_real(4, 4, 300 + s);
        std::vector<std::size_t> perm{2, 0, 3, 1};
        RealMatrix pd(4, 4);
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
                pd(i, j) = d(perm[i], j);
            }
        }
        const DilatedUnitary u = dilate(d);
        const DilatedUnitary pu = dilate(pd);
        const FockState in = build_input(std::vector<std::size_t>{0, 2, 3}, 8);
        const OutcomeDistribution a = enumerate_distribution(u, in);
        const OutcomeDistribution b = enumerate_distribution(pu, in);
        for (std::size_t k = 0; k < b.size(); ++k) {
            const FockState o = b.outcome(k);
            FockState back = o;
            for (std::size_t i = 0; i < 4; ++i) {
                back.counts[perm[i]] = o.counts[i];
            }
            // sqrt of the rounding-level eigenvalue at sigma = 1 limits agreement to ~1e-8.
            EXPECT_NEAR(b.probability(k), a.probability(a.find(back)), 1e-8);
        }
    }
}

OutcomeDistribution two_point() {
    return OutcomeDistribution(2, 1, {0, 1, 1, 0}, {0.5, 0.5});
}

TEST(Sample, PointMassAndDeterminism) {
    const OutcomeDistribution point = enumerate_distribution(RealMatrix::identity(3), fock({1, 0, 1}));
    for (const FockState &s : sample(point, 100, 3)) {
        EXPECT_EQ(s, fock({1, 0, 1}));
    }
    const DilatedUnitary u = dilate(testing::random_real(3, 3, 1));
    const OutcomeDistribution dist = enumerate_distribution(u, build_input(std::vector<std::size_t>{0, 1}, 6));
    EXPECT_EQ(sample_indices(dist, 20000, 11), sample_indices(dist, 20000, 11));
    EXPECT_NE(sample_indices(dist, 20000, 11), sample_indices(dist, 20000, 12));
}

TEST(Sample, IndependentOfWorkerCount) {
    const DilatedUnitary u = dilate(testing::random_real(3, 3, 1));
    const OutcomeDistribution dist = enumerate_distribution(u, build_input(std::vector<std::size_t>{0, 1}, 6));
    parallel::set_worker_count(1);
    const auto a = sample_indices(dist, 30000, 5);
    parallel::set_worker_count(4);
    const auto b = sample_indices(dist, 30000, 5);
    parallel::set_worker_count(1);
    EXPECT_EQ(a, b);
}

TEST(Sample, FairCoinFrequency) {
    const auto idx = sample_indices(two_point(), 1'000'000, 2026);
    const double ones = static_cast<double>(std::count(idx.begin(), idx.end(), 1U));
    EXPECT_NEAR(ones / 1e6, 0.5, 0.002);
}

TEST(Sample, TotalVariationAgainstExact) {
    const DilatedUnitary u = dilate(testing::random_real(3, 3, 19));
    const OutcomeDistribution dist = enumerate_distribution(u, build_input(std::vector<std::size_t>{0, 1, 2}, 6));
    ASSERT_LE(dist.size(), 1000U);
    const std::size_t n = 100000;
    std::vector<double> freq(dist.size(), 0.0);
    for (std::size_t i : sample_indices(dist, n, 99)) {
        freq[i] += 1.0 / static_cast<double>(n);
    }
    double tv = 0.0;
    for (std::size_t k = 0; k < dist.size(); ++k) {
        tv += 0.5 * std::abs(freq[k] - dist.probability(k));
    }
    EXPECT_LE(tv, 0.01);
}

TEST(Postselect, Rules) {
    const PostselectRule tau1{1, 2, 2};
    const PostselectRule tau3{3, 2, 2};
    const std::vector<FockState> samples{fock({1, 1, 0, 0}), fock({1, 0, 1, 0}), fock({2, 0, 0, 0}), fock({0, 0, 0, 2})};
    const PostselectResult r1 = postselect(samples, tau1);
    EXPECT_EQ(r1.kept_count, 1U);
    EXPECT_EQ(r1.total_count, 4U);
    EXPECT_EQ(r1.kept.front(), samples[0]);
    const PostselectResult r3 = postselect(samples, tau3);
    EXPECT_EQ(r3.kept_count, 2U);
    EXPECT_EQ(r3.kept[1], samples[2]);
}

TEST(ExtractRows, UniqueRows) {
    EXPECT_EQ(extract_rows(fock({1, 1, 0, 0}), 3), (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(extract_rows(fock({0, 0, 0, 0, 3, 0}), 6), (std::vector<std::size_t>{4}));
    EXPECT_TRUE(extract_rows(fock({0, 0, 0}), 3).empty());
    EXPECT_EQ(extract_rows(fock({0, 1, 1, 1}), 2), (std::vector<std::size_t>{1}));
}

}  // namespace
}  // namespace phobic
