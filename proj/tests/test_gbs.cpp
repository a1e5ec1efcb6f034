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

#include <bit>
#include <cmath>
#include <map>

#include "phobic/datasets.hpp"
#include "phobic/error.hpp"
#include "phobic/gbs.hpp"
#include "phobic/matrix_functions.hpp"
#include "phobic/parallel.hpp"
#include "test_support.hpp"

namespace phobic {
namespace {

GBSProgram zero_program(std::size_t m) {
    GBSProgram prog;
    prog.b = RealMatrix(m, m);
    prog.r.assign(m, 0.0);
    prog.d1 = m;
    return prog;
}

double tv_distance(const std::vector<ClickPattern> &samples, const ThresholdDistribution &dist) {
    std::vector<double> freq(dist.probabilities.size(), 0.0);
    for (const ClickPattern &p : samples) {
        freq[p.mask] += 1.0 / static_cast<double>(samples.size());
    }
    double tv = 0.0;
    for (std::size_t k = 0; k < freq.size(); ++k) {
        tv += 0.5 * std::abs(freq[k] - dist.probabilities[k]);
    }
    return tv;
}

/// Visits every PNR pattern on m modes with total photons <= cutoff.
template <typename F>
void for_each_pattern(std::size_t m, int cutoff, F &&f) {
    std::vector<int> counts(m, 0);
    while (true) {
        f(FockState{counts});
        std::size_t k = 0;
        while (k < m) {
            ++counts[k];
            int total = 0;
            for (int c : counts) {
                total += c;
            }
            if (total <= cutoff) {
                break;
            }
            counts[k++] = 0;
        }
        if (k == m) {
            return;
        }
    }
}

TEST(BuildAdjacency, Constructions) {
    EXPECT_EQ(build_adjacency(RealMatrix{{1.0}}), (RealMatrix{{0.0, 1.0}, {1.0, 0.0}}));
    EXPECT_EQ(build_adjacency(RealMatrix(2, 3)), RealMatrix(5, 5));
    const RealMatrix d = testing::random_real(4, 3, 1);
    const RealMatrix a = build_adjacency(d);
    ASSERT_EQ(a.rows(), 7U);
    EXPECT_TRUE(is_symmetric(a, 0.0));
    for (std::size_t i = 0; i < 7; ++i) {
        for (std::size_t j = 0; j < 7; ++j) {
            if ((i < 4) == (j < 4)) {
                EXPECT_EQ(a(i, j), 0.0);
            }
        }
    }
    EXPECT_EQ(a(1, 4 + 2), d(1, 2));
}

TEST(SolveScaling, SingleLambda) {
    const std::vector<double> one{1.0};
    EXPECT_NEAR(solve_scaling(one, 1.0), 1.0 / std::sqrt(2.0), 1e-10);
    const double tiny = solve_scaling(one, 1e-8);
    EXPECT_GT(tiny, 0.0);
    EXPECT_LT(tiny, 1e-3);
    EXPECT_LE(solve_scaling(one, 1e15), 1.0 - 1e-12);
}

TEST(SolveScaling, ResidualOnDataset) {
    const Dataset d = gen_gbs_problem1_small(3);
    const TakagiResult t = takagi_real_symmetric(build_adjacency(d.values));
    const double c = solve_scaling(t.lambdas, 4.0);
    EXPECT_NEAR(mean_photon_number(c, t.lambdas), 4.0, 1e-10);
    double lmax = 0.0;
    for (double l : t.lambdas) {
        lmax = std::max(lmax, l);
    }
    EXPECT_LT(c * lmax, 1.0);
}

TEST(SolveScaling, Errors) {
    EXPECT_THROW(solve_scaling(std::vector<double>{0.0, 0.0}, 1.0), DomainError);
    EXPECT_THROW(solve_scaling(std::vector<double>{1.0}, 0.0), DomainError);
}

TEST(SqueezingParams, Formula) {
    const std::vector<double> lambdas{0.0, 1.0, 0.3};
    const std::vector<double> r = squeezing_params(0.5, lambdas);
    EXPECT_EQ(r[0], 0.0);
    EXPECT_NEAR(r[1], 0.549306144334055, 1e-12);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(std::tanh(r[i]), 0.5 * lambdas[i], 1e-12);
    }
    EXPECT_THROW(squeezing_params(1.0, std::vector<double>{1.0}), DomainError);
}

TEST(ResolveNbar, Interpretations) {
    EXPECT_EQ(resolve_nbar(2.0, NbarInterpretation::total, 12), 2.0);
    EXPECT_EQ(resolve_nbar(2.0, NbarInterpretation::per_mode, 12), 24.0);
}

TEST(MakeProgram, KernelMatchesTakagi) {
    const GBSProgram prog = make_program(testing::random_real(3, 4, 6), 2.0);
    EXPECT_EQ(prog.modes(), 7U);
    EXPECT_EQ(prog.d1, 3U);
    EXPECT_EQ(prog.d2, 4U);
    double n = 0.0;
    for (double r : prog.r) {
        n += std::sinh(r) * std::sinh(r);
    }
    EXPECT_NEAR(n, 2.0, 1e-9);
}

TEST(PnrProbability, SingleModeClosedForm) {
    const GBSProgram prog = make_program_from_symmetric(RealMatrix{{1.0}}, 0.3, 1, 0);
    const double r = prog.r[0];
    EXPECT_NEAR(pnr_probability(prog, FockState{{0}}), 1.0 / std::cosh(r), 1e-14);
    EXPECT_NEAR(pnr_probability(prog, FockState{{2}}), std::pow(std::tanh(r), 2) / (2.0 * std::cosh(r)), 1e-14);
    // sech r tanh^{2k} r (2k)! / (2^k k!)^2 at k = 2.
    EXPECT_NEAR(pnr_probability(prog, FockState{{4}}), std::pow(std::tanh(r), 4) * 24.0 / 64.0 / std::cosh(r), 1e-14);
    EXPECT_EQ(pnr_probability(prog, FockState{{3}}), 0.0);
}

TEST(PnrProbability, OddTotalAndBipartiteParity) {
    const GBSProgram prog = make_program(testing::random_real(2, 2, 12), 1.0);
    double prod = 1.0;
    for (double r : prog.r) {
        prod /= std::cosh(r);
    }
    EXPECT_NEAR(pnr_probability(prog, FockState{{0, 0, 0, 0}}), prod, 1e-14);
    for_each_pattern(4, 6, [&](const FockState &p) {
        const int rows = p.counts[0] + p.counts[1];
        const int cols = p.counts[2] + p.counts[3];
        if (rows != cols) {
            EXPECT_EQ(pnr_probability(prog, p), 0.0);
        }
    });
    EXPECT_THROW(pnr_probability(prog, FockState{{0, 0, 0}}), DimensionError);
    EXPECT_THROW(pnr_probability(prog, FockState{{9, 9, 0, 0}}), CapacityError);
}

TEST(PnrProbability, CutoffMassGrowsTowardOne) {
    const GBSProgram prog = make_program(testing::random_real(2, 2, 2), 0.5);
    double prev = 0.0;
    for (int cutoff = 0; cutoff <= 10; cutoff += 2) {
        double mass = 0.0;
        for_each_pattern(4, cutoff, [&](const FockState &p) { mass += pnr_probability(prog, p); });
        EXPECT_GE(mass, prev);
        EXPECT_LE(mass, 1.0 + 1e-12);
        prev = mass;
    }
    EXPECT_GT(prev, 0.999);
}

TEST(HusimiForm, VacuumCases) {
    const HusimiForm z = husimi_form(zero_program(3));
    EXPECT_EQ(z.o, RealMatrix(6, 6));
    EXPECT_DOUBLE_EQ(z.sqrt_det_sigma_q_inv, 1.0);

    const GBSProgram single = make_program_from_symmetric(RealMatrix{{1.0}}, 0.7, 1, 0);
    EXPECT_NEAR(husimi_form(single).sqrt_det_sigma_q_inv, 1.0 / std::cosh(single.r[0]), 1e-14);

    const GBSProgram prog = make_program_from_symmetric(testing::random_symmetric(3, 5), 1.0, 3, 0);
    const HusimiForm h = husimi_form(prog);
    EXPECT_NEAR(click_probability(h, ClickPattern{0, 3}), pnr_probability(prog, FockState{{0, 0, 0}}), 1e-9);
}

TEST(ThresholdDistribution, ZeroProgramIsNoClick) {
    const ThresholdDistribution dist = threshold_distribution(zero_program(4));
    EXPECT_DOUBLE_EQ(dist.probabilities[0], 1.0);
    EXPECT_EQ(dist.argmax().mask, 0U);
}

TEST(ThresholdDistribution, TwoModeSqueezedPair) {
    // c X generates a two-mode squeezed vacuum with P(n, n) = (1 - c^2) c^{2n}.
    const GBSProgram prog = make_program(RealMatrix{{1.0}}, 1.5);
    const ThresholdDistribution dist = threshold_distribution(prog);
    const double c2 = prog.c * prog.c;
    EXPECT_NEAR(dist.probabilities[0], 1.0 - c2, 1e-12);
    EXPECT_NEAR(dist.probabilities[1], 0.0, 1e-12);
    EXPECT_NEAR(dist.probabilities[2], 0.0, 1e-12);
    EXPECT_NEAR(dist.probabilities[3], c2, 1e-12);
    // Inclusion-exclusion from the one-mode vacuum marginal.
    const double marginal = dist.probabilities[0] + dist.probabilities[2];
    EXPECT_NEAR(dist.probabilities[3], 1.0 - 2.0 * marginal + dist.probabilities[0], 1e-12);
}

TEST(ThresholdDistribution, TwelveModeNormalization) {
    const Dataset d = gen_gbs_problem1_small(1);
    const ThresholdDistribution dist = threshold_distribution(make_program(d.values, 4.0));
    ASSERT_EQ(dist.probabilities.size(), 4096U);
    double sum = 0.0;
    for (double p : dist.probabilities) {
        EXPECT_GE(p, -1e-12);
        sum += p;
    }
    EXPECT_NEAR(sum, 1.0, 1e-8);
}

TEST(ThresholdDistribution, AgreesWithHafnianMarginals) {
    for (std::uint64_t s = 0; s < 3; ++s) {
        const GBSProgram prog = make_program(testing::random_real(3, 3, 60 + s), 0.5);
        const ThresholdDistribution dist = threshold_distribution(prog);
        std::vector<double> marg(64, 0.0);
        double mass = 0.0;
        for_each_pattern(6, 10, [&](const FockState &p) {
            std::uint64_t mask = 0;
            for (std::size_t i = 0; i < 6; ++i) {
                if (p.counts[i] > 0) {
                    mask |= std::uint64_t{1} << i;
                }
            }
            const double q = pnr_probability(prog, p);
            marg[mask] += q;
            mass += q;
        });
        const double tail = 1.0 - mass;
        EXPECT_LE(tail, 1e-3);
        for (std::size_t k = 0; k < 64; ++k) {
            EXPECT_LE(marg[k], dist.probabilities[k] + 1e-12);
            EXPECT_NEAR(marg[k], dist.probabilities[k], tail + 1e-12);
        }
    }
}

TEST(ThresholdDistribution, CapacityError) {
    EXPECT_THROW(threshold_distribution(zero_program(15)), CapacityError);
}

TEST(ThresholdDistribution, ParallelMatchesSingleWorker) {
    const GBSProgram prog = make_program(testing::random_real(4, 4, 8), 2.0);
    parallel::set_worker_count(1);
    const ThresholdDistribution a = threshold_distribution(prog);
    parallel::set_worker_count(4);
    const ThresholdDistribution b = threshold_distribution(prog);
    parallel::set_worker_count(1);
    EXPECT_EQ(a.probabilities, b.probabilities);
}

TEST(ChainRuleSample, ZeroProgram) {
    for (const ClickPattern &p : chain_rule_sample(zero_program(5), 500, 1)) {
        EXPECT_EQ(p.mask, 0U);
    }
}

TEST(ChainRuleSample, PathProductEqualsTorontonian) {
    const GBSProgram prog = make_program(testing::random_real(4, 4, 21), 3.0);
    const HusimiForm h = husimi_form(prog);
    ClickSampler sampler(h);
    Rng rng(4, 0);
    for (int i = 0; i < 300; ++i) {
        double path = 0.0;
        const ClickPattern p = sampler.draw(rng, &path);
        const double want = click_probability(h, p);
        EXPECT_LE(std::abs(path - want), 1e-9 * want) << "mask " << p.mask;
    }
}

TEST(ChainRuleSample, MatchesExactDistribution) {
    const GBSProgram prog = make_program(testing::random_real(5, 5, 33), 1.0);
    const ThresholdDistribution dist = threshold_distribution(prog);
    EXPECT_LE(tv_distance(chain_rule_sample(prog, 100000, 8), dist), 0.02);
}

TEST(ChainRuleSample, Deterministic) {
    const GBSProgram prog = make_program(testing::random_real(3, 3, 3), 2.0);
    const auto a = chain_rule_sample(prog, 3000, 17);
    EXPECT_EQ(a, chain_rule_sample(prog, 3000, 17));
    parallel::set_worker_count(3);
    EXPECT_EQ(a, chain_rule_sample(prog, 3000, 17));
    parallel::set_worker_count(1);
    EXPECT_NE(a, chain_rule_sample(prog, 3000, 18));
}

TEST(DecodeClicks, IndexArithmetic) {
    const std::uint64_t mask = (1U << 3) | (1U << 4) | (1U << 15) | (1U << 16);
    const DecodedClicks d = decode_clicks(ClickPattern{mask, 24}, 12, 12);
    EXPECT_EQ(d.rows, (std::vector<std::size_t>{3, 4}));
    EXPECT_EQ(d.cols, (std::vector<std::size_t>{3, 4}));
    EXPECT_EQ(decode_clicks(ClickPattern{0, 5}, 2, 3), DecodedClicks{});
    const DecodedClicks all = decode_clicks(ClickPattern{0b11111, 5}, 2, 3);
    EXPECT_EQ(all.rows, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(all.cols, (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_THROW(decode_clicks(ClickPattern{0, 4}, 2, 3), DimensionError);
}

TEST(ClickPattern, ClicksVector) {
    EXPECT_EQ((ClickPattern{0b101, 4}.clicks()), (std::vector<bool>{true, false, true, false}));
}

}  // namespace
}  // namespace phobic
