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

// Wall-clock comparison of the OpenMP kernels against their serial references.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "phobic/boson_sampling.hpp"
#include "phobic/datasets.hpp"
#include "phobic/gbs.hpp"
#include "phobic/matrix_functions.hpp"
#include "phobic/parallel.hpp"
#include "phobic/rng.hpp"

namespace {

double seconds(const std::function<void()> &f, int reps) {
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) {
        f();
    }
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / reps;
}

void row(const char *name, double serial, double parallel) {
    std::printf("%-34s serial %10.4f s   parallel %10.4f s   speedup %5.2fx\n", name, serial, parallel,
                parallel > 0.0 ? serial / parallel : 0.0);
}

}  // namespace

int main(int argc, char **argv) {
    if (argc > 1) {
        phobic::parallel::set_worker_count(std::atoi(argv[1]));
    }
    std::printf("workers: %d\n", phobic::parallel::worker_count());
    phobic::Rng rng(1, 0);

    phobic::ComplexMatrix m(20, 20);
    for (auto &x : m.data()) {
        x = phobic::Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    }
    volatile double sink = 0.0;
    row("permanent, 20x20 complex", seconds([&] { sink = std::abs(phobic::reference::permanent_glynn_serial(m)); }, 1),
        seconds([&] { sink = std::abs(phobic::permanent(m)); }, 1));

    const phobic::GBSProgram prog = phobic::make_program(phobic::gen_gbs_problem2(1).values, 2.0);
    const phobic::HusimiForm h = phobic::husimi_form(prog);
    const std::size_t k = 18;
    std::vector<std::size_t> modes;
    for (std::size_t i = 0; i < k; ++i) {
        modes.push_back(i);
    }
    for (std::size_t i = 0; i < k; ++i) {
        modes.push_back(prog.modes() + i);
    }
    const phobic::RealMatrix o = phobic::submatrix(h.o, modes, modes);
    row("torontonian, 18 modes", seconds([&] { sink = phobic::reference::torontonian_serial(o); }, 1),
        seconds([&] { sink = phobic::torontonian(o); }, 1));

    const phobic::DilatedUnitary u = phobic::dilate(phobic::gen_bs_problem1(2, 1).values);
    const std::vector<std::size_t> cols{3, 4, 5, 6, 7, 8};
    const phobic::FockState in = phobic::build_input(cols, u.modes());
    const int workers = phobic::parallel::worker_count();
    phobic::parallel::set_worker_count(1);
    const double enum_serial = seconds([&] { sink = phobic::enumerate_distribution(u, in).probability(0); }, 1);
    phobic::parallel::set_worker_count(workers);
    const double enum_parallel = seconds([&] { sink = phobic::enumerate_distribution(u, in).probability(0); }, 1);
    row("enumeration, 6 photons / 24 modes", enum_serial, enum_parallel);

    phobic::parallel::set_worker_count(1);
    const double cs_serial = seconds([&] { sink = static_cast<double>(phobic::chain_rule_sample(prog, 2000, 3).size()); }, 1);
    phobic::parallel::set_worker_count(workers);
    const double cs_parallel = seconds([&] { sink = static_cast<double>(phobic::chain_rule_sample(prog, 2000, 3).size()); }, 1);
    row("chain-rule sampler, 2000 draws", cs_serial, cs_parallel);
    (void)sink;
    return 0;
}
