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
#include <exception>
#include <span>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace phobic::parallel {

inline int worker_count() {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_worker_count(int n) {
#if defined(_OPENMP)
    if (n > 0) {
        omp_set_num_threads(n);
    }
#else
    (void)n;
#endif
}

/// Pairwise (tree) summation in index order. The result depends only on the input
/// sequence, so chunked reductions stay bit-stable across thread counts.
template <typename T>
T pairwise_sum(std::span<const T> xs) {
    if (xs.empty()) {
        return T{};
    }
    if (xs.size() == 1) {
        return xs[0];
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

template <typename T>
T pairwise_sum(const std::vector<T> &xs) {
    return pairwise_sum(std::span<const T>(xs));
}

struct Range {
    std::uint64_t begin;
    std::uint64_t end;
};

/// The `index`-th of `chunks` near-equal contiguous pieces of [0, total).
inline Range chunk_range(std::uint64_t total, std::uint64_t chunks, std::uint64_t index) {
    const std::uint64_t base = total / chunks;
    const std::uint64_t extra = total % chunks;
    const std::uint64_t begin = index * base + (index < extra ? index : extra);
    return {begin, begin + base + (index < extra ? 1 : 0)};
}

/// Keeps the first exception raised inside a parallel region so it can be rethrown on the
/// calling thread once the region has ended.
class ExceptionCollector {
  public:
    template <typename F>
    void run(F &&f) noexcept {
        try {
            f();
        } catch (...) {
#if defined(_OPENMP)
#pragma omp critical(phobic_exception_collector)
#endif
            {
                if (!first_) {
                    first_ = std::current_exception();
                }
            }
        }
    }

    void rethrow() const {
        if (first_) {
            std::rethrow_exception(first_);
        }
    }

  private:
    std::exception_ptr first_;
};

}  // namespace phobic::parallel
