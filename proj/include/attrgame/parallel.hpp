#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace attrgame {

enum class RunMode { Serial, Parallel };

inline bool openmp_enabled() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Independent cells of a sweep; results land in caller-owned slots indexed by
// cell, so serial and parallel runs produce identical output.
inline void for_each_cell(int n, RunMode mode, const std::function<void(int)>& body) {
    if (mode == RunMode::Parallel && openmp_enabled()) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (int i = 0; i < n; ++i) body(i);
    } else {
        for (int i = 0; i < n; ++i) body(i);
    }
}

// Monte-Carlo accumulation over a fixed chunk grid. The chunk count is fixed
// independently of the thread count and partial sums combine in chunk order,
// so the result is bit-identical between serial and parallel runs.
inline constexpr int kMcChunks = 256;

template <class ChunkSum>
double chunked_mc_sum(std::uint64_t n, RunMode mode, ChunkSum&& chunk_sum) {
    std::vector<double> partial(kMcChunks, 0.0);
    std::uint64_t base = n / kMcChunks;
    std::uint64_t rem = n % kMcChunks;
    auto count_of = [&](int c) { return base + (static_cast<std::uint64_t>(c) < rem ? 1 : 0); };
    if (mode == RunMode::Parallel && openmp_enabled()) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int c = 0; c < kMcChunks; ++c) partial[c] = chunk_sum(c, count_of(c));
    } else {
        for (int c = 0; c < kMcChunks; ++c) partial[c] = chunk_sum(c, count_of(c));
    }
    double s = 0.0;
    for (int c = 0; c < kMcChunks; ++c) s += partial[c];
    return s;
}

}  // namespace attrgame
