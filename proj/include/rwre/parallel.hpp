// parallel.hpp -- deterministic fork-join over index ranges.
//
// Work items are seeded by index, never by thread, so results are identical
// for any job count; reductions happen in index order after the join.
#pragma once

#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace rwre {

inline int default_jobs() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

// fn(begin, end) is called on contiguous chunks of [0, count).
template <typename Fn>
void parallel_chunks(std::int64_t count, int jobs, Fn&& fn) {
    if (jobs <= 1 || count < 2) {
        if (count > 0) fn(std::int64_t{0}, count);
        return;
    }
    const int workers = static_cast<int>(std::min<std::int64_t>(jobs, count));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        const std::int64_t begin = count * w / workers;
        const std::int64_t end = count * (w + 1) / workers;
        pool.emplace_back([&, w, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace rwre
