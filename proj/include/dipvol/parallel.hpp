#pragma once

// Deterministic parallel map over an index range: work items are claimed
// from an atomic counter, results land in caller-owned slots by index, so
// the output is independent of scheduling and worker count.

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace dipvol::par {

inline unsigned default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : (hw > 8 ? 8 : hw);
}

template <class Body>
void parallel_for(std::size_t count, const Body& body, unsigned workers = 0) {
    if (workers == 0) workers = default_workers();
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error = nullptr;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    auto run = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                body(i);
            } catch (...) {
                if (!failed.exchange(true)) first_error = std::current_exception();
                return;
            }
        }
    };
    const unsigned nthreads = static_cast<unsigned>(
        workers < count ? workers : static_cast<unsigned>(count));
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(run);
    for (auto& th : pool) th.join();
    if (failed.load() && first_error) std::rethrow_exception(first_error);
}

}  // namespace dipvol::par
