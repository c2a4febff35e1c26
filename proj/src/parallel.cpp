#include "flowlab/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace flowlab {

unsigned thread_count() {
    if (const char* env = std::getenv("FLOWLAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(std::min(v, 1024L));
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    if (n == 0) return;
    const std::size_t workers = std::min<std::size_t>(thread_count(), n);
    if (workers == 1) {
        for (std::size_t k = 0; k < n; ++k) body(k);
        return;
    }

    struct Failure {
        std::size_t index = std::numeric_limits<std::size_t>::max();
        std::exception_ptr error;
    };
    std::vector<Failure> failures(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = n * w / workers;
        const std::size_t hi = n * (w + 1) / workers;
        pool.emplace_back([&, w, lo, hi] {
            for (std::size_t k = lo; k < hi; ++k) {
                try {
                    body(k);
                } catch (...) {
                    failures[w] = {k, std::current_exception()};
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& f : failures)
        if (f.error) std::rethrow_exception(f.error);
}

}  // namespace flowlab
