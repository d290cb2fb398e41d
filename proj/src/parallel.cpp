#include "circulaw/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace circulaw {

std::size_t worker_count(std::size_t requested) {
    std::size_t n = requested;
    if (n == 0) n = std::max(1U, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CIRCULAW_THREADS"); env != nullptr && *env != '\0') {
        try {
            const auto cap = std::stoul(env);
            if (cap > 0) n = std::min<std::size_t>(n, cap);
        } catch (const std::exception&) {
            // ignore garbage
        }
    }
    return std::max<std::size_t>(n, 1);
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body) {
    if (count == 0) return;
    std::vector<std::exception_ptr> errors(count);
    const std::size_t workers = std::min(std::max<std::size_t>(threads, 1), count);
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace circulaw
