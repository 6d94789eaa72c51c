#include "akat/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace akat {

int& worker_count() {
    static int workers = [] {
        unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : static_cast<int>(hw);
    }();
    return workers;
}

void parallel_chunks(size_t n_chunks, const std::function<void(size_t)>& work) {
    int workers = worker_count();
    if (workers <= 1 || n_chunks <= 1) {
        for (size_t i = 0; i < n_chunks; ++i) work(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto body = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n_chunks) return;
            try {
                work(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    size_t n_threads = std::min<size_t>(workers, n_chunks);
    pool.reserve(n_threads);
    for (size_t t = 0; t < n_threads; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace akat
