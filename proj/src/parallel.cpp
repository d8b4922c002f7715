#include "nodalcert/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nodalcert {

void parallel_for(std::size_t count, std::size_t chunk,
                  const std::function<void(std::size_t, std::size_t)>& body)
{
    if (count == 0) {
        return;
    }
    chunk = std::max<std::size_t>(chunk, 1);
    const std::size_t n_chunks = (count + chunk - 1) / chunk;
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_workers = std::min(hw, n_chunks);
    if (n_workers <= 1) {
        body(0, count);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        try {
            for (std::size_t c = next++; c < n_chunks; c = next++) {
                const std::size_t begin = c * chunk;
                body(begin, std::min(count, begin + chunk));
            }
        } catch (...) {
            const std::lock_guard lock(error_mutex);
            if (!error) {
                error = std::current_exception();
            }
            next = n_chunks;
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers - 1);
        for (std::size_t i = 1; i < n_workers; ++i) {
            pool.emplace_back(worker);
        }
        worker();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

double compensated_sum(std::span<const double> values)
{
    double sum = 0.0;
    double comp = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

} // namespace nodalcert
