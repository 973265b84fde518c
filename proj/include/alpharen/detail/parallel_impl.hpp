#pragma once

#include <atomic>
#include <exception>
#include <optional>
#include <thread>

namespace alpharen {

template <class T>
std::vector<T> parallel_map(size_t n, const std::function<T(size_t)>& f) {
    std::vector<std::optional<T>> out(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (size_t i = next++; i < n; i = next++) {
            try {
                out[i] = f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const size_t threads = std::min<size_t>(n, static_cast<size_t>(worker_count()));
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (size_t t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<T> result;
    result.reserve(n);
    for (auto& o : out) result.push_back(std::move(*o));
    return result;
}

} // namespace alpharen
