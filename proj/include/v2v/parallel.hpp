#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

#include "v2v/errors.hpp"

namespace v2v {

/// Calls fn(k) for k in [0, count) on up to `jobs` threads and returns the
/// results in index order. The lowest-index failure is rethrown as a
/// TrialError.
template <typename Fn>
auto ordered_parallel_map(std::size_t count, std::size_t jobs, Fn fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>>
{
    using Result = std::invoke_result_t<Fn&, std::size_t>;
    std::vector<std::optional<Result>> slots(count);
    std::vector<std::exception_ptr> failures(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t k = next++; k < count; k = next++) {
            try {
                slots[k].emplace(fn(k));
            } catch (...) {
                failures[k] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }

    for (std::size_t k = 0; k < count; ++k) {
        if (!failures[k])
            continue;
        try {
            std::rethrow_exception(failures[k]);
        } catch (const TrialError&) {
            throw;
        } catch (const std::exception& e) {
            throw TrialError(k, e.what());
        }
    }
    std::vector<Result> out;
    out.reserve(count);
    for (auto& slot : slots)
        out.push_back(std::move(*slot));
    return out;
}

}  // namespace v2v
