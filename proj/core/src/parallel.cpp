// Copyright casimir-piston contributors
// SPDX-License-Identifier: Apache-2.0
//! \file parallel.cpp
#include "casimir/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace casimir
{
unsigned parse_thread_count(char const* text)
{
    std::string_view const sv{text};
    unsigned value = 0;
    auto const [end, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), value);
    if (ec != std::errc{} || end != sv.data() + sv.size() || value == 0)
    {
        throw std::invalid_argument("CASIMIR_THREADS must be a positive integer, got '"
                                    + std::string{sv} + "'");
    }
    return value;
}

unsigned worker_count()
{
    if (char const* env = std::getenv("CASIMIR_THREADS"))
    {
        return parse_thread_count(env);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void for_each_stratum(std::size_t n_strata,
                      std::function<void(std::size_t)> const& body,
                      unsigned workers)
{
    workers = static_cast<unsigned>(
        std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n_strata, 1)));
    if (workers == 1)
    {
        for (std::size_t i = 0; i < n_strata; ++i)
        {
            body(i);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < n_strata; i = next++)
        {
            try
            {
                body(i);
            }
            catch (...)
            {
                std::lock_guard lock{failure_mutex};
                if (!failure)
                {
                    failure = std::current_exception();
                }
                next = n_strata;
            }
        }
    };

    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned t = 1; t < workers; ++t)
    {
        pool.emplace_back(work);
    }
    work();
    pool.clear();

    if (failure)
    {
        std::rethrow_exception(failure);
    }
}

}  // namespace casimir
