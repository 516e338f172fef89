#include "spca/parallel.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace spca
{

std::size_t worker_count()
{
    if (const char* env = std::getenv("SPCA_THREADS"))
    {
        char* end = nullptr;
        const long value = std::strtol(env, &end, 10);
        if (end != env && value > 0)
        {
            return static_cast<std::size_t>(value);
        }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body)
{
    const std::size_t workers = std::min(worker_count(), count);
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
        {
            body(i);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        while (!failed.load())
        {
            const std::size_t i = next.fetch_add(1);
            if (i >= count)
            {
                return;
            }
            try
            {
                body(i);
            }
            catch (...)
            {
                std::lock_guard lock(error_mutex);
                if (!error)
                {
                    error = std::current_exception();
                }
                failed = true;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
    {
        pool.emplace_back(run);
    }
    for (auto& t : pool)
    {
        t.join();
    }
    if (error)
    {
        std::rethrow_exception(error);
    }
}

}  // namespace spca
