#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace clutter {

/// Fixed set of threads that run index-parallel loops. Each `parallel_for` call blocks
/// until every index has been processed; results are written by index, so output never
/// depends on which thread ran which index.
class WorkerPool {
public:
    explicit WorkerPool(std::size_t threads = default_threads());
    ~WorkerPool();
    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    static std::size_t default_threads();
    /// Threads taking part in each loop, the caller included.
    std::size_t size() const { return threads_.size() + 1; }

    /// Runs body(i) for i in [0, n). The first exception thrown by any index is rethrown.
    void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

private:
    void worker_loop();
    void run_indices();

    std::vector<std::thread> threads_;
    std::mutex mutex_;
    std::condition_variable wake_;
    std::condition_variable done_;
    const std::function<void(std::size_t)>* body_ = nullptr;
    std::size_t count_ = 0;
    std::size_t next_ = 0;
    std::size_t finished_ = 0;
    std::size_t generation_ = 0;
    std::size_t active_ = 0;
    bool stop_ = false;
    std::exception_ptr error_;
};

}  // namespace clutter
