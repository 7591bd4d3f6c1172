#ifndef ORBTUNE_THREAD_POOL_HPP
#define ORBTUNE_THREAD_POOL_HPP

#include <atomic>
#include <condition_variable>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace orbtune {

/// Persistent worker pool for batches of independent tasks. parallel_for
/// blocks until the whole batch is done and rethrows the first task
/// exception. With zero workers everything runs on the calling thread, which
/// keeps single-threaded runs trivially deterministic to debug.
class ThreadPool {
public:
    explicit ThreadPool(int workers) {
        for (int i = 0; i < workers; ++i)
            threads_.emplace_back([this] { workerLoop(); });
    }

    ~ThreadPool() {
        {
            std::unique_lock<std::mutex> lock(m_);
            stop_ = true;
        }
        cvIn_.notify_all();
        for (auto& t : threads_) t.join();
    }

    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    int workers() const { return static_cast<int>(threads_.size()); }

    /// Run fn(i) for i in [0, count). Tasks must be independent.
    void parallel_for(int count, const std::function<void(int)>& fn) {
        if (count <= 0) return;
        if (threads_.empty()) {
            for (int i = 0; i < count; ++i) fn(i);
            return;
        }
        std::exception_ptr error;
        {
            std::unique_lock<std::mutex> lock(m_);
            fn_ = &fn;
            next_ = 0;
            done_ = 0;
            count_ = count;
            error_ = nullptr;
        }
        cvIn_.notify_all();
        {
            std::unique_lock<std::mutex> lock(m_);
            cvOut_.wait(lock, [&] { return done_ == count_; });
            fn_ = nullptr;
            count_ = 0;
            error = error_;
        }
        if (error) std::rethrow_exception(error);
    }

private:
    void workerLoop() {
        while (true) {
            const std::function<void(int)>* fn = nullptr;
            int index = -1;
            {
                std::unique_lock<std::mutex> lock(m_);
                cvIn_.wait(lock, [&] { return stop_ || (fn_ && next_ < count_); });
                if (stop_) return;
                fn = fn_;
                index = next_++;
            }
            std::exception_ptr error;
            try {
                (*fn)(index);
            } catch (...) {
                error = std::current_exception();
            }
            {
                std::unique_lock<std::mutex> lock(m_);
                if (error && !error_) error_ = error;
                if (++done_ == count_) cvOut_.notify_all();
                else if (next_ < count_) cvIn_.notify_one();
            }
        }
    }

    std::vector<std::thread> threads_;
    std::mutex m_;
    std::condition_variable cvIn_;
    std::condition_variable cvOut_;
    const std::function<void(int)>* fn_ = nullptr;
    int next_ = 0;
    int done_ = 0;
    int count_ = 0;
    bool stop_ = false;
    std::exception_ptr error_ = nullptr;
};

}  // namespace orbtune

#endif
