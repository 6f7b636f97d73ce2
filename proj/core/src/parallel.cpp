#include "cogverify/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <exception>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace cogverify {

namespace {

std::atomic<unsigned> g_override{0};
thread_local bool t_inside = false;

unsigned default_threads() {
    if (const char* env = std::getenv("COGVERIFY_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<unsigned>(std::min<long>(v, 256));
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Fixed set of workers executing one job at a time.
class Pool {
public:
    explicit Pool(unsigned workers) {
        for (unsigned i = 0; i < workers; ++i) threads_.emplace_back([this, i] { loop(i + 1); });
    }
    ~Pool() {
        {
            std::lock_guard lk(mu_);
            stop_ = true;
        }
        cv_.notify_all();
        for (auto& t : threads_) t.join();
    }
    unsigned size() const { return static_cast<unsigned>(threads_.size()) + 1; }

    void run(std::size_t chunks, const std::function<void(std::size_t)>& job) {
        {
            std::lock_guard lk(mu_);
            job_ = &job;
            chunks_ = chunks;
            next_.store(0);
            pending_ = threads_.size();
            error_ = nullptr;
            ++generation_;
        }
        cv_.notify_all();
        work();
        std::unique_lock lk(mu_);
        done_.wait(lk, [this] { return pending_ == 0; });
        job_ = nullptr;
        if (error_) std::rethrow_exception(error_);
    }

private:
    void work() {
        const bool was = t_inside;
        t_inside = true;
        for (std::size_t c; (c = next_.fetch_add(1)) < chunks_;) {
            try {
                (*job_)(c);
            } catch (...) {
                std::lock_guard lk(mu_);
                if (!error_) error_ = std::current_exception();
            }
        }
        t_inside = was;
    }

    void loop(unsigned) {
        std::uint64_t seen = 0;
        for (;;) {
            {
                std::unique_lock lk(mu_);
                cv_.wait(lk, [&] { return stop_ || generation_ != seen; });
                if (stop_) return;
                seen = generation_;
            }
            work();
            std::lock_guard lk(mu_);
            if (--pending_ == 0) done_.notify_one();
        }
    }

    std::vector<std::thread> threads_;
    std::mutex mu_;
    std::condition_variable cv_, done_;
    const std::function<void(std::size_t)>* job_ = nullptr;
    std::size_t chunks_ = 0;
    std::atomic<std::size_t> next_{0};
    std::size_t pending_ = 0;
    std::uint64_t generation_ = 0;
    std::exception_ptr error_;
    bool stop_ = false;
};

std::mutex g_pool_mu;
std::unique_ptr<Pool> g_pool;

}  // namespace

unsigned thread_count() {
    const unsigned o = g_override.load();
    return o ? o : default_threads();
}

void set_thread_count(unsigned n) { g_override.store(n); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn,
                  std::size_t min_chunk) {
    if (n == 0) return;
    const unsigned threads = thread_count();
    if (threads <= 1 || t_inside || n <= min_chunk) {
        fn(0, n);
        return;
    }
    const std::size_t chunks = std::min<std::size_t>(threads * 4, (n + min_chunk - 1) / min_chunk);
    const std::size_t per = (n + chunks - 1) / chunks;
    std::lock_guard lk(g_pool_mu);
    if (!g_pool || g_pool->size() != threads) {
        g_pool.reset();
        g_pool = std::make_unique<Pool>(threads - 1);
    }
    g_pool->run(chunks, [&](std::size_t c) {
        const std::size_t b = c * per;
        const std::size_t e = std::min(n, b + per);
        if (b < e) fn(b, e);
    });
}

}  // namespace cogverify
