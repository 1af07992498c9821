#include "skm/parallel.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <vector>

namespace skm {

namespace {

// Minimal persistent pool; workers pull indices from a shared counter.
class Pool {
 public:
  explicit Pool(int workers) : stop_(false), job_generation_(0) {
    for (int i = 0; i < workers; ++i)
      threads_.emplace_back([this] { worker_loop(); });
  }

  ~Pool() {
    {
      std::lock_guard<std::mutex> lk(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  void run(int count, const std::function<void(int)>& fn) {
    std::unique_lock<std::mutex> lk(mu_);
    fn_ = &fn;
    next_.store(0, std::memory_order_relaxed);
    count_ = count;
    remaining_ = count;
    ++job_generation_;
    cv_.notify_all();
    done_cv_.wait(lk, [this] { return remaining_ == 0; });
    fn_ = nullptr;
  }

 private:
  void worker_loop() {
    std::uint64_t seen = 0;
    for (;;) {
      std::unique_lock<std::mutex> lk(mu_);
      cv_.wait(lk, [&] { return stop_ || job_generation_ != seen; });
      if (stop_) return;
      seen = job_generation_;
      const std::function<void(int)>* fn = fn_;
      const int count = count_;
      lk.unlock();

      int done_here = 0;
      for (;;) {
        const int i = next_.fetch_add(1, std::memory_order_relaxed);
        if (i >= count) break;
        (*fn)(i);
        ++done_here;
      }
      if (done_here > 0) {
        std::lock_guard<std::mutex> lg(mu_);
        remaining_ -= done_here;
        if (remaining_ == 0) done_cv_.notify_all();
      }
    }
  }

  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable cv_, done_cv_;
  bool stop_;
  std::uint64_t job_generation_;
  const std::function<void(int)>* fn_ = nullptr;
  std::atomic<int> next_{0};
  int count_ = 0;
  int remaining_ = 0;
};

}  // namespace

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || count < 16) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  const int workers = std::min(threads, count);
  static std::mutex pool_mu;
  static Pool* pool = nullptr;
  static int pool_size = 0;
  std::lock_guard<std::mutex> lk(pool_mu);
  if (pool == nullptr || pool_size < workers) {
    delete pool;
    pool = new Pool(workers);
    pool_size = workers;
  }
  pool->run(count, fn);
}

int env_thread_cap() {
  const char* env = std::getenv("SKM_THREADS");
  if (env == nullptr) return 1;
  const int v = std::atoi(env);
  return v >= 1 ? v : 1;
}

}  // namespace skm
