#pragma once

#include <condition_variable>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ptychodd {

/// Fixed pool running index-parallel jobs. Results must not depend on the
/// worker count; callers only hand it independent per-index tasks.
class WorkerPool {
 public:
  explicit WorkerPool(int n) {
    for (int i = 1; i < n; ++i) workers_.emplace_back([this] { worker(); });
  }

  ~WorkerPool() {
    {
      std::scoped_lock lk(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : workers_) t.join();
  }

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  /// Runs fn(i) for i in [0,count); blocks until every task finished.
  void for_each(int count, const std::function<void(int)>& fn) {
    if (workers_.empty() || count <= 1) {
      for (int i = 0; i < count; ++i) fn(i);
      return;
    }
    std::unique_lock lk(mu_);
    fn_ = &fn;
    count_ = count;
    next_ = 0;
    remaining_ = count;
    error_ = nullptr;
    ++job_id_;
    cv_.notify_all();
    run_tasks(lk);  // main thread participates
    done_cv_.wait(lk, [this] { return remaining_ == 0; });
    fn_ = nullptr;
    if (error_) std::rethrow_exception(error_);
  }

 private:
  void run_tasks(std::unique_lock<std::mutex>& lk) {
    while (next_ < count_) {
      const int i = next_++;
      lk.unlock();
      std::exception_ptr err;
      try {
        (*fn_)(i);
      } catch (...) {
        err = std::current_exception();
      }
      lk.lock();
      if (err && !error_) error_ = err;
      if (--remaining_ == 0) done_cv_.notify_all();
    }
  }

  void worker() {
    uint64_t seen = 0;
    std::unique_lock lk(mu_);
    for (;;) {
      cv_.wait(lk, [&] { return stop_ || job_id_ != seen; });
      if (stop_) return;
      seen = job_id_;
      run_tasks(lk);
    }
  }

  std::vector<std::thread> workers_;
  std::mutex mu_;
  std::condition_variable cv_, done_cv_;
  const std::function<void(int)>* fn_ = nullptr;
  int count_ = 0;
  int next_ = 0;
  int remaining_ = 0;
  uint64_t job_id_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

}  // namespace ptychodd
