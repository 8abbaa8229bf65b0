#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

namespace lithocheck {

// Bounded worker pool. parallel_for may be called from inside a running task:
// the calling thread always drains unclaimed items itself, so nesting cannot
// deadlock, and at most `jobs` threads run task bodies at once.
class TaskPool {
 public:
  explicit TaskPool(std::size_t jobs) {
    for (std::size_t i = 1; i < jobs; ++i) threads_.emplace_back([this] { worker(); });
  }
  TaskPool(const TaskPool&) = delete;
  TaskPool& operator=(const TaskPool&) = delete;
  ~TaskPool() {
    {
      std::lock_guard lock(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  std::size_t concurrency() const { return threads_.size() + 1; }

  template <typename Fn>
  void parallel_for(std::size_t n, Fn&& fn) {
    if (n == 0) return;
    if (threads_.empty() || n == 1) {
      for (std::size_t i = 0; i < n; ++i) fn(i);
      return;
    }
    struct State {
      std::atomic<std::size_t> next{0};
      std::size_t done = 0;
      std::size_t n = 0;
      std::function<void(std::size_t)> body;
      std::mutex mu;
      std::condition_variable cv;
      std::exception_ptr error;
    };
    auto state = std::make_shared<State>();
    state->n = n;
    state->body = [&fn](std::size_t i) { fn(i); };
    auto drain = [state] {
      for (;;) {
        std::size_t i = state->next.fetch_add(1);
        if (i >= state->n) return;
        try {
          state->body(i);
        } catch (...) {
          std::lock_guard lock(state->mu);
          if (!state->error) state->error = std::current_exception();
        }
        std::lock_guard lock(state->mu);
        if (++state->done == state->n) state->cv.notify_all();
      }
    };
    std::size_t helpers = std::min(threads_.size(), n - 1);
    {
      std::lock_guard lock(mu_);
      for (std::size_t i = 0; i < helpers; ++i) queue_.emplace_back(drain);
    }
    cv_.notify_all();
    drain();
    std::unique_lock lock(state->mu);
    state->cv.wait(lock, [&] { return state->done == state->n; });
    if (state->error) std::rethrow_exception(state->error);
  }

 private:
  void worker() {
    for (;;) {
      std::function<void()> task;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return stop_ || !queue_.empty(); });
        if (queue_.empty()) return;
        task = std::move(queue_.front());
        queue_.pop_front();
      }
      task();
    }
  }

  std::vector<std::thread> threads_;
  std::deque<std::function<void()>> queue_;
  std::mutex mu_;
  std::condition_variable cv_;
  bool stop_ = false;
};

}  // namespace lithocheck
