#include "marr/log.hpp"
#include "marr/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace marr {

namespace {

std::mutex log_mutex;
LogLevel log_threshold = LogLevel::warning;
LogSink log_sink = [](LogLevel level, std::string_view message) {
  const char *tag = level == LogLevel::warning ? "warning" : level == LogLevel::info ? "info" : "debug";
  std::clog << "[marr " << tag << "] " << message << '\n';
};

} // namespace

void set_log_sink(LogSink sink) {
  std::lock_guard lock(log_mutex);
  log_sink = std::move(sink);
}

void set_log_level(LogLevel level) {
  std::lock_guard lock(log_mutex);
  log_threshold = level;
}

void log(LogLevel level, std::string_view message) {
  std::lock_guard lock(log_mutex);
  if (level < log_threshold || !log_sink)
    return;
  log_sink(level, message);
}

unsigned default_workers() {
  if (const char *env = std::getenv("MARR_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0)
        return static_cast<unsigned>(n);
    } catch (const std::exception &) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body, unsigned workers) {
  if (workers == 0)
    workers = default_workers();
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  const unsigned count = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  pool.reserve(count);
  for (unsigned t = 0; t < count; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure)
            failure = std::current_exception();
        }
      }
    });
  }
  for (auto &th : pool)
    th.join();
  if (failure)
    std::rethrow_exception(failure);
}

} // namespace marr
