#include "voi/reduce.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "voi/error.hpp"

namespace voi {

double ordered_sum(std::span<const double> values) {
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    total += values[i];
    if (!std::isfinite(total))
      throw Error(ErrorKind::NonFiniteReduction, "sum became non-finite at term " + std::to_string(i), i);
  }
  return total;
}

double ordered_mean(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "mean of an empty sequence");
  return ordered_sum(values) / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) throw Error(ErrorKind::InvalidArgument, "sample variance needs at least 2 values");
  const double mean = ordered_mean(values);
  // Corrected two-pass: the second sum removes the rounding error of the mean.
  double ss = 0.0, drift = 0.0;
  for (double v : values) {
    ss += (v - mean) * (v - mean);
    drift += v - mean;
  }
  if (!std::isfinite(ss)) throw Error(ErrorKind::NonFiniteReduction, "variance became non-finite");
  ss -= drift * drift / static_cast<double>(values.size());
  return std::max(0.0, ss) / static_cast<double>(values.size() - 1);
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("VOI_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t error_index = n;

  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };

  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace voi
