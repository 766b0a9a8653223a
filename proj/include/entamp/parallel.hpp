#pragma once

// Batch execution helpers. Every batch workload (Monte Carlo trials, table
// rows, leakage branches) goes through parallel_map, which has an OpenMP
// path and a plain serial reference path. Results are stored per index and
// reduced afterwards in index order, so both paths agree bit for bit.

#include <cmath>
#include <cstdint>
#include <exception>
#include <random>
#include <vector>

#include <omp.h>

namespace entamp {

enum class Execution { serial, parallel };

// Caps the OpenMP worker count; n <= 0 leaves the runtime default.
inline void set_max_jobs(int n) {
  if (n > 0) omp_set_num_threads(n);
}

inline int max_jobs() { return omp_get_max_threads(); }

template <class Fn>
auto parallel_map(std::size_t count, Fn&& fn, Execution exec = Execution::parallel)
    -> std::vector<decltype(fn(std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}));
  std::vector<Result> out(count);
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(count);
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stream for trial i, independent of scheduling. The base seed is mixed
// before the XOR with i; a bare base ^ i makes seeds 1 and 2 share the same
// set of streams over the first trials.
inline std::mt19937_64 trial_rng(std::uint64_t base_seed, std::uint64_t trial) {
  return std::mt19937_64(splitmix64(splitmix64(base_seed) ^ trial));
}

}  // namespace entamp
