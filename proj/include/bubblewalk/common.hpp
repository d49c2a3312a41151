#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace bubblewalk {

/// A level beyond the deepest level the scaling rule can represent was needed.
class LevelCapError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// A configured resource guard (ball size, tracking size, state space) tripped.
class ResourceGuardError : public std::runtime_error {
 public:
  ResourceGuardError(std::string guard, const std::string& what)
      : std::runtime_error(guard + ": " + what), guard_(std::move(guard)) {}
  const std::string& guard() const noexcept { return guard_; }

 private:
  std::string guard_;
};

/// Random stream for one replica. Streams are keyed by (seed, replica) so a
/// replica's draws do not depend on how replicas are spread across workers.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t replica) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(replica),
                      static_cast<std::uint32_t>(replica >> 32), 0x62776b7au};
    engine_.seed(seq);
  }
  explicit Rng(std::uint64_t seed) : Rng(seed, 0) {}

  std::uint64_t next() { return engine_(); }

  /// Two uniform bits at a time, refilled from one 64-bit draw.
  unsigned bits2() {
    if (avail_ < 2) {
      buffer_ = engine_();
      avail_ = 64;
    }
    unsigned v = static_cast<unsigned>(buffer_ & 3u);
    buffer_ >>= 2;
    avail_ -= 2;
    return v;
  }

  unsigned bit() {
    if (avail_ < 1) {
      buffer_ = engine_();
      avail_ = 64;
    }
    unsigned v = static_cast<unsigned>(buffer_ & 1u);
    buffer_ >>= 1;
    avail_ -= 1;
    return v;
  }

  /// Uniform in [0, 1) with 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t below(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t buffer_ = 0;
  int avail_ = 0;
};

inline unsigned default_threads() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Work is split
/// into contiguous blocks; callers write results by index, so output never
/// depends on the worker count.
inline void parallel_for(std::size_t count, unsigned threads,
                         const std::function<void(std::size_t)>& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  std::size_t block = (count + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        std::size_t lo = t * block, hi = std::min(count, lo + block);
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace bubblewalk
