#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

namespace lipwidth {

/// Generator for one work chunk. Seeds depend on (seed, chunk) only, so the
/// split of chunks across threads never changes the sampled values.
inline std::mt19937_64 chunk_rng(std::uint64_t seed, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Runs fn(chunk_index, begin, end) for every chunk of [0, total) and returns
/// the per-chunk results in chunk order.
template <class T, class Fn>
std::vector<T> map_chunks(std::size_t total, std::size_t chunk_size, unsigned workers, Fn fn) {
  chunk_size = std::max<std::size_t>(chunk_size, 1);
  const std::size_t chunks = (total + chunk_size - 1) / chunk_size;
  std::vector<T> results(chunks);
  auto body = [&](std::size_t c) {
    const std::size_t begin = c * chunk_size;
    results[c] = fn(c, begin, std::min(total, begin + chunk_size));
  };
  workers = std::max(1u, workers);
  if (workers == 1 || chunks <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  const unsigned used = static_cast<unsigned>(std::min<std::size_t>(workers, chunks));
  for (unsigned w = 0; w < used; ++w) {
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < chunks; c = next++) {
        try {
          body(c);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace lipwidth
