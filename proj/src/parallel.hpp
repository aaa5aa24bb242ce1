#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace dlcz::detail {

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Splits [0, n) into contiguous chunks and calls fn(chunk, begin, end) for
/// each, on up to `threads` workers. Chunk boundaries depend only on n and
/// the chunk count, never on scheduling.
template <typename Fn>
void parallel_chunks(std::uint64_t n, std::uint64_t chunks, unsigned threads, Fn&& fn) {
  if (n == 0 || chunks == 0) return;
  chunks = std::min(chunks, n);
  auto bounds = [&](std::uint64_t c) { return n * c / chunks; };
  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(threads, chunks));
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) fn(c, bounds(c), bounds(c + 1));
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::uint64_t c = w; c < chunks; c += workers) fn(c, bounds(c), bounds(c + 1));
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace dlcz::detail
