#pragma once

#include "econv/ext_real.hpp"

#include <cstddef>
#include <limits>
#include <thread>
#include <vector>

namespace econv {

struct ArgMax {
  ExtReal value = ExtReal::neg_inf();
  std::size_t index = std::numeric_limits<std::size_t>::max();

  bool found() const { return index != std::numeric_limits<std::size_t>::max(); }
};

/// Maximum of fn(i) over i < count, with the lowest index winning ties.
/// Work is split into contiguous chunks, so the result does not depend on
/// the thread count.
template <class F>
ArgMax parallel_argmax(std::size_t count, unsigned threads, F&& fn) {
  auto scan = [&](std::size_t begin, std::size_t end) {
    ArgMax best;
    for (std::size_t i = begin; i < end; ++i) {
      const ExtReal v = fn(i);
      if (!best.found() || v > best.value) {
        best = {v, i};
        if (v.is_pos_inf()) {
          break;
        }
      }
    }
    return best;
  };
  constexpr std::size_t kMinChunk = 4096;
  if (threads <= 1 || count < 2 * kMinChunk) {
    return scan(0, count);
  }
  const std::size_t parts = std::min<std::size_t>(threads, count / kMinChunk);
  std::vector<ArgMax> results(parts);
  std::vector<std::thread> pool;
  pool.reserve(parts);
  for (std::size_t p = 0; p < parts; ++p) {
    const std::size_t begin = count * p / parts;
    const std::size_t end = count * (p + 1) / parts;
    pool.emplace_back([&, p, begin, end] { results[p] = scan(begin, end); });
  }
  for (std::thread& t : pool) {
    t.join();
  }
  ArgMax best;
  for (const ArgMax& r : results) {
    if (r.found() && (!best.found() || r.value > best.value)) {
      best = r;
    }
  }
  return best;
}

} // namespace econv
