#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace lsf
{

namespace detail
{
inline std::atomic<int> &thread_setting()
{
  static std::atomic<int> n{0};
  return n;
}
} // namespace detail

/// Worker count: explicit setting, else FRACTAL_THREADS, else 1.
inline int thread_count()
{
  int n = detail::thread_setting().load();
  if (n > 0)
    return n;
  if (char const *env = std::getenv("FRACTAL_THREADS"))
  {
    try
    {
      n = std::stoi(env);
    }
    catch (...)
    {
      n = 0;
    }
  }
  return std::max(n, 1);
}

inline void set_thread_count(int n) { detail::thread_setting().store(std::max(n, 0)); }

/// Splits [0, n) into fixed contiguous chunks and runs body(chunk, begin, end)
/// on each. Chunk boundaries depend only on n and the chunk count, so results
/// combined in chunk order are independent of scheduling.
template <class Body>
void parallel_chunks(std::size_t n, std::size_t chunks, Body &&body)
{
  chunks = std::max<std::size_t>(1, std::min(chunks, n));
  auto bounds = [&](std::size_t c) { return n * c / chunks; };
  int const workers = std::min<int>(thread_count(), static_cast<int>(chunks));
  if (workers <= 1)
  {
    for (std::size_t c = 0; c < chunks; ++c)
      body(c, bounds(c), bounds(c + 1));
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < chunks; c = next++)
        body(c, bounds(c), bounds(c + 1));
    });
  for (auto &t : pool)
    t.join();
}

} // namespace lsf
