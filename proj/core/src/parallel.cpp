#include "hawkesnet/parallel.hpp"

namespace hawkesnet {

namespace {
std::atomic<std::size_t> g_max_threads{0};
}  // namespace

void set_max_threads(std::size_t n) { g_max_threads.store(n); }

std::size_t max_threads() {
  const std::size_t n = g_max_threads.load();
  if (n != 0) return n;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

}  // namespace hawkesnet
