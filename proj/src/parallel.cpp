#include "otnet/parallel.hpp"

namespace otnet {

namespace {
std::atomic<int> g_workers{0};
}

void set_worker_count(int workers) { g_workers = std::max(workers, 0); }

int worker_count() {
  const int w = g_workers.load();
  if (w > 0) return w;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace otnet
