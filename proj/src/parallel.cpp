#include "nsdarcy/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace nsdarcy {

namespace {

int threads_from_env() {
  const char* env = std::getenv("NSDARCY_THREADS");
  if (env == nullptr) return 1;
  try {
    const int t = std::stoi(env);
    return t >= 1 ? t : 1;
  } catch (const std::exception&) {
    return 1;
  }
}

std::atomic<int>& thread_budget() {
  static std::atomic<int> budget{threads_from_env()};
  return budget;
}

}  // namespace

int assembly_threads() { return thread_budget().load(std::memory_order_relaxed); }

void set_assembly_threads(int threads) {
  thread_budget().store(threads >= 1 ? threads : 1, std::memory_order_relaxed);
}

}  // namespace nsdarcy
