#pragma once

#include <cstddef>

namespace nsdarcy {

/// Thread budget for the element kernels. Defaults to NSDARCY_THREADS from
/// the environment, or 1 when unset.
int assembly_threads();
void set_assembly_threads(int threads);

enum class Exec { Serial, Parallel };

/// Run body(i) for i in [0, count). Exec::Parallel splits the range into
/// static contiguous chunks over assembly_threads() OpenMP threads; the body
/// must write only to slots owned by i.
template <class Body>
void for_each_index(Exec exec, std::ptrdiff_t count, Body&& body) {
  const int threads = exec == Exec::Parallel ? assembly_threads() : 1;
  if (threads <= 1) {
    for (std::ptrdiff_t i = 0; i < count; ++i) body(i);
    return;
  }
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < count; ++i) body(i);
}

}  // namespace nsdarcy
