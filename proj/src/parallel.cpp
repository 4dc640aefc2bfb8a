#include "kdsqnm/parallel.hpp"

#include <omp.h>

#include <exception>
#include <vector>

namespace kdsqnm {

void for_each_index(Execution exec, std::size_t count, const std::function<void(std::size_t)>& fn) {
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::vector<std::exception_ptr> errors(count);
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

int available_threads() { return omp_get_max_threads(); }

}  // namespace kdsqnm
