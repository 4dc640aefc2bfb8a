#pragma once

#include <cstddef>
#include <functional>

namespace kdsqnm {

// Node loops run either through the serial reference path or the OpenMP
// kernel. Both visit every index exactly once and callers write results into
// per-index slots, so aggregation is order-independent and the two paths
// produce identical output.
enum class Execution { serial, parallel };

/// Runs fn(i) for i in [0, count). If any call throws, the exception from the
/// lowest failing index is rethrown: the serial path stops there, the
/// parallel path after finishing the loop.
void for_each_index(Execution exec, std::size_t count, const std::function<void(std::size_t)>& fn);

int available_threads();

}  // namespace kdsqnm
