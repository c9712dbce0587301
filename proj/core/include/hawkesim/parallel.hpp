#pragma once

#include <cstddef>
#include <functional>

namespace hawkes {

// Runs fn(0..n-1) on up to `threads` workers.  Work items must write only
// to their own output slots; callers reduce the slots serially afterwards,
// which keeps every result bit-identical for any thread count.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace hawkes
