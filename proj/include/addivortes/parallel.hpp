#ifndef ADDIVORTES_PARALLEL_HPP
#define ADDIVORTES_PARALLEL_HPP

#include <cstddef>
#include <functional>
#include <optional>

namespace addivortes {

// Explicit request, else ADDIVORTES_THREADS, else the hardware count.
std::size_t resolve_threads(std::optional<std::size_t> requested = std::nullopt);

// Calls fn(i) for i in [0, n) on up to `threads` workers. Work items are
// claimed in index order; if any throw, the exception of the lowest index is
// rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace addivortes

#endif
