#ifndef NODALCERT_PARALLEL_HPP
#define NODALCERT_PARALLEL_HPP

#include <cstddef>
#include <functional>
#include <span>

namespace nodalcert {

/// Calls body(begin, end) on consecutive chunks of [0, count).  Chunks are
/// distributed over worker threads; callers write results into disjoint slots
/// and reduce afterwards in index order, so output does not depend on scheduling.
void parallel_for(std::size_t count, std::size_t chunk,
                  const std::function<void(std::size_t, std::size_t)>& body);

/// Neumaier-compensated sum in index order.
double compensated_sum(std::span<const double> values);

} // namespace nodalcert

#endif
