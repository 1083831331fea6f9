#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace voi {

/// Sum in ascending index order. Throws NonFiniteReduction if the running
/// total overflows or any term is non-finite.
double ordered_sum(std::span<const double> values);

double ordered_mean(std::span<const double> values);

/// Unbiased (n-1 divisor) sample variance, two-pass.
double sample_variance(std::span<const double> values);

/// Resolve a requested worker count: 0 means VOI_THREADS if set, otherwise
/// hardware concurrency.
unsigned resolve_threads(unsigned requested);

/// Run body(i) for i in [0, n) on up to `threads` workers. Each index must
/// write only to its own output slot; the caller then reduces in index order.
/// If several bodies throw, the exception from the lowest index is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace voi
