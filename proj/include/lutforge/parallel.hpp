#pragma once

#include <cstddef>
#include <functional>

namespace lutforge {

/// Worker count used by pixel-parallel loops. Defaults to the LUTFORGE_THREADS
/// environment variable when set, otherwise the hardware concurrency.
int thread_count();

/// Override the worker count for this process (0 restores the default).
void set_thread_count(int threads);

/// Run `body(begin, end)` over contiguous sub-ranges of [0, n). Every index is
/// visited exactly once. Callers write disjoint outputs, so results never
/// depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

/// Leaf size of the pairwise reduction tree used by `tree_sum`.
inline constexpr std::size_t kReduceLeaf = 256;

/// Pairwise (tree) sum of term(i) for i in [begin, end). The tree shape depends
/// only on the range, so repeated evaluations agree bitwise.
template <class Term>
double tree_sum(std::size_t begin, std::size_t end, const Term& term) {
  if (end - begin <= kReduceLeaf) {
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += term(i);
    return acc;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  return tree_sum(begin, mid, term) + tree_sum(mid, end, term);
}

}  // namespace lutforge
