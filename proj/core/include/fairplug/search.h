#ifndef FAIRPLUG_SEARCH_H_
#define FAIRPLUG_SEARCH_H_

#include <cstdint>
#include <functional>
#include <vector>

namespace fairplug {

struct SizeProbe {
  std::int64_t n = 0;
  bool passed = false;
};

struct SizeSearchResult {
  std::int64_t n = 0;          // smallest passing probe, or the cap
  bool converged = false;      // false when the cap was reached unmet
  std::vector<SizeProbe> probes;  // every evaluated probe, in order
};

// Doubling search from `start` until `passes(n)` holds (or `cap` is
// exceeded), then bisection between the last failing and the first passing
// size. Bisection stops once the bracket is no wider than `resolution`.
// `passes` is assumed monotone in n; each size is evaluated at most once.
SizeSearchResult SmallestPassingSize(
    const std::function<bool(std::int64_t)>& passes, std::int64_t start,
    std::int64_t cap, std::int64_t resolution);

}  // namespace fairplug

#endif  // FAIRPLUG_SEARCH_H_
