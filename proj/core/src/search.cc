#include "fairplug/search.h"

#include <algorithm>
#include <stdexcept>

namespace fairplug {

SizeSearchResult SmallestPassingSize(
    const std::function<bool(std::int64_t)>& passes, std::int64_t start,
    std::int64_t cap, std::int64_t resolution) {
  if (start < 1 || cap < start || resolution < 1) {
    throw std::invalid_argument("SmallestPassingSize: need 1 <= start <= cap");
  }
  SizeSearchResult result;
  auto probe = [&](std::int64_t n) {
    bool ok = passes(n);
    result.probes.push_back({n, ok});
    return ok;
  };

  std::int64_t lo = 0;  // largest size known to fail (0 = none probed)
  std::int64_t hi = start;
  while (!probe(hi)) {
    lo = hi;
    if (hi >= cap) {
      result.n = cap;
      result.converged = false;
      return result;
    }
    hi = std::min(cap, hi * 2);
  }
  // passes(hi) holds; shrink (lo, hi].
  while (lo > 0 && hi - lo > resolution) {
    std::int64_t mid = lo + (hi - lo) / 2;
    if (probe(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  result.n = hi;
  result.converged = true;
  return result;
}

}  // namespace fairplug
