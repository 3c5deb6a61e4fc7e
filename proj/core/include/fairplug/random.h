#ifndef FAIRPLUG_RANDOM_H_
#define FAIRPLUG_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace fairplug {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to decorrelate derived seeds.
std::uint64_t MixSeed(std::uint64_t x);

// Derives an independent child seed from a master seed and a path of
// integer coordinates (split index, trial index, sample size, ...). The
// result depends only on its inputs, so any shard plan reproduces the same
// streams.
std::uint64_t DeriveSeed(std::uint64_t master,
                         std::initializer_list<std::uint64_t> path);

// Same, with a string tag mixed in (e.g. "eval", "noise").
std::uint64_t DeriveSeed(std::uint64_t master, std::string_view tag,
                         std::initializer_list<std::uint64_t> path = {});

}  // namespace fairplug

#endif  // FAIRPLUG_RANDOM_H_
