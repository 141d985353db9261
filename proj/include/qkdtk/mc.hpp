#pragma once

#include <cstdint>
#include <string_view>

#include "qkdtk/randkit.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

// Monte-Carlo trial fan-out. Each trial gets its own stream derived from
// (seed, label, trial index), so the parallel and serial paths produce
// identical counts; the serial path is the reference used in tests and the
// benchmark.

namespace qkdtk::mc {

/// Serial reference: count trials for which `trial(i, stream)` returns true.
template <typename Trial>
std::size_t count_successes_serial(std::size_t trials, std::uint64_t seed,
                                   std::string_view label, Trial&& trial) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    randkit::Stream s(randkit::derive_seed(seed, label, i));
    if (trial(i, s)) ++hits;
  }
  return hits;
}

/// OpenMP-parallel version; bitwise-identical count to the serial reference.
template <typename Trial>
std::size_t count_successes(std::size_t trials, std::uint64_t seed,
                            std::string_view label, Trial&& trial) {
#if defined(_OPENMP)
  std::size_t hits = 0;
#pragma omp parallel for schedule(static) reduction(+ : hits)
  for (long long i = 0; i < static_cast<long long>(trials); ++i) {
    randkit::Stream s(
        randkit::derive_seed(seed, label, static_cast<std::uint64_t>(i)));
    if (trial(static_cast<std::size_t>(i), s)) ++hits;
  }
  return hits;
#else
  return count_successes_serial(trials, seed, label,
                                std::forward<Trial>(trial));
#endif
}

}  // namespace qkdtk::mc
