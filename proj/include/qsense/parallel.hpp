// Copyright 2025 the qsense authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace qsense {

// Split [0, n) into at most `jobs` contiguous chunks and run `fn(begin, end)`
// on each, on separate threads when jobs > 1.  Chunk boundaries depend only
// on (n, jobs); callers that write disjoint output slices per index keep
// bitwise-deterministic results for any job count.
inline void parallel_for_chunks(int n, int jobs,
                                const std::function<void(int, int)>& fn) {
  if (n <= 0) return;
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  const int base = n / jobs, extra = n % jobs;
  int begin = 0;
  for (int j = 0; j < jobs; ++j) {
    const int len = base + (j < extra ? 1 : 0);
    const int end = begin + len;
    workers.emplace_back([&fn, begin, end] { fn(begin, end); });
    begin = end;
  }
  for (auto& w : workers) w.join();
}

}  // namespace qsense
