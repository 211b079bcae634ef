//
// Copyright 2026 The shuffledp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//


#ifndef SHUFFLEDP_PARALLEL_H_
#define SHUFFLEDP_PARALLEL_H_

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace shuffledp {

// Calls fn(i) for every i in [0, count) across `threads` workers. Work is
// split into contiguous blocks; callers write results by index so the output
// does not depend on the worker count. The first exception thrown by any
// worker is rethrown after all workers finish.
template <typename Fn>
void ParallelFor(int64_t count, int threads, Fn&& fn) {
  if (count <= 0) return;
  const int64_t workers =
      std::clamp<int64_t>(threads, 1, std::max<int64_t>(1, count));
  if (workers == 1) {
    for (int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int64_t w = 0; w < workers; ++w) {
    const int64_t begin = count * w / workers;
    const int64_t end = count * (w + 1) / workers;
    pool.emplace_back([&, begin, end] {
      try {
        for (int64_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_PARALLEL_H_
