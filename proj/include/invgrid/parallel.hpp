// Copyright 2026 The invgrid Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace invgrid {

// Runs produce(i) for i in [0, n) on up to `jobs` threads and hands each
// result to consume(i, result) on the calling thread in increasing i. Work is
// processed in chunks so at most a few results per worker are held at once.
// The consumer sees the same sequence regardless of `jobs`.
template <typename Produce, typename Consume>
void ordered_parallel(std::size_t n, unsigned jobs, Produce&& produce, Consume&& consume) {
  using Result = decltype(produce(std::size_t{0}));
  jobs = std::max(1u, jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) consume(i, produce(i));
    return;
  }
  const std::size_t chunk = std::size_t{jobs} * 4;
  for (std::size_t base = 0; base < n; base += chunk) {
    const std::size_t end = std::min(n, base + chunk);
    std::vector<std::optional<Result>> slots(end - base);
    std::vector<std::exception_ptr> failures(end - base);
    std::atomic<std::size_t> next{base};
    auto worker = [&] {
      for (std::size_t i = next++; i < end; i = next++) {
        try {
          slots[i - base].emplace(produce(i));
        } catch (...) {
          failures[i - base] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> threads;
    const std::size_t spawn = std::min<std::size_t>(jobs, end - base);
    for (std::size_t t = 0; t < spawn; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    for (std::size_t i = base; i < end; ++i) {
      if (failures[i - base]) std::rethrow_exception(failures[i - base]);
      consume(i, std::move(*slots[i - base]));
    }
  }
}

}  // namespace invgrid
