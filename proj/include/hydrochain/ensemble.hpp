// Copyright 2026 The hydrochain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
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
#include <mutex>
#include <thread>
#include <vector>

namespace hydrochain {

// Runs work(acc, index) for index in [0, count) on a pool of threads.
// Indices are cut into fixed blocks of block_size; each block fills its own
// accumulator from make(), and blocks are merged left to right in block
// order. The partition never depends on the thread count, so results are
// bit-identical for any number of workers.
template <class Make, class Work>
auto run_ensemble(std::size_t count, unsigned threads, std::size_t block_size, Make make, Work work)
    -> decltype(make()) {
  using Acc = decltype(make());
  if (block_size == 0) block_size = 1;
  const std::size_t blocks = (count + block_size - 1) / block_size;
  std::vector<Acc> partial;
  partial.reserve(blocks);
  for (std::size_t b = 0; b < blocks; ++b) partial.push_back(make());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= blocks) return;
      try {
        const std::size_t lo = b * block_size;
        const std::size_t hi = std::min(count, lo + block_size);
        for (std::size_t i = lo; i < hi; ++i) work(partial[b], i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(blocks);
        return;
      }
    }
  };
  const unsigned t = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(blocks, 1))));
  if (t == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (unsigned i = 0; i < t; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  Acc total = make();
  for (auto& p : partial) total.merge(p);
  return total;
}

}  // namespace hydrochain
