/*
 * Copyright 2026 The susp Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SUSP_PARALLEL_HPP_
#define SUSP_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace susp {

// Runs fn(i) for i in [0, n) on up to threads workers. Work is handed out in
// index order; fn must only write to per-index state. threads <= 1 runs
// inline on the calling thread.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace susp

#endif  // SUSP_PARALLEL_HPP_
