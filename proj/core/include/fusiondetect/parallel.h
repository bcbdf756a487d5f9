/*
 * Copyright 2026 The FusionDetect Authors.
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

#ifndef FUSIONDETECT_PARALLEL_H_
#define FUSIONDETECT_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace fusiondetect {

// Worker count: FD_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
int thread_count();

// Runs body(i) for i in [0, n) over up to thread_count() workers. Work is
// split into contiguous chunks; callers that reduce must write per-index
// results and combine them in index order afterwards.
void parallel_for(size_t n, const std::function<void(size_t)>& body);

}  // namespace fusiondetect

#endif  // FUSIONDETECT_PARALLEL_H_
