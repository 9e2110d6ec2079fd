// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace splat360 {

/// Resolves a requested worker count: positive values are used as given,
/// 0 reads SPLAT360_WORKERS and falls back to the hardware concurrency.
int resolve_workers(int requested);

/// Calls fn(i) for every i in [0, count) using up to workers threads.
/// Work items are claimed dynamically; fn must only write state owned by i.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

} // namespace splat360
