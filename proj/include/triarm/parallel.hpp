// Copyright 2026 the triarm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace triarm {

/// Worker count used when a caller passes 0: the TRIARM_THREADS
/// environment variable if set, otherwise std::thread::hardware_concurrency.
std::size_t default_thread_count();

/// Runs fn(begin, end) over a static partition of [0, count) into at most
/// `threads` contiguous chunks. The partition depends only on (count,
/// threads); chunks never overlap, so writes to distinct indices need no
/// synchronization. The first exception thrown by any worker is rethrown
/// on the calling thread.
void parallel_for_chunks(std::size_t count, std::size_t threads,
                         const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace triarm
