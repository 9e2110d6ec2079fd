// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "splat360/parallel.hpp"

using namespace splat360;

TEST(ParallelFor, VisitsEveryIndexOnce) {
    for (int workers : {1, 2, 7}) {
        std::vector<std::atomic<int>> hits(1000);
        parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i].fetch_add(1); });
        for (auto& h : hits) EXPECT_EQ(h.load(), 1);
    }
}

TEST(ParallelFor, PropagatesExceptions) {
    EXPECT_THROW(parallel_for(100, 3,
                              [](std::size_t i) {
                                  if (i == 42) throw std::runtime_error("boom");
                              }),
                 std::runtime_error);
}

TEST(ResolveWorkers, ExplicitEnvironmentAndFallback) {
    EXPECT_EQ(resolve_workers(5), 5);
    ::setenv("SPLAT360_WORKERS", "3", 1);
    EXPECT_EQ(resolve_workers(0), 3);
    ::unsetenv("SPLAT360_WORKERS");
    EXPECT_GE(resolve_workers(0), 1);
}
