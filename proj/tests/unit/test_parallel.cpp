#include "problems.hpp"

#include <tilq/parallel.hpp>
#include <tilq/riccati.hpp>

#include <gtest/gtest.h>

#include <atomic>
#include <stdexcept>

using namespace tilq;

namespace {

struct ThreadGuard {
    int saved = thread_limit();
    ~ThreadGuard() { set_thread_limit(saved); }
};

}  // namespace

TEST(Parallel, CoversEveryIndexOnce) {
    ThreadGuard guard;
    set_thread_limit(4);
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(0, 1000, [&](int i) { hits[static_cast<std::size_t>(i)]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(Parallel, PropagatesExceptions) {
    ThreadGuard guard;
    set_thread_limit(3);
    EXPECT_THROW(parallel_for(0, 100, [](int i) {
                     if (i == 57) throw std::runtime_error("boom");
                 }),
                 std::runtime_error);
}

TEST(Parallel, ThreadCountDoesNotChangeResults) {
    ThreadGuard guard;
    const auto p = tilq::fixtures::hyperbolic(2, 1.0, 2.0);
    const auto g = TimeGrid::uniform(1.0, 64);
    set_thread_limit(1);
    const auto a = solve_riccati(p, g);
    set_thread_limit(4);
    const auto b = solve_riccati(p, g);
    for (int i = 0; i < g.size(); ++i) EXPECT_EQ(a.node(i), b.node(i));
}

TEST(Parallel, LimitIsClamped) {
    ThreadGuard guard;
    set_thread_limit(0);
    EXPECT_EQ(thread_limit(), 1);
}
