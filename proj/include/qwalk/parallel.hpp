#pragma once

#include <cstdint>
#include <functional>

namespace qwalk {

// Worker count: QWALK_THREADS if set and > 0, otherwise hardware concurrency.
int thread_budget();

// Runs body(i) for i in [0, n) on thread_budget() threads (static block
// partition). Deterministic as long as each i writes only its own slots.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& body);

}  // namespace qwalk
