#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace ewa_agg {

using Rng = std::mt19937_64;

/// Independent stream for work item `index` under a run seed. Streams depend
/// only on (seed, index), so results do not depend on how items are scheduled.
Rng derive_stream(std::uint64_t seed, std::uint64_t index);

/// Worker count from EWA_AGG_THREADS when set to a positive integer,
/// otherwise std::thread::hardware_concurrency() (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, count) across worker_count() threads using a
/// static block partition. body must only write to slot i of its output.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace ewa_agg
