#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace dosefind::detail {

/// Runs `body(tally, replication)` for replication = 0..reps-1, split into
/// contiguous chunks across threads, then merges the per-thread tallies in
/// chunk order. Tallies accumulate integer counts and replications own
/// their random streams, so the result is identical for any thread count.
template <class Tally, class Body>
Tally parallel_tally(long reps, int num_threads, const Body& body) {
  if (num_threads <= 0) {
    num_threads = static_cast<int>(std::thread::hardware_concurrency());
    if (num_threads <= 0) num_threads = 1;
  }
  num_threads = static_cast<int>(std::min<long>(num_threads, std::max<long>(reps, 1)));

  std::vector<Tally> partial(static_cast<std::size_t>(num_threads));
  if (num_threads == 1) {
    for (long r = 0; r < reps; ++r) body(partial[0], r);
    return partial[0];
  }

  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(num_threads));
  const long chunk = reps / num_threads;
  const long extra = reps % num_threads;
  long begin = 0;
  for (int w = 0; w < num_threads; ++w) {
    const long end = begin + chunk + (w < extra ? 1 : 0);
    workers.emplace_back([&body, &partial, w, begin, end] {
      Tally& local = partial[static_cast<std::size_t>(w)];
      for (long r = begin; r < end; ++r) body(local, r);
    });
    begin = end;
  }
  for (auto& worker : workers) worker.join();

  Tally total;
  for (const Tally& p : partial) total.merge(p);
  return total;
}

}  // namespace dosefind::detail
