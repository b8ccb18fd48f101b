#include "hroa/level_opt.hpp"

#include "hroa/error.hpp"

#include <algorithm>
#include <limits>
#include <unordered_set>

namespace hroa {

std::size_t count_nonempty_subtrees(std::span<const Prefix> workload, int i, int j) {
  std::unordered_set<Prefix, PrefixHash> roots;
  for (const auto &p : workload)
    if (p.length() >= i && p.length() < j)
      roots.insert(Prefix(p.family(), p.bits(), i, HostBits::lenient));
  return roots.size();
}

LevelPlan optimize_cuts(int width, int h_max,
                        const std::function<std::size_t(int, int)> &segment_cost) {
  if (h_max < 2)
    throw RangeError("h_max must be >= 2: the terminal sub-tree spans at least two levels");
  struct State {
    bool reachable = false;
    std::size_t cost = 0;
    std::vector<int> levels;
  };
  auto better = [](const State &a, const State &b) {
    if (!b.reachable)
      return true;
    if (a.cost != b.cost)
      return a.cost < b.cost;
    if (a.levels.size() != b.levels.size())
      return a.levels.size() < b.levels.size();
    return a.levels < b.levels;
  };

  const int end = width + 1;
  std::vector<State> best(end + 1);
  best[0] = State{true, 0, {}};
  for (int j = 1; j <= end; ++j) {
    for (int i = std::max(0, j - h_max); i < j; ++i) {
      if (!best[i].reachable || i > width - 1)
        continue;
      State cand{true, best[i].cost + segment_cost(i, j), best[i].levels};
      cand.levels.push_back(i);
      if (better(cand, best[j]))
        best[j] = std::move(cand);
    }
  }
  if (!best[end].reachable)
    throw RangeError("no cut set satisfies the gap cap");
  return LevelPlan{std::move(best[end].levels), best[end].cost};
}

OptimizedLevels optimize_levels(std::span<const Prefix> workload, const CostModel &model,
                                int h_max) {
  if (h_max < 2 || h_max > kMaxSubtreeHeight)
    throw RangeError("h_max must lie in 2.." + std::to_string(kMaxSubtreeHeight));
  if (workload.empty())
    throw RangeError("optimize_levels: empty workload");
  const Family f = workload.front().family();
  for (const auto &p : workload)
    if (p.family() != f)
      throw RangeError("optimize_levels: mixed families");

  const int w = width(f);
  // Per-level sorted root keys so num(i, j) is a distinct count over lengths.
  std::vector<std::vector<const Prefix *>> by_len(w + 1);
  for (const auto &p : workload)
    by_len[p.length()].push_back(&p);

  auto num = [&](int i, int j) {
    std::vector<u128> keys;
    for (int len = i; len < j; ++len)
      for (const Prefix *p : by_len[len])
        keys.push_back(p->top_bits(i));
    std::sort(keys.begin(), keys.end());
    return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
  };
  auto plan = optimize_cuts(w, h_max, [&](int i, int j) {
    return num(i, j) * model.block_bytes(f, j - i);
  });
  return OptimizedLevels{HangingLevels(f, std::move(plan.levels)), plan.cost};
}

std::size_t simulated_cost(std::span<const Prefix> workload, const HangingLevels &cfg,
                           const CostModel &model) {
  std::size_t total = 0;
  for (const auto &b : encode_batch(cfg, workload))
    total += model.block_bytes(b.id.family, b.height);
  return total;
}

} // namespace hroa
