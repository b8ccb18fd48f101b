#include "hroa/ml_codec.hpp"

#include "hroa/error.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

namespace hroa {
namespace {

// Minimum disjoint partition into complete sub-trees, solved per connected
// trie component. For a member v:
//   covered[v][k] = blocks needed below v when an ancestor block (or v's own
//                   block) already covers v's sub-tree down to length len+k;
//   uncovered[v]  = 1 + min_k covered[v][k]   (v must root its own block).
// k ranges up to full_depth(v) - len, the deepest complete sub-tree at v.
struct Node {
  Prefix prefix;
  int child[2] = {-1, -1};
  int full_depth = 0;
  std::vector<std::size_t> covered;
  std::size_t uncovered = 0;
  int best_k = 0;
};

std::size_t child_cost(const std::vector<Node> &nodes, int child, int k) {
  if (child < 0)
    return 0;
  return k >= 1 ? nodes[child].covered[k - 1] : nodes[child].uncovered;
}

} // namespace

std::vector<AddressBlock> compress_minimal(const PrefixSet &prefixes) {
  if (prefixes.empty())
    throw RangeError("compress_minimal: empty input");

  std::vector<Node> nodes;
  nodes.reserve(prefixes.size());
  std::unordered_map<Prefix, int, PrefixHash> index;
  index.reserve(prefixes.size() * 2);
  for (const auto &p : prefixes) {
    index.emplace(p, static_cast<int>(nodes.size()));
    nodes.emplace_back().prefix = p;
  }

  std::vector<int> order(nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return nodes[a].prefix.length() > nodes[b].prefix.length();
  });

  for (int v : order) {
    Node &n = nodes[v];
    const int len = n.prefix.length();
    if (len < n.prefix.width()) {
      for (int side = 0; side < 2; ++side) {
        auto it = index.find(n.prefix.child(side == 1));
        n.child[side] = it == index.end() ? -1 : it->second;
      }
    }
    n.full_depth = len;
    if (n.child[0] >= 0 && n.child[1] >= 0)
      n.full_depth = std::min(nodes[n.child[0]].full_depth, nodes[n.child[1]].full_depth);

    const int kmax = n.full_depth - len;
    n.covered.resize(kmax + 1);
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (int k = 0; k <= kmax; ++k) {
      n.covered[k] = child_cost(nodes, n.child[0], k) + child_cost(nodes, n.child[1], k);
      if (n.covered[k] <= best) {
        best = n.covered[k];
        n.best_k = k;
      }
    }
    n.uncovered = 1 + best;
  }

  std::vector<AddressBlock> out;
  // (node, covered depth or -1 when uncovered)
  std::vector<std::pair<int, int>> stack;
  for (int v = 0; v < static_cast<int>(nodes.size()); ++v) {
    const Prefix &p = nodes[v].prefix;
    if (p.length() == 0 || !index.contains(p.parent()))
      stack.emplace_back(v, -1);
  }
  while (!stack.empty()) {
    auto [v, cover] = stack.back();
    stack.pop_back();
    const Node &n = nodes[v];
    const int len = n.prefix.length();
    if (cover < 0) {
      cover = len + n.best_k;
      out.emplace_back(n.prefix, cover);
    }
    for (int c : n.child)
      if (c >= 0)
        stack.emplace_back(c, cover > len ? cover : -1);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Ratio scatter_degree(const PrefixSet &prefixes) {
  return Ratio{compress_minimal(prefixes).size(), prefixes.size()};
}

std::size_t excess_prefixes(const AddressBlock &block, const PrefixSet &authorized, int cap) {
  std::vector<Prefix> all;
  expand_into(block, all, cap);
  return static_cast<std::size_t>(std::count_if(
      all.begin(), all.end(), [&](const Prefix &p) { return !authorized.contains(p); }));
}

} // namespace hroa
