#pragma once

// Test-only reference constructions, kept independent of the library's
// letter actions and closed forms.

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <vector>

#include "bubblewalk/graph.hpp"

namespace bubblewalk::testing {

/// S(alpha) built edge by edge from its textual description, up to `levels`.
struct ReferenceGraph {
  std::map<VertexAddress, std::set<VertexAddress>> adj;

  ReferenceGraph(const ScalingRule& rule, int levels) {
    for (int n = 1; n <= levels; ++n) {
      const std::int64_t alpha = rule.alpha(n);
      const int len = n - 1;
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << len); ++bits) {
        auto v = [&](std::int64_t p) { return VertexAddress::unchecked(bits, len, p); };
        for (std::int64_t p = 0; p < 2 * alpha; ++p) {
          link(v(p), v((p + 1) % (2 * alpha)));
        }
        if (n < levels) {
          auto mid = v(alpha);
          auto c0 = VertexAddress::unchecked(bits, len + 1, 0);
          auto c1 = VertexAddress::unchecked(bits | (std::uint64_t{1} << len), len + 1, 0);
          link(mid, c0);
          link(c0, c1);
          link(c1, mid);
        }
      }
    }
  }

  void link(const VertexAddress& x, const VertexAddress& y) {
    if (x == y) return;
    adj[x].insert(y);
    adj[y].insert(x);
  }

  std::map<VertexAddress, std::int64_t> bfs(const VertexAddress& from, std::int64_t radius) const {
    std::map<VertexAddress, std::int64_t> d{{from, 0}};
    std::deque<VertexAddress> queue{from};
    while (!queue.empty()) {
      auto v = queue.front();
      queue.pop_front();
      if (d[v] == radius) continue;
      for (const auto& u : adj.at(v)) {
        if (d.emplace(u, d[v] + 1).second) queue.push_back(u);
      }
    }
    return d;
  }
};

}  // namespace bubblewalk::testing
