#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "causal/citest.hpp"
#include "causal/graph.hpp"
#include "causal/pattern.hpp"

namespace causal {

// Separating sets recorded during skeleton search, keyed by unordered pair.
class SepSets {
  public:
    void record(int i, int j, std::vector<int> s) { m_[key(i, j)] = std::move(s); }
    const std::vector<int>* find(int i, int j) const {
        auto it = m_.find(key(i, j));
        return it == m_.end() ? nullptr : &it->second;
    }
    bool contains(int i, int j, int k) const;
    std::size_t size() const { return m_.size(); }

  private:
    static std::pair<int, int> key(int i, int j) { return {std::min(i, j), std::max(i, j)}; }
    std::map<std::pair<int, int>, std::vector<int>> m_;
};

struct PcOptions {
    double alpha = 0.01;
    int max_cond = -1;  // largest conditioning set searched; negative = unbounded
};

struct SkeletonResult {
    std::vector<std::vector<std::uint8_t>> adj;
    SepSets sepsets;
};

struct PcResult {
    MixedGraph graph;
    SepSets sepsets;
    std::vector<std::string> conflicts;
};

// Order-stable adjacency search: adjacency sets are snapshot per level, every
// ordered pair scans subsets of its snapshot neighborhood in lexicographic
// order, and the first separating set wins.
SkeletonResult pc_skeleton(const CiEngine& ci, double alpha, int max_cond = -1);

// Skeleton, collider orientation (conflicts between overlapping colliders are
// logged, the later orientation standing), then orientation closure. Output
// is a completed pattern: tail/arrow marks only, no directed cycle.
PcResult pc_stable(const CiEngine& ci, const PcOptions& opt = {});
PcResult pc_stable(const SufficientStats& s, const PcOptions& opt = {});

}  // namespace causal
