#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rpmine/log_model.hpp"

namespace rpmine {

/// Directly-follows graph over normalized actions. Vertices are sorted by
/// key so indices give a deterministic total order. The artificial entry
/// vertex is kept outside the vertex set; only its single edge to the first
/// event's key is recorded.
struct ControlFlowGraph {
  std::vector<ActionKey> vertices;                         // sorted, unique
  std::set<std::pair<std::size_t, std::size_t>> edges;     // index pairs
  std::size_t entry_target = 0;                            // key of the first event

  std::size_t index_of(const ActionKey& key) const;
  const ActionKey& key(std::size_t v) const { return vertices[v]; }
};

ControlFlowGraph build_cfg(const std::vector<NormalizedEvent>& norm);

/// Immediate-dominator map; the artificial entry vertex is everyone's
/// ultimate ancestor and is represented by nullopt.
struct DominatorTree {
  std::vector<std::optional<std::size_t>> idom;

  /// True iff every entry path to `v` passes through `u` (u == v included).
  bool dominates(std::size_t u, std::size_t v) const;
};

DominatorTree compute_dominator_tree(const ControlFlowGraph& g);

struct Scc {
  std::vector<std::size_t> vertices;                    // sorted
  std::set<std::pair<std::size_t, std::size_t>> edges;  // induced
};

/// Strongly connected components with at least two vertices, over an
/// arbitrary (vertex set, edge set) subgraph. Ordered by smallest member.
std::vector<Scc> find_nontrivial_sccs(const std::vector<std::size_t>& vertices,
                                      const std::set<std::pair<std::size_t, std::size_t>>& edges);

std::vector<Scc> find_nontrivial_sccs(const ControlFlowGraph& g);

struct BackEdge {
  ActionKey source;  // last action of a task execution
  ActionKey target;  // first action of the next one

  auto operator<=>(const BackEdge&) const = default;
};

/// Peels loops off the graph: for every (possibly nested) non-trivial SCC,
/// removes the in-edges of its header as back-edges; an SCC without a header
/// loses instead the loop-edge whose target reaches its source over the
/// longest simple path, which is not reported. Repeats until acyclic.
std::vector<BackEdge> detect_back_edges(const ControlFlowGraph& g);

/// One task execution: the contiguous run norm[first..last], opened by a
/// back-edge target and closed by the matching source.
struct Segment {
  std::size_t first = 0;
  std::size_t last = 0;
  ActionKey start_key;
  ActionKey end_key;
};

/// Sequential scan pairing segment-start and segment-end actions; events
/// between a segment end and the next start are discarded as noise.
std::vector<Segment> segment_log(const std::vector<NormalizedEvent>& norm,
                                 const std::vector<BackEdge>& back_edges);

std::string cfg_to_dot(const ControlFlowGraph& g);
std::string dominator_tree_to_dot(const ControlFlowGraph& g, const DominatorTree& tree);

}  // namespace rpmine
