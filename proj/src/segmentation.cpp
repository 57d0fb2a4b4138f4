#include "rpmine/segmentation.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <sstream>

#include "rpmine/error.hpp"

namespace rpmine {

std::size_t ControlFlowGraph::index_of(const ActionKey& key) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), key);
  assert(it != vertices.end() && *it == key);
  return static_cast<std::size_t>(it - vertices.begin());
}

ControlFlowGraph build_cfg(const std::vector<NormalizedEvent>& norm) {
  if (norm.empty()) throw Error(ErrorCode::EmptyLog, "cannot build a graph from no events");

  std::vector<ActionKey> keys;
  keys.reserve(norm.size());
  for (const auto& e : norm) keys.push_back(action_key(e));

  ControlFlowGraph g;
  g.vertices = keys;
  std::sort(g.vertices.begin(), g.vertices.end());
  g.vertices.erase(std::unique(g.vertices.begin(), g.vertices.end()), g.vertices.end());

  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    g.edges.emplace(g.index_of(keys[i]), g.index_of(keys[i + 1]));
  }
  g.entry_target = g.index_of(keys.front());
  return g;
}

// --- Dominators ---------------------------------------------------------------

namespace {

struct Adjacency {
  std::vector<std::vector<std::size_t>> succ;
  std::vector<std::vector<std::size_t>> pred;
};

Adjacency adjacency(std::size_t n, const std::set<std::pair<std::size_t, std::size_t>>& edges) {
  Adjacency adj;
  adj.succ.resize(n);
  adj.pred.resize(n);
  for (const auto& [a, b] : edges) {
    adj.succ[a].push_back(b);
    adj.pred[b].push_back(a);
  }
  return adj;
}

}  // namespace

DominatorTree compute_dominator_tree(const ControlFlowGraph& g) {
  const std::size_t n = g.vertices.size();
  Adjacency adj = adjacency(n, g.edges);

  // Reverse postorder from the entry target; successors in index (= key) order.
  std::vector<std::size_t> postorder;
  std::vector<int> state(n, 0);
  {
    std::vector<std::pair<std::size_t, std::size_t>> stack;  // (vertex, next child)
    stack.emplace_back(g.entry_target, 0);
    state[g.entry_target] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      if (next < adj.succ[v].size()) {
        std::size_t w = adj.succ[v][next++];
        if (state[w] == 0) {
          state[w] = 1;
          stack.emplace_back(w, 0);
        }
      } else {
        postorder.push_back(v);
        stack.pop_back();
      }
    }
  }
  std::vector<std::size_t> rpo_number(n, n + 1);
  std::vector<std::size_t> rpo;
  for (auto it = postorder.rbegin(); it != postorder.rend(); ++it) {
    rpo_number[*it] = rpo.size();
    rpo.push_back(*it);
  }

  // Iterative data-flow over reverse postorder; the artificial entry vertex
  // is modeled by the sentinel index n.
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  const std::size_t entry = n;
  std::vector<std::size_t> idom(n + 1, kUnset);
  idom[entry] = entry;
  idom[g.entry_target] = entry;

  auto order_of = [&](std::size_t v) {
    return v == entry ? static_cast<std::size_t>(0) : rpo_number[v] + 1;
  };
  auto intersect = [&](std::size_t a, std::size_t b) {
    while (a != b) {
      while (order_of(a) > order_of(b)) a = idom[a];
      while (order_of(b) > order_of(a)) b = idom[b];
    }
    return a;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t v : rpo) {
      if (v == g.entry_target) continue;
      std::size_t new_idom = kUnset;
      for (std::size_t p : adj.pred[v]) {
        if (idom[p] == kUnset) continue;
        new_idom = (new_idom == kUnset) ? p : intersect(p, new_idom);
      }
      if (new_idom != kUnset && idom[v] != new_idom) {
        idom[v] = new_idom;
        changed = true;
      }
    }
  }

  DominatorTree tree;
  tree.idom.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (idom[v] == kUnset || idom[v] == entry) {
      tree.idom[v] = std::nullopt;  // immediate dominator is the entry vertex
    } else {
      tree.idom[v] = idom[v];
    }
  }
  return tree;
}

bool DominatorTree::dominates(std::size_t u, std::size_t v) const {
  std::size_t cur = v;
  while (true) {
    if (cur == u) return true;
    if (!idom[cur]) return false;
    cur = *idom[cur];
  }
}

// --- Strongly connected components ---------------------------------------------

std::vector<Scc> find_nontrivial_sccs(
    const std::vector<std::size_t>& vertices,
    const std::set<std::pair<std::size_t, std::size_t>>& edges) {
  // Iterative Tarjan over a local renumbering of the subgraph.
  std::map<std::size_t, std::size_t> local;
  for (std::size_t v : vertices) local.emplace(v, local.size());
  const std::size_t n = vertices.size();
  std::vector<std::vector<std::size_t>> succ(n);
  for (const auto& [a, b] : edges) {
    auto ia = local.find(a);
    auto ib = local.find(b);
    if (ia != local.end() && ib != local.end()) succ[ia->second].push_back(ib->second);
  }

  std::vector<std::size_t> index(n, 0), lowlink(n, 0);
  std::vector<bool> on_stack(n, false), visited(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> components;
  std::size_t counter = 1;

  struct Frame {
    std::size_t v;
    std::size_t child = 0;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (visited[root]) continue;
    std::vector<Frame> frames{{root}};
    visited[root] = true;
    index[root] = lowlink[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.child < succ[f.v].size()) {
        std::size_t w = succ[f.v][f.child++];
        if (!visited[w]) {
          visited[w] = true;
          index[w] = lowlink[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w});
        } else if (on_stack[w]) {
          lowlink[f.v] = std::min(lowlink[f.v], index[w]);
        }
      } else {
        if (lowlink[f.v] == index[f.v]) {
          std::vector<std::size_t> comp;
          while (true) {
            std::size_t w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp.push_back(w);
            if (w == f.v) break;
          }
          components.push_back(std::move(comp));
        }
        std::size_t v = f.v;
        frames.pop_back();
        if (!frames.empty()) {
          lowlink[frames.back().v] = std::min(lowlink[frames.back().v], lowlink[v]);
        }
      }
    }
  }

  std::vector<Scc> result;
  for (auto& comp : components) {
    if (comp.size() < 2) continue;
    Scc scc;
    for (std::size_t lv : comp) scc.vertices.push_back(vertices[lv]);
    std::sort(scc.vertices.begin(), scc.vertices.end());
    for (const auto& e : edges) {
      if (std::binary_search(scc.vertices.begin(), scc.vertices.end(), e.first) &&
          std::binary_search(scc.vertices.begin(), scc.vertices.end(), e.second)) {
        scc.edges.insert(e);
      }
    }
    result.push_back(std::move(scc));
  }
  std::sort(result.begin(), result.end(),
            [](const Scc& a, const Scc& b) { return a.vertices.front() < b.vertices.front(); });
  return result;
}

std::vector<Scc> find_nontrivial_sccs(const ControlFlowGraph& g) {
  std::vector<std::size_t> all(g.vertices.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return find_nontrivial_sccs(all, g.edges);
}

// --- Back-edge detection --------------------------------------------------------

namespace {

constexpr std::size_t kNoVertex = static_cast<std::size_t>(-1);

// DFS discovery order over the component, started from its entry points
// (vertices with an in-edge from outside the component in the residual
// graph, plus the artificial entry edge). Entry points and successors are
// taken in index order so the result is reproducible.
std::vector<std::size_t> component_discovery_order(
    const Scc& comp, const std::set<std::pair<std::size_t, std::size_t>>& residual,
    std::size_t entry_target) {
  std::vector<std::size_t> entries;
  auto in_comp = [&comp](std::size_t v) {
    return std::binary_search(comp.vertices.begin(), comp.vertices.end(), v);
  };
  for (std::size_t v : comp.vertices) {
    bool external = (v == entry_target);
    if (!external) {
      for (const auto& [a, b] : residual) {
        if (b == v && !in_comp(a)) {
          external = true;
          break;
        }
      }
    }
    if (external) entries.push_back(v);
  }
  if (entries.empty()) entries.push_back(comp.vertices.front());

  std::map<std::size_t, std::vector<std::size_t>> succ;
  for (const auto& [a, b] : comp.edges) succ[a].push_back(b);

  std::map<std::size_t, std::size_t> disc;
  std::size_t counter = 0;
  for (std::size_t s : entries) {
    if (disc.count(s)) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{s, 0}};
    disc[s] = counter++;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      auto it = succ.find(v);
      if (it != succ.end() && next < it->second.size()) {
        std::size_t w = it->second[next++];
        if (!disc.count(w)) {
          disc[w] = counter++;
          stack.emplace_back(w, 0);
        }
      } else {
        stack.pop_back();
      }
    }
  }

  std::vector<std::size_t> order(comp.vertices.back() + 1, kNoVertex);
  for (const auto& [v, d] : disc) order[v] = d;
  return order;
}

// Longest simple path (edge count) from `from` to `to` inside the component,
// by dynamic programming over vertex subsets. Component sizes beyond the
// mask width fall back to a discovery-depth heuristic at the caller.
std::optional<std::size_t> longest_simple_path(const Scc& comp, std::size_t from, std::size_t to) {
  std::map<std::size_t, std::size_t> local;
  for (std::size_t v : comp.vertices) local.emplace(v, local.size());
  const std::size_t n = comp.vertices.size();
  std::vector<std::vector<std::size_t>> succ(n);
  for (const auto& [a, b] : comp.edges) succ[local[a]].push_back(local[b]);

  const std::size_t src = local.at(from);
  const std::size_t dst = local.at(to);
  if (src == dst) return 0;

  const std::size_t masks = std::size_t{1} << n;
  constexpr std::int8_t kNone = -1;
  std::vector<std::int8_t> best(masks * n, kNone);  // path length fits well below 127
  best[(std::size_t{1} << src) * n + src] = 0;
  std::optional<std::size_t> result;
  for (std::size_t mask = 1; mask < masks; ++mask) {
    if (!(mask & (std::size_t{1} << src))) continue;
    for (std::size_t v = 0; v < n; ++v) {
      std::int8_t len = best[mask * n + v];
      if (len == kNone || !(mask & (std::size_t{1} << v))) continue;
      if (v == dst) {
        if (!result || static_cast<std::size_t>(len) > *result) result = len;
        continue;  // simple paths end at the destination
      }
      for (std::size_t w : succ[v]) {
        if (mask & (std::size_t{1} << w)) continue;
        std::size_t next = mask | (std::size_t{1} << w);
        if (best[next * n + w] < len + 1) best[next * n + w] = static_cast<std::int8_t>(len + 1);
      }
    }
  }
  return result;
}

struct BackEdgeContext {
  const ControlFlowGraph& g;
  const DominatorTree& tree;
  std::set<std::pair<std::size_t, std::size_t>> residual;
  std::set<std::pair<std::size_t, std::size_t>> back_edges;
};

constexpr std::size_t kMaxExactPathVertices = 20;

void analyse_component(BackEdgeContext& ctx, const Scc& comp) {
  // Header: the unique component vertex dominating all the others.
  std::size_t header = kNoVertex;
  for (std::size_t h : comp.vertices) {
    bool all = true;
    for (std::size_t v : comp.vertices) {
      if (!ctx.tree.dominates(h, v)) {
        all = false;
        break;
      }
    }
    if (all) {
      header = h;
      break;
    }
  }

  if (header != kNoVertex) {
    for (const auto& e : comp.edges) {
      if (e.second == header) {
        ctx.back_edges.insert(e);
        ctx.residual.erase(e);
      }
    }
  } else {
    // Irreducible: multiple entries, no header. Cut the loop-edge whose
    // target reaches its source over the longest simple path; the cut is
    // structural only and is not reported as a task boundary.
    auto disc = component_discovery_order(comp, ctx.residual, ctx.g.entry_target);
    std::vector<std::pair<std::size_t, std::size_t>> loop_edges;
    for (const auto& [a, b] : comp.edges) {
      if (disc[b] != kNoVertex && disc[a] != kNoVertex && disc[b] <= disc[a]) {
        loop_edges.emplace_back(a, b);
      }
    }
    assert(!loop_edges.empty());
    std::pair<std::size_t, std::size_t> chosen = loop_edges.front();
    if (comp.vertices.size() <= kMaxExactPathVertices) {
      std::size_t best_len = 0;
      bool have = false;
      for (const auto& e : loop_edges) {
        auto len = longest_simple_path(comp, e.second, e.first);
        std::size_t l = len.value_or(0);
        if (!have || l > best_len || (l == best_len && e < chosen)) {
          chosen = e;
          best_len = l;
          have = true;
        }
      }
    } else {
      std::size_t best_depth = 0;
      bool have = false;
      for (const auto& e : loop_edges) {
        std::size_t d = disc[e.second];
        if (!have || d > best_depth || (d == best_depth && e < chosen)) {
          chosen = e;
          best_depth = d;
          have = true;
        }
      }
    }
    ctx.residual.erase(chosen);
  }

  std::set<std::pair<std::size_t, std::size_t>> inner;
  for (const auto& e : comp.edges) {
    if (ctx.residual.count(e)) inner.insert(e);
  }
  for (const Scc& nested : find_nontrivial_sccs(comp.vertices, inner)) {
    analyse_component(ctx, nested);
  }
}

}  // namespace

std::vector<BackEdge> detect_back_edges(const ControlFlowGraph& g) {
  BackEdgeContext ctx{g, compute_dominator_tree(g), g.edges, {}};
  for (const Scc& comp : find_nontrivial_sccs(g)) {
    analyse_component(ctx, comp);
  }
  std::vector<BackEdge> out;
  for (const auto& [a, b] : ctx.back_edges) {
    out.push_back(BackEdge{g.key(a), g.key(b)});
  }
  std::sort(out.begin(), out.end());
  return out;
}

// --- Segmentation ----------------------------------------------------------------

std::vector<Segment> segment_log(const std::vector<NormalizedEvent>& norm,
                                 const std::vector<BackEdge>& back_edges) {
  std::set<ActionKey> targets;
  std::set<ActionKey> sources;
  std::set<std::pair<ActionKey, ActionKey>> pairs;  // (source, target)
  for (const auto& be : back_edges) {
    targets.insert(be.target);
    sources.insert(be.source);
    pairs.emplace(be.source, be.target);
  }

  std::vector<Segment> segments;
  bool within = false;
  Segment current;
  for (std::size_t i = 0; i < norm.size(); ++i) {
    ActionKey key = action_key(norm[i]);
    if (targets.count(key)) {
      if (!within) {
        current = Segment{};
        current.first = i;
        current.start_key = key;
        within = true;
      }
      // A start action inside an open segment is part of it.
      continue;
    }
    if (!within) continue;  // noise between a segment end and the next start
    if (sources.count(key) && pairs.count({key, current.start_key})) {
      current.last = i;
      current.end_key = key;
      segments.push_back(current);
      within = false;
    }
  }
  return segments;
}

// --- Debug rendering ----------------------------------------------------------------

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string cfg_to_dot(const ControlFlowGraph& g) {
  std::ostringstream out;
  out << "digraph cfg {\n  rankdir=TB;\n  entry [shape=point];\n";
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    out << "  n" << v << " [label=\"" << dot_escape(g.key(v).str()) << "\"];\n";
  }
  out << "  entry -> n" << g.entry_target << ";\n";
  for (const auto& [a, b] : g.edges) {
    out << "  n" << a << " -> n" << b << ";\n";
  }
  out << "}\n";
  return out.str();
}

std::string dominator_tree_to_dot(const ControlFlowGraph& g, const DominatorTree& tree) {
  std::ostringstream out;
  out << "digraph dominators {\n  entry [shape=point];\n";
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    out << "  n" << v << " [label=\"" << dot_escape(g.key(v).str()) << "\"];\n";
  }
  for (std::size_t v = 0; v < tree.idom.size(); ++v) {
    if (tree.idom[v]) {
      out << "  n" << *tree.idom[v] << " -> n" << v << ";\n";
    } else {
      out << "  entry -> n" << v << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace rpmine
