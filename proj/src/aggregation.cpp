#include "rpmine/aggregation.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace rpmine {

namespace {

std::string identifier_identity(const ElementIdentifier& id) {
  std::string out = id.kind == ElementIdentifier::Kind::Web ? "web:" : "sheet:";
  out += id.url + "\x1f" + id.id + "\x1f" + id.workbook + "\x1f" + id.worksheet + "\x1f" +
         id.column;
  if (id.row) out += "\x1f" + *id.row;
  return out;
}

}  // namespace

DataTransformationGraph build_graph(const RoutineSpecification& spec) {
  struct Vertex {
    std::string identity;
    std::set<std::string> source_ids;
    std::string target_id;
  };
  std::vector<Vertex> items;
  items.reserve(spec.steps.size());
  for (const auto& step : spec.steps) {
    Vertex v;
    v.identity = step.canonical_identity();
    for (const auto& s : step.sources) v.source_ids.insert(identifier_identity(s));
    v.target_id = identifier_identity(step.target);
    items.push_back(std::move(v));
  }
  std::sort(items.begin(), items.end(),
            [](const Vertex& a, const Vertex& b) { return a.identity < b.identity; });
  items.erase(std::unique(items.begin(), items.end(),
                          [](const Vertex& a, const Vertex& b) { return a.identity == b.identity; }),
              items.end());

  DataTransformationGraph graph;
  for (const auto& v : items) graph.vertices.push_back(v.identity);
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = 0; j < items.size(); ++j) {
      if (i == j) continue;
      if (items[j].source_ids.count(items[i].target_id)) graph.edges.emplace_back(i, j);
    }
  }
  std::sort(graph.edges.begin(), graph.edges.end());
  return graph;
}

namespace {

std::multiset<ActionKey> action_multiset(const RoutineSpecification& spec) {
  return {spec.candidate.pattern.symbols.begin(), spec.candidate.pattern.symbols.end()};
}

std::vector<ActionKey> click_sequence(const RoutineSpecification& spec) {
  std::vector<ActionKey> clicks;
  if (spec.candidate.instances.empty()) return clicks;
  const auto& events = spec.candidate.instances.front().events;
  for (std::size_t i = 0; i < spec.candidate.pattern.symbols.size(); ++i) {
    if (events[i].type == UiType::ClickButton) {
      clicks.push_back(spec.candidate.pattern.symbols[i]);
    }
  }
  return clicks;
}

}  // namespace

bool equivalent(const RoutineSpecification& a, const RoutineSpecification& b) {
  DataTransformationGraph ga = build_graph(a);
  DataTransformationGraph gb = build_graph(b);
  if (ga.vertices != gb.vertices || ga.edges != gb.edges) return false;
  if (action_multiset(a) != action_multiset(b)) return false;
  return click_sequence(a) == click_sequence(b);
}

double average_duration_ms(const RoutineSpecification& spec) {
  const auto& instances = spec.candidate.instances;
  if (instances.empty()) return 0.0;
  double total = 0.0;
  for (const auto& instance : instances) {
    if (instance.events.empty()) continue;
    total += static_cast<double>(instance.events.back().timestamp_ms -
                                 instance.events.front().timestamp_ms);
  }
  return total / static_cast<double>(instances.size());
}

namespace {

// True when `cand` should replace `cur` as the class representative.
bool prefer(const RoutineSpecification& cand, const RoutineSpecification& cur,
            RetentionCriterion retention) {
  if (retention == RetentionCriterion::Duration) {
    double cand_ms = average_duration_ms(cand);
    double cur_ms = average_duration_ms(cur);
    if (cand_ms != cur_ms) return cand_ms < cur_ms;
  }
  std::size_t cand_len = cand.candidate.pattern.symbols.size();
  std::size_t cur_len = cur.candidate.pattern.symbols.size();
  if (cand_len != cur_len) return cand_len < cur_len;
  std::size_t cand_freq = cand.candidate.instances.size();
  std::size_t cur_freq = cur.candidate.instances.size();
  if (cand_freq != cur_freq) return cand_freq > cur_freq;
  return cand.candidate.discovery_order < cur.candidate.discovery_order;
}

}  // namespace

std::vector<RoutineSpecification> aggregate(const std::vector<RoutineSpecification>& specs,
                                            RetentionCriterion retention) {
  std::vector<std::size_t> cluster(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) cluster[i] = i;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (cluster[i] != i) continue;
    for (std::size_t j = i + 1; j < specs.size(); ++j) {
      if (cluster[j] == j && equivalent(specs[i], specs[j])) cluster[j] = i;
    }
  }

  std::vector<RoutineSpecification> kept;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (cluster[i] != i) continue;
    std::size_t best = i;
    for (std::size_t j = i + 1; j < specs.size(); ++j) {
      if (cluster[j] == i && prefer(specs[j], specs[best], retention)) best = j;
    }
    kept.push_back(specs[best]);
  }
  return kept;
}

}  // namespace rpmine
