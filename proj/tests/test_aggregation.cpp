#include "rpmine/aggregation.hpp"

#include <algorithm>
#include <random>

#include "doctest.h"

using namespace rpmine;

namespace {

constexpr const char* kUrl = "https://crm.example.com";

UiEvent click(const std::string& name) {
  UiEvent e;
  e.type = UiType::ClickButton;
  e.params = {{"url", kUrl}, {"name", name}, {"id", name}, {"type", "button"}};
  return e;
}

UiEvent copy_cell(const std::string& column, const std::string& value) {
  UiEvent e;
  e.type = UiType::CopyCell;
  e.params = {{"workbook", "WB"}, {"worksheet", "S"}, {"column", column},
              {"row", "2"},       {"value", value},   {"copied", value}};
  return e;
}

UiEvent paste_field(const std::string& id, const std::string& value) {
  UiEvent e;
  e.type = UiType::Paste;
  e.params = {{"url", kUrl}, {"name", id}, {"id", id}, {"value", ""}, {"pasted", value}};
  return e;
}

UiEvent edit_field(const std::string& id, const std::string& value) {
  UiEvent e;
  e.type = UiType::EditField;
  e.params = {{"url", kUrl}, {"name", id}, {"id", id}, {"type", "text"}, {"value", value}};
  return e;
}

// A routine specification that copies the given fields (in the given order)
// between two framing clicks, with a fixed number of instances.
RoutineSpecification transfer_spec(const std::vector<std::pair<std::string, std::string>>& fields,
                                   std::size_t instances, std::size_t discovery_order) {
  CandidateRoutine routine;
  routine.discovery_order = discovery_order;
  for (std::size_t i = 0; i < instances; ++i) {
    RoutineInstance instance;
    std::vector<UiEvent> events;
    events.push_back(click("Open"));
    for (const auto& [column, field] : fields) {
      std::string value = field + std::to_string(i);
      events.push_back(copy_cell(column, value));
      events.push_back(paste_field(field, value));
      events.push_back(edit_field(field, value));
    }
    events.push_back(click("Save"));
    std::int64_t ts = 0;
    for (auto& e : events) {
      e.timestamp_ms = ts++;
      instance.event_indices.push_back(instance.events.size());
      instance.events.push_back(std::move(e));
    }
    routine.instances.push_back(std::move(instance));
  }
  UiLog as_log;
  as_log.events = routine.instances.front().events;
  for (const auto& ne : normalize(as_log, ContextSchema::default_schema())) {
    routine.pattern.symbols.push_back(action_key(ne));
  }
  return assess_routine(routine);
}

}  // namespace

TEST_CASE("transformation graph links producing steps to consuming ones") {
  // Country feeds the status lookup: one edge in the running example's shape.
  CandidateRoutine routine;
  for (std::size_t i = 0; i < 4; ++i) {
    static const char* countries[] = {"Germany", "Australia", "Ukraine", "Australia"};
    static const char* statuses[] = {"International", "Domestic", "International", "Domestic"};
    RoutineInstance instance;
    std::vector<UiEvent> events = {
        click("Open"),
        copy_cell("D", countries[i]),
        paste_field("country", countries[i]),
        edit_field("country", countries[i]),
        edit_field("status", statuses[i]),
        click("Save"),
    };
    std::int64_t ts = 0;
    for (auto& e : events) {
      e.timestamp_ms = ts++;
      instance.event_indices.push_back(instance.events.size());
      instance.events.push_back(std::move(e));
    }
    routine.instances.push_back(std::move(instance));
  }
  UiLog as_log;
  as_log.events = routine.instances.front().events;
  for (const auto& ne : normalize(as_log, ContextSchema::default_schema())) {
    routine.pattern.symbols.push_back(action_key(ne));
  }
  RoutineSpecification spec = assess_routine(routine);
  REQUIRE(spec.steps.size() == 2);

  DataTransformationGraph graph = build_graph(spec);
  REQUIRE(graph.vertices.size() == 2);
  REQUIRE(graph.edges.size() == 1);
  // The country step writes the element the status step reads.
  auto [from, to] = graph.edges[0];
  CHECK(from != to);

  SUBCASE("a single step makes a single-vertex graph") {
    RoutineSpecification one = spec;
    one.steps.resize(1);
    DataTransformationGraph g1 = build_graph(one);
    CHECK(g1.vertices.size() == 1);
    CHECK(g1.edges.empty());
  }
  SUBCASE("no steps make an empty graph") {
    RoutineSpecification none = spec;
    none.steps.clear();
    DataTransformationGraph g0 = build_graph(none);
    CHECK(g0.vertices.empty());
    CHECK(g0.edges.empty());
  }
}

TEST_CASE("permuted transfer order with equal steps and clicks is equivalent") {
  RoutineSpecification a =
      transfer_spec({{"A", "first"}, {"C", "phone"}, {"B", "family"}}, 3, 0);
  RoutineSpecification b =
      transfer_spec({{"A", "first"}, {"B", "family"}, {"C", "phone"}}, 3, 1);
  CHECK(equivalent(a, b));
  CHECK(equivalent(a, a));  // reflexive
  CHECK(equivalent(b, a));  // symmetric
}

TEST_CASE("click order differences break equivalence") {
  RoutineSpecification a = transfer_spec({{"A", "first"}}, 3, 0);
  RoutineSpecification b = a;
  // Swap the framing clicks in the pattern and instances.
  for (auto& instance : b.candidate.instances) {
    std::swap(instance.events.front(), instance.events.back());
  }
  std::swap(b.candidate.pattern.symbols.front(), b.candidate.pattern.symbols.back());
  CHECK(!equivalent(a, b));
}

TEST_CASE("different transformation behavior is never merged") {
  // Same actions and clicks, but the edit writes different derived values:
  // the step fingerprints differ, so both routines survive.
  RoutineSpecification a = transfer_spec({{"A", "first"}}, 3, 0);
  RoutineSpecification b = a;
  for (std::size_t i = 0; i < b.candidate.instances.size(); ++i) {
    auto& events = b.candidate.instances[i].events;
    for (auto& e : events) {
      if (is_edit(e.type)) {
        for (auto& [k, v] : e.params) {
          if (k == "value") {
            std::transform(v.begin(), v.end(), v.begin(),
                           [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
          }
        }
      }
    }
  }
  b = assess_routine(b.candidate);
  REQUIRE(b.fully_automatable());
  CHECK(!equivalent(a, b));
  CHECK(aggregate({a, b}).size() == 2);
}

namespace {

// Pure transfer without confirming edits: no transformation steps, so
// equivalence reduces to the action multiset and the click order.
RoutineSpecification editless_spec(const std::vector<std::pair<std::string, std::string>>& fields,
                                   std::size_t instances, std::size_t discovery_order) {
  CandidateRoutine routine;
  routine.discovery_order = discovery_order;
  for (std::size_t i = 0; i < instances; ++i) {
    RoutineInstance instance;
    std::vector<UiEvent> events;
    events.push_back(click("Open"));
    for (const auto& [column, field] : fields) {
      std::string value = field + std::to_string(i);
      events.push_back(copy_cell(column, value));
      events.push_back(paste_field(field, value));
    }
    events.push_back(click("Save"));
    std::int64_t ts = 0;
    for (auto& e : events) {
      e.timestamp_ms = ts++;
      instance.event_indices.push_back(instance.events.size());
      instance.events.push_back(std::move(e));
    }
    routine.instances.push_back(std::move(instance));
  }
  UiLog as_log;
  as_log.events = routine.instances.front().events;
  for (const auto& ne : normalize(as_log, ContextSchema::default_schema())) {
    routine.pattern.symbols.push_back(action_key(ne));
  }
  return assess_routine(routine);
}

}  // namespace

TEST_CASE("aggregation keeps the shortest, then the most frequent") {
  RoutineSpecification small = editless_spec({{"A", "first"}}, 20, 0);
  RoutineSpecification larger =
      editless_spec({{"A", "first"}, {"B", "family"}}, 30, 1);
  // Inequivalent: different lengths mean different action multisets.
  auto kept = aggregate({small, larger});
  CHECK(kept.size() == 2);

  // Equivalent pair with permuted transfers: keep the more frequent one.
  RoutineSpecification permuted =
      editless_spec({{"B", "family"}, {"A", "first"}}, 20, 2);
  RoutineSpecification frequent =
      editless_spec({{"A", "first"}, {"B", "family"}}, 30, 3);
  kept = aggregate({permuted, frequent});
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].candidate.instances.size() == 30);
}

TEST_CASE("duration retention keeps the fastest representative") {
  RoutineSpecification slow = editless_spec({{"A", "first"}, {"B", "family"}}, 30, 0);
  RoutineSpecification fast = editless_spec({{"B", "family"}, {"A", "first"}}, 10, 1);
  // Stretch the slow one's instances to two minutes each.
  for (auto& instance : slow.candidate.instances) {
    instance.events.back().timestamp_ms = instance.events.front().timestamp_ms + 120000;
  }
  REQUIRE(equivalent(slow, fast));
  CHECK(average_duration_ms(slow) > average_duration_ms(fast));

  // Default retention prefers frequency; duration retention the stopwatch.
  auto by_default = aggregate({slow, fast});
  REQUIRE(by_default.size() == 1);
  CHECK(by_default[0].candidate.instances.size() == 30);

  auto by_duration = aggregate({slow, fast}, RetentionCriterion::Duration);
  REQUIRE(by_duration.size() == 1);
  CHECK(by_duration[0].candidate.instances.size() == 10);
}

TEST_CASE("equivalence behaves like an equivalence relation on random specs") {
  std::mt19937 rng(53);
  std::vector<RoutineSpecification> specs;
  std::vector<std::vector<std::pair<std::string, std::string>>> shapes = {
      {{"A", "first"}, {"B", "family"}},
      {{"B", "family"}, {"A", "first"}},
      {{"A", "first"}},
      {{"A", "first"}, {"B", "family"}, {"C", "phone"}},
  };
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    specs.push_back(transfer_spec(shapes[i], 2 + i, i));
  }
  for (const auto& a : specs) {
    CHECK(equivalent(a, a));
    for (const auto& b : specs) {
      CHECK(equivalent(a, b) == equivalent(b, a));
      for (const auto& c : specs) {
        if (equivalent(a, b) && equivalent(b, c)) CHECK(equivalent(a, c));
      }
    }
  }

  auto kept = aggregate(specs);
  CHECK(kept.size() <= specs.size());
  // Every input is represented by exactly one survivor.
  for (const auto& s : specs) {
    std::size_t matches = 0;
    for (const auto& k : kept) {
      if (equivalent(s, k)) ++matches;
    }
    CHECK(matches == 1);
  }
  CHECK(aggregate(kept).size() == kept.size());  // pairwise inequivalent stays put
}
