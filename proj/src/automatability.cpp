#include "rpmine/automatability.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>

#include "rpmine/error.hpp"

namespace rpmine {

UiDeterminism classify_ui(UiType type) {
  return is_edit(type) ? UiDeterminism::NeedsEditCheck : UiDeterminism::Deterministic;
}

std::string TransformFunction::apply_to(const std::vector<std::string>& inputs) const {
  if (kind == Kind::Synthesized) return rpmine::apply(synthesized, inputs);
  return rpmine::apply(fd, inputs);
}

std::string TransformFunction::to_string() const {
  if (kind == Kind::Synthesized) {
    std::string out;
    for (const auto& [signature, program] : synthesized.programs) {
      if (!out.empty()) out += " | ";
      if (synthesized.programs.size() > 1) out += "[" + signature + "] ";
      out += program.to_string();
    }
    return out;
  }
  std::string out = "lookup{";
  bool first = true;
  for (const auto& [tuple, value] : fd.mapping) {
    if (!first) out += ", ";
    first = false;
    for (std::size_t i = 0; i < tuple.size(); ++i) {
      if (i) out += "&";
      out += tuple[i];
    }
    out += " -> " + value;
  }
  return out + "}";
}

namespace {

std::string identifier_identity(const ElementIdentifier& id) {
  std::string out = id.kind == ElementIdentifier::Kind::Web ? "web:" : "sheet:";
  out += id.url + "\x1f" + id.id + "\x1f" + id.workbook + "\x1f" + id.worksheet + "\x1f" +
         id.column;
  if (id.row) out += "\x1f" + *id.row;
  return out;
}

// The data value an interaction makes observable, if any.
std::optional<std::string> observable_value(const UiEvent& e) {
  auto get = [&e](std::string_view name) -> std::optional<std::string> {
    auto v = e.param(name);
    if (!v) return std::string();
    return std::string(*v);
  };
  if (is_copy(e.type)) return get("copied");
  if (is_paste(e.type)) return get("pasted");
  if (is_edit(e.type)) return get("value");
  return std::nullopt;
}

}  // namespace

std::string TransformationStep::canonical_identity() const {
  std::vector<std::string> source_ids;
  source_ids.reserve(sources.size());
  for (const auto& s : sources) source_ids.push_back(identifier_identity(s));
  std::sort(source_ids.begin(), source_ids.end());

  std::string out;
  for (const auto& s : source_ids) out += s + "\x1e";
  out += "=>" + identifier_identity(target) + "\x1e";

  // Behavioral fingerprint: the observed example relation, canonically ordered.
  std::vector<std::string> lines;
  lines.reserve(function.examples.size());
  for (const auto& ex : function.examples) {
    std::string line;
    for (const auto& in : ex.inputs) line += in + "\x1f";
    line += "->" + ex.output;
    lines.push_back(std::move(line));
  }
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
  for (const auto& line : lines) out += line + "\x1e";
  return out;
}

namespace {

struct SourceContribution {
  std::size_t position;  // index within the instance
  ElementIdentifier element;
  std::string value;
};

// Backward walk of one instance from the edit at `position`.
struct InstanceObservation {
  std::vector<SourceContribution> sources;  // chronological
  std::string output;
  ElementIdentifier target;             // concrete, row kept
  std::size_t halt_position = 0;        // where a same-target edit stopped the walk
  bool halted = false;
};

InstanceObservation observe_instance(const RoutineInstance& instance, std::size_t position) {
  const UiEvent& edit = instance.events[position];
  InstanceObservation obs;
  auto target = target_element(edit);
  assert(target);
  obs.target = *target;
  auto out = edit.param("value");
  obs.output = out ? std::string(*out) : std::string();

  std::vector<SourceContribution> reversed;
  for (std::size_t i = position; i-- > 0;) {
    const UiEvent& event = instance.events[i];
    if (is_paste(event.type)) {
      auto paste_target = target_element(event);
      if (paste_target && *paste_target == obs.target) {
        // The pasted data came from the nearest preceding copy.
        for (std::size_t j = i; j-- > 0;) {
          const UiEvent& copy = instance.events[j];
          if (is_copy(copy.type)) {
            auto source = target_element(copy);
            auto copied = copy.param("copied");
            if (source) {
              reversed.push_back({j, *source, copied ? std::string(*copied) : std::string()});
            }
            break;
          }
        }
      }
    } else if (is_edit(event.type)) {
      auto edit_target = target_element(event);
      if (edit_target && *edit_target == obs.target) {
        // Everything before this edit was overwritten by it.
        auto value = event.param("value");
        reversed.push_back({i, *edit_target, value ? std::string(*value) : std::string()});
        obs.halted = true;
        obs.halt_position = i;
        break;
      }
    }
  }
  obs.sources.assign(reversed.rbegin(), reversed.rend());
  return obs;
}

// Table of everything observable before the edit, one row per instance.
DependencyTable build_dependency_table(const CandidateRoutine& routine, std::size_t position,
                                       const std::vector<InstanceObservation>& observations,
                                       std::vector<std::size_t>& column_positions) {
  std::size_t first_position = 0;
  for (const auto& obs : observations) {
    if (obs.halted) first_position = std::max(first_position, obs.halt_position);
  }

  DependencyTable table;
  for (std::size_t p = first_position; p < position; ++p) {
    if (!observable_value(routine.instances.front().events[p])) continue;
    column_positions.push_back(p);
    table.column_names.push_back(
        std::string(ui_type_info(routine.instances.front().events[p].type).canonical) + "@" +
        std::to_string(p));
  }
  table.column_names.push_back("target");

  for (std::size_t r = 0; r < routine.instances.size(); ++r) {
    std::vector<std::string> row;
    row.reserve(column_positions.size() + 1);
    for (std::size_t p : column_positions) {
      auto v = observable_value(routine.instances[r].events[p]);
      row.push_back(v.value_or(std::string()));
    }
    row.push_back(observations[r].output);
    table.rows.push_back(std::move(row));
  }
  return table;
}

bool agree_on_sources(const std::vector<InstanceObservation>& observations) {
  const auto& first = observations.front().sources;
  for (const auto& obs : observations) {
    if (obs.sources.size() != first.size()) return false;
    for (std::size_t i = 0; i < first.size(); ++i) {
      if (obs.sources[i].position != first[i].position ||
          !(obs.sources[i].element.location() == first[i].element.location())) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

EditCheckResult check_edit_ui(std::size_t position, const CandidateRoutine& routine) {
  const std::size_t length = routine.pattern.symbols.size();
  for (const auto& instance : routine.instances) {
    if (instance.events.size() != length) {
      throw Error(ErrorCode::MisalignedInstances,
                  "instance has " + std::to_string(instance.events.size()) +
                      " events, pattern has " + std::to_string(length));
    }
  }
  assert(position < length);
  assert(is_edit(routine.instances.front().events[position].type));

  std::vector<InstanceObservation> observations;
  observations.reserve(routine.instances.size());
  for (const auto& instance : routine.instances) {
    observations.push_back(observe_instance(instance, position));
  }

  // Synthesis applies when every instance pulled data from the same elements.
  if (!observations.front().sources.empty() && agree_on_sources(observations)) {
    std::vector<TransformationExample> examples;
    examples.reserve(observations.size());
    for (const auto& obs : observations) {
      TransformationExample ex;
      for (const auto& src : obs.sources) ex.inputs.push_back(src.value);
      ex.output = obs.output;
      examples.push_back(std::move(ex));
    }
    if (auto synthesized = synthesize_all(examples)) {
      TransformationStep step;
      step.ui_position = position;
      for (const auto& src : observations.front().sources) {
        step.sources.push_back(src.element.location());
      }
      step.target = observations.front().target.location();
      step.function.kind = TransformFunction::Kind::Synthesized;
      step.function.synthesized = std::move(*synthesized);
      step.function.examples = std::move(examples);
      return {true, std::move(step)};
    }
  }

  // Fall back to a value dependency across the observation table.
  std::vector<std::size_t> column_positions;
  DependencyTable table = build_dependency_table(routine, position, observations, column_positions);
  auto dependencies = discover_fd(table);

  // A dependency is only trusted when its determinant took at least two
  // distinct values; a constant predicts nothing.
  std::erase_if(dependencies, [&table](const FunctionalDependency& fd) {
    std::set<std::vector<std::string>> tuples;
    for (const auto& row : table.rows) {
      std::vector<std::string> tuple;
      for (std::size_t c : fd.determinant) tuple.push_back(row[c]);
      tuples.insert(std::move(tuple));
    }
    return tuples.size() < 2;
  });

  if (!dependencies.empty()) {
    // Prefer small determinants made of columns closest to the edit.
    auto better = [&column_positions](const FunctionalDependency& a,
                                      const FunctionalDependency& b) {
      if (a.determinant.size() != b.determinant.size()) {
        return a.determinant.size() < b.determinant.size();
      }
      auto positions = [&column_positions](const FunctionalDependency& fd) {
        std::vector<std::size_t> ps;
        for (std::size_t c : fd.determinant) ps.push_back(column_positions[c]);
        std::sort(ps.rbegin(), ps.rend());
        return ps;
      };
      return positions(a) > positions(b);
    };
    const FunctionalDependency* chosen = &dependencies.front();
    for (const auto& fd : dependencies) {
      if (better(fd, *chosen)) chosen = &fd;
    }

    TransformationStep step;
    step.ui_position = position;
    for (std::size_t c : chosen->determinant) {
      std::size_t p = column_positions[c];
      auto element = target_element(routine.instances.front().events[p]);
      assert(element);
      step.sources.push_back(element->location());
    }
    step.target = observations.front().target.location();
    step.function.kind = TransformFunction::Kind::Dependency;
    step.function.fd = *chosen;
    for (const auto& row : table.rows) {
      TransformationExample ex;
      for (std::size_t c : chosen->determinant) ex.inputs.push_back(row[c]);
      ex.output = row.back();
      step.function.examples.push_back(std::move(ex));
    }
    return {true, std::move(step)};
  }

  return {false, std::nullopt};
}

bool RoutineSpecification::fully_automatable() const {
  return std::all_of(automatable_flags.begin(), automatable_flags.end(),
                     [](bool f) { return f; });
}

RoutineSpecification assess_routine(const CandidateRoutine& routine) {
  if (routine.instances.empty()) {
    throw Error(ErrorCode::MisalignedInstances, "routine has no instances");
  }
  RoutineSpecification spec;
  spec.candidate = routine;
  const std::size_t length = routine.pattern.symbols.size();
  spec.automatable_flags.assign(length, false);

  for (std::size_t position = 0; position < length; ++position) {
    UiType type = routine.instances.front().events[position].type;
    if (classify_ui(type) == UiDeterminism::Deterministic) {
      spec.automatable_flags[position] = true;
      continue;
    }
    EditCheckResult result = check_edit_ui(position, routine);
    spec.automatable_flags[position] = result.deterministic;
    if (result.step) spec.steps.push_back(std::move(*result.step));
  }
  return spec;
}

}  // namespace rpmine
