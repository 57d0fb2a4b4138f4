#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rpmine/automatability.hpp"

namespace rpmine {

/// Dependency graph over the transformation steps of one specification:
/// an edge says the target written by one step feeds another step's input.
/// The edge set is fully determined by the vertex set.
struct DataTransformationGraph {
  std::vector<std::string> vertices;                    // canonical step ids, sorted
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // index pairs, sorted
};

DataTransformationGraph build_graph(const RoutineSpecification& spec);

/// Two specifications run the same routine iff their transformation graphs
/// coincide, their candidates use the same actions (as a multiset) and their
/// button clicks happen in the same order.
bool equivalent(const RoutineSpecification& a, const RoutineSpecification& b);

/// How the surviving representative of an equivalence class is chosen.
enum class RetentionCriterion {
  LengthThenFrequency,  // fewest steps, then most instances
  Duration,             // fastest average execution
};

/// Collapses equivalent specifications. By default keeps per class the
/// shortest one, the most frequent among equally short, and the first
/// discovered among remaining ties; Duration prefers the routine whose
/// instances completed fastest instead.
std::vector<RoutineSpecification> aggregate(
    const std::vector<RoutineSpecification>& specs,
    RetentionCriterion retention = RetentionCriterion::LengthThenFrequency);

/// Mean instance wall time, the Duration retention key.
double average_duration_ms(const RoutineSpecification& spec);

}  // namespace rpmine
