#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rpmine/element_id.hpp"
#include "rpmine/log_model.hpp"
#include "rpmine/pattern_mining.hpp"
#include "rpmine/transform_synth.hpp"

namespace rpmine {

enum class UiDeterminism { Deterministic, NeedsEditCheck };

/// Navigation, read, click and paste interactions replay mechanically; only
/// edits need a discovered function for the written value.
UiDeterminism classify_ui(UiType type);

/// The function attached to a transformation step, together with the
/// observations it was discovered from.
struct TransformFunction {
  enum class Kind { Synthesized, Dependency };
  Kind kind = Kind::Synthesized;
  ClassedTransform synthesized;  // kind == Synthesized
  FunctionalDependency fd;       // kind == Dependency

  /// The observed (inputs, output) pairs; the function replays all of them.
  std::vector<TransformationExample> examples;

  std::string apply_to(const std::vector<std::string>& inputs) const;
  std::string to_string() const;
};

/// How the value written by one edit of the routine derives from elements
/// read or written earlier.
struct TransformationStep {
  std::size_t ui_position = 0;                 // index of the edit in the pattern
  std::vector<ElementIdentifier> sources;      // row-insensitive, chronological
  ElementIdentifier target;                    // row-insensitive
  TransformFunction function;

  /// Identity used for equivalence checks: sources, target and the observed
  /// behavior, so syntactically different functions with equal behavior on
  /// the observed data coincide.
  std::string canonical_identity() const;
};

struct EditCheckResult {
  bool deterministic = false;
  std::optional<TransformationStep> step;
};

/// Decides whether the edit at `position` writes a derivable value, walking
/// each instance backwards: a paste into the same element pulls in the
/// nearest preceding copy as a source; an earlier edit of the same element
/// supersedes everything before it and stops the walk. Synthesis over the
/// gathered examples is tried first, dependency discovery over the wider
/// observation table second.
EditCheckResult check_edit_ui(std::size_t position, const CandidateRoutine& routine);

struct RoutineSpecification {
  CandidateRoutine candidate;
  std::vector<TransformationStep> steps;
  std::vector<bool> automatable_flags;  // one per pattern position

  bool fully_automatable() const;
};

RoutineSpecification assess_routine(const CandidateRoutine& routine);

}  // namespace rpmine
