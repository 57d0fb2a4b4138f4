#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rpmine/log_model.hpp"

namespace rpmine {

/// A sequence of actions occurring in that order, gaps allowed, in at least
/// a support fraction of the segments, with no super-sequence of identical
/// support.
struct SequentialPattern {
  std::vector<ActionKey> symbols;
  double support = 0.0;
  std::size_t support_count = 0;
  /// Leftmost embedding per containing segment: (segment index, positions).
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> occurrences;
};

enum class RankCriterion { Frequency, Length, Coverage, Cohesion };

std::optional<RankCriterion> rank_criterion_from_name(std::string_view name);
std::string_view rank_criterion_name(RankCriterion c);

struct PatternScore {
  std::size_t frequency = 0;  // segments containing the pattern
  std::size_t length = 0;
  double coverage = 0.0;      // events covered by all occurrences / working events
  double cohesion = 0.0;      // length minus the median gap count per occurrence
};

PatternScore score_pattern(const SequentialPattern& p, std::size_t working_event_count);

/// Sorts best-first by the chosen criterion; ties fall back to longer, then
/// more frequent, then lexicographically smaller patterns.
void rank_patterns(std::vector<SequentialPattern>& patterns, RankCriterion criterion,
                   std::size_t working_event_count);

std::vector<SequentialPattern> mine_closed_patterns(
    const std::vector<std::vector<ActionKey>>& segments, double min_support);

/// Greedy leftmost embedding of `pattern` into `segment`; NoMatch if absent.
std::vector<std::size_t> match_occurrences(const std::vector<ActionKey>& pattern,
                                           const std::vector<ActionKey>& segment);

std::optional<std::vector<std::size_t>> try_match(const std::vector<ActionKey>& pattern,
                                                  const std::vector<ActionKey>& segment);

struct RoutineInstance {
  std::vector<UiEvent> events;             // one full event per pattern symbol
  std::vector<std::size_t> event_indices;  // positions in the filtered log
};

struct CandidateRoutine {
  SequentialPattern pattern;
  std::vector<RoutineInstance> instances;
  std::size_t discovery_order = 0;
};

/// Iteratively mines the working segments, materializes the best pattern's
/// instances (one per segment per pass), removes the matched events and
/// repeats until no pattern reaches min_support or the best one covers less
/// than min_coverage of the remaining events.
std::vector<CandidateRoutine> extract_candidates(
    const UiLog& filtered, const std::vector<NormalizedEvent>& norm,
    const std::vector<std::vector<std::size_t>>& segment_event_indices, double min_support,
    double min_coverage, RankCriterion criterion);

}  // namespace rpmine
