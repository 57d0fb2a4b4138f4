#pragma once

#include <set>
#include <vector>

#include "rpmine/log_model.hpp"
#include "rpmine/pattern_mining.hpp"

namespace rpmine {

/// |A ∩ B| / |A ∪ B|; comparing two empty routines is meaningless.
double jaccard(const std::set<ActionKey>& a, const std::set<ActionKey>& b);

struct RoutineQuality {
  std::vector<double> per_routine;  // best match against any ground-truth routine
  double average = 0.0;
  bool empty_discovery = false;
};

RoutineQuality routine_quality(const std::vector<std::set<ActionKey>>& discovered,
                               const std::vector<std::set<ActionKey>>& truths);

/// Fraction of the filtered log claimed by routine instances.
double total_coverage(const std::vector<CandidateRoutine>& candidates,
                      std::size_t filtered_event_count);

struct PrfScores {
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  bool degenerate = false;  // some denominator was zero
};

PrfScores automatability_scores(const std::vector<bool>& predicted,
                                const std::vector<bool>& truth);

}  // namespace rpmine
