#include "rpmine/metrics.hpp"

#include <algorithm>

#include "rpmine/error.hpp"

namespace rpmine {

double jaccard(const std::set<ActionKey>& a, const std::set<ActionKey>& b) {
  if (a.empty() && b.empty()) {
    throw Error(ErrorCode::BothEmpty, "jaccard of two empty action sets");
  }
  std::size_t shared = 0;
  for (const auto& key : a) {
    if (b.count(key)) ++shared;
  }
  std::size_t total = a.size() + b.size() - shared;
  return static_cast<double>(shared) / static_cast<double>(total);
}

RoutineQuality routine_quality(const std::vector<std::set<ActionKey>>& discovered,
                               const std::vector<std::set<ActionKey>>& truths) {
  RoutineQuality q;
  if (discovered.empty()) {
    q.empty_discovery = true;
    q.average = 0.0;
    return q;
  }
  for (const auto& d : discovered) {
    double best = 0.0;
    for (const auto& t : truths) {
      best = std::max(best, jaccard(d, t));
    }
    q.per_routine.push_back(best);
  }
  double sum = 0.0;
  for (double v : q.per_routine) sum += v;
  q.average = sum / static_cast<double>(q.per_routine.size());
  return q;
}

double total_coverage(const std::vector<CandidateRoutine>& candidates,
                      std::size_t filtered_event_count) {
  if (filtered_event_count == 0) return 0.0;
  std::set<std::size_t> covered;
  for (const auto& c : candidates) {
    for (const auto& instance : c.instances) {
      covered.insert(instance.event_indices.begin(), instance.event_indices.end());
    }
  }
  return static_cast<double>(covered.size()) / static_cast<double>(filtered_event_count);
}

PrfScores automatability_scores(const std::vector<bool>& predicted,
                                const std::vector<bool>& truth) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "predicted " + std::to_string(predicted.size()) + " labels, truth has " +
                    std::to_string(truth.size()));
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] && truth[i]) ++tp;
    else if (predicted[i] && !truth[i]) ++fp;
    else if (!predicted[i] && truth[i]) ++fn;
  }
  PrfScores s;
  if (tp + fp == 0) {
    s.degenerate = true;
    s.precision = 0.0;
  } else {
    s.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  if (tp + fn == 0) {
    s.degenerate = true;
    s.recall = 0.0;
  } else {
    s.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
  if (s.precision + s.recall == 0.0) {
    s.f_score = 0.0;
  } else {
    s.f_score = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return s;
}

}  // namespace rpmine
