#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rpmine/aggregation.hpp"
#include "rpmine/automatability.hpp"
#include "rpmine/log_model.hpp"
#include "rpmine/metrics.hpp"
#include "rpmine/pattern_mining.hpp"
#include "rpmine/preprocess.hpp"
#include "rpmine/segmentation.hpp"
#include "rpmine/simgen.hpp"

namespace rpmine {

struct PipelineOptions {
  double min_support = 0.1;
  double min_coverage = 0.05;
  RankCriterion criterion = RankCriterion::Cohesion;
  bool emit_dot = false;
};

struct StageTimings {
  double segmentation_s = 0.0;
  double candidates_s = 0.0;
  double automatability_s = 0.0;
  double aggregation_s = 0.0;
  double total_s = 0.0;
};

struct PipelineResult {
  std::size_t events_input = 0;
  UiLog filtered;                      // after the pre-segmentation rules
  std::vector<std::size_t> filtered_to_original;
  std::vector<NormalizedEvent> norm;   // aligned 1:1 with `filtered`
  std::vector<BackEdge> back_edges;
  std::vector<Segment> segments;
  std::vector<CandidateRoutine> candidates;
  std::vector<RoutineSpecification> specifications;  // aggregated
  double coverage = 0.0;
  StageTimings timings;
  std::string cfg_dot;        // with PipelineOptions::emit_dot
  std::string domtree_dot;
};

PipelineResult run_pipeline(const UiLog& log, const ContextSchema& schema,
                            const PipelineOptions& options);

/// Writes routine_###.json files plus report.json into `out_dir`; the
/// specification files are byte-stable across runs.
void write_outputs(const PipelineResult& result, const std::string& out_dir);

/// `to_original` maps filtered-log positions back to input rows, so the
/// emitted instance indices line up with ground-truth side-cars.
std::string specification_to_json(const RoutineSpecification& spec,
                                  const std::vector<std::size_t>& to_original);

struct EvaluationReport {
  std::vector<double> per_routine_jc;
  double average_jc = 0.0;
  double coverage = 0.0;
  PrfScores automatability;
  std::size_t routines = 0;

  std::string to_json() const;
};

/// Scores previously written specifications against a ground-truth side-car.
/// The log is required to rebuild action identities; `spec_dir` must contain
/// the report.json of the producing run.
EvaluationReport evaluate(const std::string& spec_dir, const GroundTruth& truth,
                          const UiLog& log, const ContextSchema& schema);

}  // namespace rpmine
