#include "rpmine/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "json.hpp"
#include "rpmine/error.hpp"

namespace rpmine {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Re-throws module failures labeled with the pipeline stage they hit.
template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(name) + " stage: " + e.what());
  }
}

}  // namespace

PipelineResult run_pipeline(const UiLog& log, const ContextSchema& schema,
                            const PipelineOptions& options) {
  PipelineResult result;
  result.events_input = log.events.size();
  const auto t_total = Clock::now();

  result.filtered_to_original = run_filter_fixpoint_indices(
      log, {FilterRule::RemoveSelections, FilterRule::RemoveDanglingCopies});
  result.filtered.events.reserve(result.filtered_to_original.size());
  for (std::size_t idx : result.filtered_to_original) {
    result.filtered.events.push_back(log.events[idx]);
  }
  result.norm = normalize(result.filtered, schema);

  if (result.norm.empty()) {
    result.timings.total_s = seconds_since(t_total);
    return result;
  }

  const auto t_segmentation = Clock::now();
  stage("segmentation", [&] {
    ControlFlowGraph cfg = build_cfg(result.norm);
    if (options.emit_dot) {
      result.cfg_dot = cfg_to_dot(cfg);
      result.domtree_dot = dominator_tree_to_dot(cfg, compute_dominator_tree(cfg));
    }
    result.back_edges = detect_back_edges(cfg);
    result.segments = segment_log(result.norm, result.back_edges);
  });
  result.timings.segmentation_s = seconds_since(t_segmentation);

  // The overwritten-edits rule needs segment boundaries, so it runs here
  // rather than with the other two filters.
  std::vector<std::vector<std::size_t>> segment_indices;
  segment_indices.reserve(result.segments.size());
  for (const Segment& segment : result.segments) {
    std::vector<std::size_t> indices;
    for (std::size_t i = segment.first; i <= segment.last; ++i) indices.push_back(i);
    while (true) {
      std::vector<UiEvent> events;
      events.reserve(indices.size());
      for (std::size_t i : indices) events.push_back(result.filtered.events[i]);
      std::vector<bool> keep = overwritten_edits_keep_mask(events);
      std::vector<std::size_t> next;
      next.reserve(indices.size());
      for (std::size_t i = 0; i < indices.size(); ++i) {
        if (keep[i]) next.push_back(indices[i]);
      }
      bool stable = next.size() == indices.size();
      indices = std::move(next);
      if (stable) break;
    }
    segment_indices.push_back(std::move(indices));
  }

  const auto t_candidates = Clock::now();
  stage("candidates identification", [&] {
    result.candidates = extract_candidates(result.filtered, result.norm, segment_indices,
                                           options.min_support, options.min_coverage,
                                           options.criterion);
  });
  result.timings.candidates_s = seconds_since(t_candidates);

  const auto t_assess = Clock::now();
  std::vector<RoutineSpecification> assessed;
  stage("automatability assessment", [&] {
    assessed.reserve(result.candidates.size());
    for (const CandidateRoutine& candidate : result.candidates) {
      assessed.push_back(assess_routine(candidate));
    }
  });
  result.timings.automatability_s = seconds_since(t_assess);

  const auto t_aggregate = Clock::now();
  stage("aggregation", [&] { result.specifications = aggregate(assessed); });
  result.timings.aggregation_s = seconds_since(t_aggregate);

  result.coverage = total_coverage(result.candidates, result.filtered.events.size());
  result.timings.total_s = seconds_since(t_total);
  return result;
}

// --- Serialization ---------------------------------------------------------------

namespace {

nlohmann::ordered_json element_to_json(const ElementIdentifier& id) {
  nlohmann::ordered_json j;
  if (id.kind == ElementIdentifier::Kind::Web) {
    j["kind"] = "web";
    j["url"] = id.url;
    j["id"] = id.id;
  } else {
    j["kind"] = "sheet";
    j["workbook"] = id.workbook;
    j["worksheet"] = id.worksheet;
    j["column"] = id.column;
    if (id.row) j["row"] = *id.row;
  }
  if (!id.label.empty()) j["label"] = id.label;
  return j;
}

nlohmann::ordered_json function_to_json(const TransformFunction& fn) {
  nlohmann::ordered_json j;
  if (fn.kind == TransformFunction::Kind::Synthesized) {
    j["kind"] = "program";
    nlohmann::ordered_json classes = nlohmann::ordered_json::array();
    for (const auto& [signature, program] : fn.synthesized.programs) {
      nlohmann::ordered_json c;
      c["inputs"] = signature;
      c["program"] = program.to_string();
      nlohmann::ordered_json ops = nlohmann::ordered_json::array();
      for (const auto& op : program.ops) ops.push_back(op.to_string());
      c["ops"] = ops;
      classes.push_back(std::move(c));
    }
    j["classes"] = std::move(classes);
  } else {
    j["kind"] = "dependency";
    nlohmann::ordered_json mapping = nlohmann::ordered_json::array();
    for (const auto& [tuple, value] : fn.fd.mapping) {
      nlohmann::ordered_json entry;
      entry["inputs"] = tuple;
      entry["output"] = value;
      mapping.push_back(std::move(entry));
    }
    j["mapping"] = std::move(mapping);
  }
  j["text"] = fn.to_string();
  return j;
}

}  // namespace

std::string specification_to_json(const RoutineSpecification& spec,
                                  const std::vector<std::size_t>& to_original) {
  nlohmann::ordered_json j;
  j["format_version"] = 1;

  nlohmann::ordered_json pattern = nlohmann::ordered_json::array();
  const auto& instances = spec.candidate.instances;
  for (std::size_t p = 0; p < spec.candidate.pattern.symbols.size(); ++p) {
    nlohmann::ordered_json action;
    action["key"] = spec.candidate.pattern.symbols[p].str();
    if (!instances.empty()) {
      action["type"] = std::string(ui_type_info(instances.front().events[p].type).canonical);
    }
    pattern.push_back(std::move(action));
  }
  j["pattern"] = std::move(pattern);
  j["instances"] = instances.size();

  nlohmann::ordered_json indices = nlohmann::ordered_json::array();
  for (const auto& instance : instances) {
    nlohmann::ordered_json one = nlohmann::ordered_json::array();
    for (std::size_t idx : instance.event_indices) one.push_back(to_original[idx]);
    indices.push_back(std::move(one));
  }
  j["instance_event_indices"] = std::move(indices);

  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  for (const auto& step : spec.steps) {
    nlohmann::ordered_json s;
    s["ui_position"] = step.ui_position;
    nlohmann::ordered_json sources = nlohmann::ordered_json::array();
    for (const auto& src : step.sources) sources.push_back(element_to_json(src));
    s["sources"] = std::move(sources);
    s["target"] = element_to_json(step.target);
    s["function"] = function_to_json(step.function);
    steps.push_back(std::move(s));
  }
  j["steps"] = std::move(steps);
  j["per_ui_flags"] = spec.automatable_flags;
  j["automatable"] = spec.fully_automatable();
  return j.dump(2) + "\n";
}

void write_outputs(const PipelineResult& result, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create output directory: " + out_dir);

  for (std::size_t i = 0; i < result.specifications.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "routine_%03zu.json", i + 1);
    std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, std::string("cannot write ") + name);
    out << specification_to_json(result.specifications[i], result.filtered_to_original);
  }

  nlohmann::ordered_json report;
  report["format_version"] = 1;
  report["events_input"] = result.events_input;
  report["events_after_filtering"] = result.filtered.events.size();
  report["segments"] = result.segments.size();
  report["candidates"] = result.candidates.size();
  report["routines"] = result.specifications.size();
  {
    std::size_t max_len = 0;
    double avg_len = 0.0;
    for (const auto& spec : result.specifications) {
      max_len = std::max(max_len, spec.candidate.pattern.symbols.size());
      avg_len += static_cast<double>(spec.candidate.pattern.symbols.size());
    }
    if (!result.specifications.empty()) {
      avg_len /= static_cast<double>(result.specifications.size());
    }
    report["length_max"] = max_len;
    report["length_avg"] = avg_len;
  }
  report["total_coverage"] = result.coverage;
  nlohmann::ordered_json timing;
  timing["segmentation_s"] = result.timings.segmentation_s;
  timing["candidates_identification_s"] = result.timings.candidates_s;
  timing["automatability_assessment_s"] = result.timings.automatability_s;
  timing["aggregation_s"] = result.timings.aggregation_s;
  timing["total_s"] = result.timings.total_s;
  report["timing"] = std::move(timing);

  std::ofstream out(fs::path(out_dir) / "report.json", std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write report.json");
  out << report.dump(2) << "\n";

  if (!result.cfg_dot.empty()) {
    std::ofstream dot(fs::path(out_dir) / "cfg.dot", std::ios::binary);
    dot << result.cfg_dot;
  }
  if (!result.domtree_dot.empty()) {
    std::ofstream dot(fs::path(out_dir) / "dominator_tree.dot", std::ios::binary);
    dot << result.domtree_dot;
  }
}

// --- Evaluation --------------------------------------------------------------------

std::string EvaluationReport::to_json() const {
  nlohmann::ordered_json j;
  j["routines"] = routines;
  j["per_routine_jc"] = per_routine_jc;
  j["average_jc"] = average_jc;
  j["total_coverage"] = coverage;
  nlohmann::ordered_json a;
  a["precision"] = automatability.precision;
  a["recall"] = automatability.recall;
  a["f_score"] = automatability.f_score;
  j["automatability"] = std::move(a);
  return j.dump(2) + "\n";
}

EvaluationReport evaluate(const std::string& spec_dir, const GroundTruth& truth,
                          const UiLog& log, const ContextSchema& schema) {
  namespace fs = std::filesystem;
  EvaluationReport report;

  std::vector<nlohmann::json> specs;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(spec_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("routine_", 0) == 0 && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
    specs.push_back(nlohmann::json::parse(in));
  }
  report.routines = specs.size();

  // Action identities of the ground-truth routines.
  std::vector<NormalizedEvent> norm = normalize(log, schema);
  std::map<int, std::set<ActionKey>> truth_sets;
  std::vector<int> truth_automatable(log.events.size(), -1);
  for (const auto& row : truth.rows) {
    if (row.event_index < log.events.size()) {
      truth_automatable[row.event_index] = row.automatable ? 1 : 0;
      if (row.variant_id >= 0) {
        truth_sets[row.variant_id].insert(action_key(norm[row.event_index]));
      }
    }
  }
  std::vector<std::set<ActionKey>> truths;
  for (auto& [vid, keys] : truth_sets) {
    (void)vid;
    truths.push_back(std::move(keys));
  }

  std::vector<std::set<ActionKey>> discovered;
  std::set<std::size_t> claimed;
  std::vector<PrfScores> per_routine_scores;
  for (const auto& spec : specs) {
    std::set<ActionKey> keys;
    for (const auto& action : spec.at("pattern")) {
      keys.insert(ActionKey(action.at("key").get<std::string>()));
    }
    discovered.push_back(std::move(keys));

    std::vector<bool> predicted = spec.at("per_ui_flags").get<std::vector<bool>>();
    const auto& instances = spec.at("instance_event_indices");
    std::vector<bool> truth_flags(predicted.size(), false);
    if (!instances.empty()) {
      const auto& first = instances.front();
      for (std::size_t p = 0; p < predicted.size() && p < first.size(); ++p) {
        std::size_t original = first[p].get<std::size_t>();
        truth_flags[p] = original < truth_automatable.size() && truth_automatable[original] == 1;
      }
    }
    for (const auto& instance : instances) {
      for (const auto& idx : instance) claimed.insert(idx.get<std::size_t>());
    }
    per_routine_scores.push_back(automatability_scores(predicted, truth_flags));
  }

  if (!discovered.empty() && !truths.empty()) {
    RoutineQuality q = routine_quality(discovered, truths);
    report.per_routine_jc = q.per_routine;
    report.average_jc = q.average;
  }

  std::vector<std::size_t> surviving = run_filter_fixpoint_indices(
      log, {FilterRule::RemoveSelections, FilterRule::RemoveDanglingCopies});
  std::size_t covered = 0;
  std::set<std::size_t> surviving_set(surviving.begin(), surviving.end());
  for (std::size_t idx : claimed) {
    if (surviving_set.count(idx)) ++covered;
  }
  report.coverage = surviving.empty()
                        ? 0.0
                        : static_cast<double>(covered) / static_cast<double>(surviving.size());

  if (!per_routine_scores.empty()) {
    for (const auto& s : per_routine_scores) {
      report.automatability.precision += s.precision;
      report.automatability.recall += s.recall;
      report.automatability.f_score += s.f_score;
    }
    const auto n = static_cast<double>(per_routine_scores.size());
    report.automatability.precision /= n;
    report.automatability.recall /= n;
    report.automatability.f_score /= n;
  }
  return report;
}

}  // namespace rpmine
