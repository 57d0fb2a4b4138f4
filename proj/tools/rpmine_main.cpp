#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rpmine/error.hpp"
#include "rpmine/pipeline.hpp"

namespace {

int run_mine(const std::string& log_path, const std::string& schema_path, double min_support,
             double min_coverage, const std::string& criterion_name, bool emit_dot,
             const std::string& truth_path, const std::string& out_dir) {
  rpmine::ContextSchema schema = schema_path.empty()
                                     ? rpmine::ContextSchema::default_schema()
                                     : rpmine::ContextSchema::load_file(schema_path);
  auto criterion = rpmine::rank_criterion_from_name(criterion_name);
  if (!criterion) {
    std::cerr << "unknown criterion: " << criterion_name << "\n";
    return 1;
  }

  rpmine::UiLog log = rpmine::parse_log_file(log_path);
  rpmine::PipelineOptions options;
  options.min_support = min_support;
  options.min_coverage = min_coverage;
  options.criterion = *criterion;
  options.emit_dot = emit_dot;

  rpmine::PipelineResult result = rpmine::run_pipeline(log, schema, options);
  rpmine::write_outputs(result, out_dir);

  std::cout << "events: " << result.events_input << " (" << result.filtered.events.size()
            << " after filtering)\n";
  std::cout << "segments: " << result.segments.size() << "\n";
  std::cout << "routines: " << result.specifications.size();
  if (result.segments.empty() && result.events_input > 0) {
    std::cout << "  (no repetition found: the behavior graph is loop-free)";
  }
  std::cout << "\n";
  for (std::size_t i = 0; i < result.specifications.size(); ++i) {
    const auto& spec = result.specifications[i];
    std::cout << "  routine " << i + 1 << ": length "
              << spec.candidate.pattern.symbols.size() << ", instances "
              << spec.candidate.instances.size() << ", "
              << (spec.fully_automatable() ? "automatable" : "not fully automatable") << "\n";
    for (const auto& step : spec.steps) {
      std::cout << "    step " << step.ui_position << ": ";
      for (std::size_t s = 0; s < step.sources.size(); ++s) {
        std::cout << (s ? ", " : "") << step.sources[s].to_string();
      }
      std::cout << " -> " << step.target.to_string() << ": " << step.function.to_string()
                << "\n";
    }
  }
  std::cout << "coverage: " << result.coverage << "\n";
  std::cout << "timing: segmentation " << result.timings.segmentation_s << "s, candidates "
            << result.timings.candidates_s << "s, automatability "
            << result.timings.automatability_s << "s, aggregation "
            << result.timings.aggregation_s << "s, total " << result.timings.total_s << "s\n";
  std::cout << "wrote " << result.specifications.size() << " specification file(s) to "
            << out_dir << "\n";

  if (!truth_path.empty()) {
    rpmine::GroundTruth truth = rpmine::read_ground_truth_file(truth_path);
    rpmine::EvaluationReport eval = rpmine::evaluate(out_dir, truth, log, schema);
    std::cout << "evaluation: average JC " << eval.average_jc << ", coverage " << eval.coverage
              << ", precision " << eval.automatability.precision << ", recall "
              << eval.automatability.recall << ", F " << eval.automatability.f_score << "\n";
    std::ofstream out(out_dir + "/evaluation.json", std::ios::binary);
    out << eval.to_json();
  }
  return 0;
}

int run_evaluate(const std::string& spec_dir, const std::string& truth_path,
                 const std::string& log_path, const std::string& schema_path) {
  rpmine::ContextSchema schema = schema_path.empty()
                                     ? rpmine::ContextSchema::default_schema()
                                     : rpmine::ContextSchema::load_file(schema_path);
  rpmine::UiLog log = rpmine::parse_log_file(log_path);
  rpmine::GroundTruth truth = rpmine::read_ground_truth_file(truth_path);
  rpmine::EvaluationReport report = rpmine::evaluate(spec_dir, truth, log, schema);
  std::cout << report.to_json();
  return 0;
}

int run_generate(const std::string& scenario, std::size_t instances, double noise,
                 std::uint64_t seed, const std::string& log_path, const std::string& truth_path) {
  rpmine::RoutineModel model;
  if (scenario == "single-form") {
    model = rpmine::single_form_model(4, noise, seed);
  } else if (scenario == "weighted-variants") {
    model = rpmine::weighted_variants_model(seed);
    model.noise_rate = noise;
  } else if (scenario == "mixed-edits") {
    model = rpmine::mixed_edit_model(seed);
    model.noise_rate = noise;
  } else {
    std::cerr << "unknown scenario: " << scenario
              << " (expected single-form, weighted-variants or mixed-edits)\n";
    return 1;
  }

  rpmine::GeneratedLog generated = rpmine::generate(model, instances);
  {
    std::ofstream out(log_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << log_path << "\n";
      return 1;
    }
    rpmine::serialize_log(generated.log, out);
  }
  if (!truth_path.empty()) {
    std::ofstream out(truth_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << truth_path << "\n";
      return 1;
    }
    rpmine::write_ground_truth(generated.truth, out);
  }
  std::cout << "wrote " << generated.log.events.size() << " events to " << log_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discovers automatable routines in user-interaction logs"};
  app.require_subcommand(1);

  std::string log_path, schema_path, out_dir = "out", truth_path, spec_dir;
  double min_support = 0.1, min_coverage = 0.05, noise = 0.0;
  std::string criterion = "cohesion", scenario = "single-form";
  bool emit_dot = false;
  std::size_t instances = 100;
  std::uint64_t seed = 1;

  CLI::App* mine = app.add_subcommand("mine", "Run the full analysis over a log");
  mine->add_option("--log", log_path, "UI log CSV")->required();
  mine->add_option("--schema", schema_path, "context schema JSON (defaults built in)");
  mine->add_option("--min-support", min_support, "minimum pattern support (0,1]")
      ->default_val(0.1);
  mine->add_option("--min-coverage", min_coverage, "stop once the best pattern covers less")
      ->default_val(0.05);
  mine->add_option("--criterion", criterion, "frequency|length|coverage|cohesion")
      ->default_val("cohesion");
  mine->add_flag("--emit-dot", emit_dot, "also write cfg.dot and dominator_tree.dot");
  mine->add_option("--seed-eval", truth_path, "ground-truth CSV to score the run against");
  mine->add_option("--out", out_dir, "output directory")->default_val("out");

  CLI::App* evaluate = app.add_subcommand("evaluate", "Score written specifications");
  evaluate->add_option("--specs", spec_dir, "directory with routine_*.json")->required();
  evaluate->add_option("--truth", truth_path, "ground-truth CSV")->required();
  evaluate->add_option("--log", log_path, "the log the specifications came from")->required();
  evaluate->add_option("--schema", schema_path, "context schema JSON");

  CLI::App* generate = app.add_subcommand("generate", "Produce a synthetic log with ground truth");
  generate->add_option("--scenario", scenario, "single-form|weighted-variants|mixed-edits")
      ->default_val("single-form");
  generate->add_option("--instances", instances, "number of task executions")->default_val(100);
  generate->add_option("--noise", noise, "stray-event rate between executions")->default_val(0.0);
  generate->add_option("--seed", seed, "generator seed")->default_val(1);
  generate->add_option("--log", log_path, "output CSV path")->required();
  generate->add_option("--truth", truth_path, "output ground-truth CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // bad invocation counts as an input error
  }

  try {
    if (mine->parsed()) {
      return run_mine(log_path, schema_path, min_support, min_coverage, criterion, emit_dot,
                      truth_path, out_dir);
    }
    if (evaluate->parsed()) {
      return run_evaluate(spec_dir, truth_path, log_path, schema_path);
    }
    if (generate->parsed()) {
      return run_generate(scenario, instances, noise, seed, log_path, truth_path);
    }
  } catch (const rpmine::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
