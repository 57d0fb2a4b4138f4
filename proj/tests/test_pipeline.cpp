#include "rpmine/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"

using namespace rpmine;

namespace {

UiLog fixture() {
  return parse_log_file(std::string(RPMINE_TEST_DATA_DIR) + "/student_records_fragment.csv");
}

PipelineOptions length_options() {
  PipelineOptions o;
  o.criterion = RankCriterion::Length;
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("fixture runs end to end") {
  ContextSchema schema = ContextSchema::default_schema();
  PipelineResult result = run_pipeline(fixture(), schema, length_options());

  CHECK(result.events_input == 49);
  CHECK(result.filtered.events.size() == 31);
  REQUIRE(result.segments.size() == 2);

  // Candidate identification: both record entries, 15 normalized actions each
  // (after the duplicated status edit inside the first segment is dropped).
  REQUIRE(result.candidates.size() == 2);
  CHECK(result.candidates[0].pattern.symbols.size() == 15);
  CHECK(result.candidates[1].pattern.symbols.size() == 15);
  CHECK(result.coverage == doctest::Approx(30.0 / 31.0));

  // The two segments order their transfers differently: no merge.
  CHECK(result.specifications.size() == 2);

  // Preprocessed multiset: classify the normalized actions by key.
  std::map<std::string, int> histogram;
  for (const auto& c : result.candidates) {
    for (const auto& inst : c.instances) {
      UiLog one;
      one.events = inst.events;
      for (const auto& ne : normalize(one, schema)) {
        histogram[action_key(ne).str()] += 1;
      }
    }
  }
  std::map<std::string, int> expected = {
      {"clickButton[https://unimelb.edu.au|New Record|newRecord|button]", 2},
      {"clickButton[https://unimelb.edu.au|Submit|submit|submit]", 2},
      {"copyCell[StudentRecords|Sheet1|A]", 2},
      {"copyCell[StudentRecords|Sheet1|B]", 2},
      {"copyCell[StudentRecords|Sheet1|C]", 2},
      {"copyCell[StudentRecords|Sheet1|D]", 2},
      {"paste[https://unimelb.edu.au|Full Name|name]", 2},
      {"paste[https://unimelb.edu.au|Date|date]", 2},
      {"paste[https://unimelb.edu.au|Phone|phone]", 2},
      {"paste[https://unimelb.edu.au|Country of residence|country]", 2},
      {"editField[https://unimelb.edu.au|Full Name|name|text]", 2},
      {"editField[https://unimelb.edu.au|Date|date|text]", 2},
      {"editField[https://unimelb.edu.au|Phone|phone|text]", 2},
      {"editField[https://unimelb.edu.au|Country of residence|country|text]", 2},
      {"editField[https://unimelb.edu.au|Student status|status|select]", 2},
  };
  CHECK(histogram == expected);
}

TEST_CASE("empty log is a graceful no-op") {
  PipelineResult result = run_pipeline(UiLog{}, ContextSchema::default_schema(), {});
  CHECK(result.segments.empty());
  CHECK(result.candidates.empty());
  CHECK(result.specifications.empty());
  CHECK(result.coverage == doctest::Approx(0.0));
}

TEST_CASE("a loop-free log yields no segments and no routines") {
  std::istringstream in(
      "timestamp,type,p1,p2,p3,p4,p5,p6\n"
      "2020-01-01T10:00:00,Navigate To (Web),https://a.test,--,--,--,--,--\n"
      "2020-01-01T10:00:01,Navigate To (Web),https://b.test,--,--,--,--,--\n"
      "2020-01-01T10:00:02,Navigate To (Web),https://c.test,--,--,--,--,--\n");
  PipelineResult result = run_pipeline(parse_log(in), ContextSchema::default_schema(), {});
  CHECK(result.back_edges.empty());
  CHECK(result.segments.empty());
  CHECK(result.specifications.empty());
}

TEST_CASE("outputs are byte-identical across runs") {
  namespace fs = std::filesystem;
  ContextSchema schema = ContextSchema::default_schema();
  fs::path dir_a = fs::temp_directory_path() / "rpmine_out_a";
  fs::path dir_b = fs::temp_directory_path() / "rpmine_out_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);

  write_outputs(run_pipeline(fixture(), schema, length_options()), dir_a.string());
  write_outputs(run_pipeline(fixture(), schema, length_options()), dir_b.string());

  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir_a)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("routine_", 0) != 0) continue;
    ++files;
    CHECK(slurp(entry.path()) == slurp(dir_b / name));
  }
  CHECK(files == 2);
  CHECK(fs::exists(dir_a / "report.json"));
}

TEST_CASE("dot export is flag-gated") {
  PipelineOptions with_dot = length_options();
  with_dot.emit_dot = true;
  PipelineResult result = run_pipeline(fixture(), ContextSchema::default_schema(), with_dot);
  CHECK(result.cfg_dot.find("digraph cfg") == 0);
  CHECK(result.domtree_dot.find("digraph dominators") == 0);

  PipelineResult plain = run_pipeline(fixture(), ContextSchema::default_schema(), length_options());
  CHECK(plain.cfg_dot.empty());
}

TEST_CASE("evaluation of a run without routines reports zero coverage") {
  namespace fs = std::filesystem;
  std::istringstream in(
      "timestamp,type,p1,p2,p3,p4,p5,p6\n"
      "2020-01-01T10:00:00,Navigate To (Web),https://a.test,--,--,--,--,--\n"
      "2020-01-01T10:00:01,Navigate To (Web),https://b.test,--,--,--,--,--\n");
  UiLog log = parse_log(in);
  ContextSchema schema = ContextSchema::default_schema();
  PipelineResult result = run_pipeline(log, schema, {});
  REQUIRE(result.specifications.empty());

  fs::path dir = fs::temp_directory_path() / "rpmine_eval_empty";
  fs::remove_all(dir);
  write_outputs(result, dir.string());

  GroundTruth truth;
  truth.rows = {{0, 0, 0, true}, {1, 0, 0, true}};
  EvaluationReport report = evaluate(dir.string(), truth, log, schema);
  CHECK(report.routines == 0);
  CHECK(report.coverage == doctest::Approx(0.0));
}

TEST_CASE("evaluation scores a perfect synthetic rediscovery") {
  namespace fs = std::filesystem;
  GeneratedLog g = generate(single_form_model(4), 50);
  ContextSchema schema = ContextSchema::default_schema();
  PipelineResult result = run_pipeline(g.log, schema, {});
  REQUIRE(result.specifications.size() == 1);

  fs::path dir = fs::temp_directory_path() / "rpmine_eval_test";
  fs::remove_all(dir);
  write_outputs(result, dir.string());

  EvaluationReport report = evaluate(dir.string(), g.truth, g.log, schema);
  CHECK(report.routines == 1);
  CHECK(report.average_jc == doctest::Approx(1.0));
  CHECK(report.coverage == doctest::Approx(1.0));
  CHECK(report.automatability.precision == doctest::Approx(1.0));
  CHECK(report.automatability.recall == doctest::Approx(1.0));
}
