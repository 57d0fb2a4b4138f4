#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "rpmine/log_model.hpp"

namespace rpmine {

/// One spreadsheet-to-form transfer: copy the column's cell of the current
/// record, paste it into the web field, optionally confirm with an edit.
struct FieldSpec {
  enum class Data { Name, Date, Phone, Choice };

  std::string field;   // web field name; the element id is derived from it
  std::string column;  // source spreadsheet column
  Data data = Data::Name;
  std::vector<std::string> choices;  // Data::Choice pool
  bool edit_after_paste = true;
};

/// An edit typed straight into a field, without a paste feeding it.
struct DirectEditSpec {
  enum class Kind {
    MappedFromField,  // value decided by another field's value
    RandomValue,      // fresh value every instance; not automatable
    FixedValue,
  };

  std::string field;
  Kind kind = Kind::RandomValue;
  std::string source_field;                    // MappedFromField
  std::map<std::string, std::string> mapping;  // MappedFromField
  std::string fixed;                           // FixedValue
};

struct VariantSpec {
  std::vector<FieldSpec> fields;
  std::vector<DirectEditSpec> tail_edits;
  double weight = 1.0;
  std::string start_button = "New Record";
  std::string end_button = "Submit";
};

struct RoutineModel {
  std::vector<VariantSpec> variants;
  double noise_rate = 0.0;  // chance of a stray navigation event after an instance
  std::uint64_t seed = 1;
  std::string workbook = "Records";
  std::string worksheet = "Sheet1";
  std::string url = "https://app.example.com/form";
};

struct GroundTruthRow {
  std::size_t event_index = 0;
  int segment_id = -1;  // -1 marks injected noise
  int variant_id = -1;
  bool automatable = false;
};

struct GroundTruth {
  std::vector<GroundTruthRow> rows;
};

struct GeneratedLog {
  UiLog log;
  GroundTruth truth;
};

/// Deterministic for a fixed seed: equal seeds give byte-identical CSV.
GeneratedLog generate(const RoutineModel& model, std::size_t n_instances);

void write_ground_truth(const GroundTruth& truth, std::ostream& out);
GroundTruth read_ground_truth(std::istream& in);
GroundTruth read_ground_truth_file(const std::string& path);

// Ready-made models used by the command line generator and the test suites.

/// One variant, `n_fields` copy/paste/edit transfers framed by two clicks:
/// 3 * n_fields + 2 events per instance.
RoutineModel single_form_model(std::size_t n_fields, double noise_rate = 0.0,
                               std::uint64_t seed = 1);

/// Three variants of distinct lengths and fields, weighted 0.5/0.3/0.2.
RoutineModel weighted_variants_model(std::uint64_t seed = 1);

/// One variant with ten derivable edits (eight pasted transfers plus two
/// value-mapped fields) and four free-typed random edits.
RoutineModel mixed_edit_model(std::uint64_t seed = 1);

}  // namespace rpmine
