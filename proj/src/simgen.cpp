#include "rpmine/simgen.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "rpmine/error.hpp"

namespace rpmine {

namespace {

std::string field_id(const std::string& field) {
  std::string id;
  bool upper_next = false;
  for (char c : field) {
    if (c == ' ') {
      upper_next = true;
      continue;
    }
    id.push_back(upper_next ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                            : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    upper_next = false;
  }
  if (!id.empty()) id[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(id[0])));
  return id;
}

class ValueSampler {
 public:
  explicit ValueSampler(std::mt19937_64& rng) : rng_(rng) {}

  std::string name() {
    static const char* first[] = {"Albert", "Audrey", "Ben",   "Clara", "Daniel",
                                  "Elena",  "Felix",  "Grace", "Hugo",  "Ines"};
    static const char* last[] = {"Rauf",  "Backer", "Stanley", "Diaz",  "Brown",
                                 "Keller", "Moreau", "Sato",    "Novak", "Olsen"};
    return std::string(pick(first)) + " " + pick(last);
  }

  std::string date() {
    std::uniform_int_distribution<int> day(1, 28), month(1, 12), year(1960, 2005);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%02d/%02d/%04d", day(rng_), month(rng_), year(rng_));
    return buf;
  }

  std::string phone() {
    std::uniform_int_distribution<int> part(0, 999);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "+61 %03d %03d %04d", part(rng_), part(rng_),
                  part(rng_) * 10 % 10000);
    return buf;
  }

  std::string choice(const std::vector<std::string>& pool) {
    std::uniform_int_distribution<std::size_t> idx(0, pool.size() - 1);
    return pool[idx(rng_)];
  }

  std::string random_token() {
    static const char alphabet[] = "abcdefghijklmnopqrstuvwxyz";
    std::uniform_int_distribution<std::size_t> idx(0, sizeof(alphabet) - 2);
    std::string out;
    for (int i = 0; i < 10; ++i) out.push_back(alphabet[idx(rng_)]);
    return out;
  }

 private:
  template <std::size_t N>
  const char* pick(const char* (&pool)[N]) {
    std::uniform_int_distribution<std::size_t> idx(0, N - 1);
    return pool[idx(rng_)];
  }

  std::mt19937_64& rng_;
};

struct EventSink {
  UiLog log;
  GroundTruth truth;
  std::int64_t now_ms;
  std::mt19937_64* rng = nullptr;

  void emit(UiEvent event, int segment, int variant, bool automatable) {
    std::uniform_int_distribution<std::int64_t> step(1000, 3000);
    event.timestamp_ms = now_ms;
    now_ms += step(*rng);
    truth.rows.push_back({log.events.size(), segment, variant, automatable});
    log.events.push_back(std::move(event));
  }
};

}  // namespace

GeneratedLog generate(const RoutineModel& model, std::size_t n_instances) {
  assert(!model.variants.empty());
  std::mt19937_64 rng(model.seed);
  ValueSampler sample(rng);
  EventSink sink;
  sink.now_ms = parse_timestamp("2024-01-15T09:00:00");
  sink.rng = &rng;

  std::vector<double> weights;
  for (const auto& v : model.variants) weights.push_back(v.weight);
  std::discrete_distribution<std::size_t> pick_variant(weights.begin(), weights.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::size_t noise_counter = 0;
  for (std::size_t instance = 0; instance < n_instances; ++instance) {
    const std::size_t variant_index =
        model.variants.size() == 1 ? 0 : pick_variant(rng);
    const VariantSpec& variant = model.variants[variant_index];
    const int segment = static_cast<int>(instance);
    const int vid = static_cast<int>(variant_index);
    const std::string row = std::to_string(instance + 2);

    auto click = [&](const std::string& label) {
      UiEvent e;
      e.type = UiType::ClickButton;
      e.params = {{"url", model.url},
                  {"name", label},
                  {"id", field_id(label)},
                  {"type", "button"}};
      sink.emit(std::move(e), segment, vid, true);
    };
    auto edit_field = [&](const std::string& field, const std::string& value, bool automatable) {
      UiEvent e;
      e.type = UiType::EditField;
      e.params = {{"url", model.url},
                  {"name", field},
                  {"id", field_id(field)},
                  {"type", "text"},
                  {"value", value}};
      sink.emit(std::move(e), segment, vid, automatable);
    };

    click(variant.start_button);
    std::map<std::string, std::string> field_values;
    for (const auto& fs : variant.fields) {
      std::string value;
      switch (fs.data) {
        case FieldSpec::Data::Name: value = sample.name(); break;
        case FieldSpec::Data::Date: value = sample.date(); break;
        case FieldSpec::Data::Phone: value = sample.phone(); break;
        case FieldSpec::Data::Choice: value = sample.choice(fs.choices); break;
      }
      field_values[fs.field] = value;

      UiEvent copy;
      copy.type = UiType::CopyCell;
      copy.params = {{"workbook", model.workbook}, {"worksheet", model.worksheet},
                     {"column", fs.column},        {"row", row},
                     {"value", value},             {"copied", value}};
      sink.emit(std::move(copy), segment, vid, true);

      UiEvent paste;
      paste.type = UiType::Paste;
      paste.params = {{"url", model.url},
                      {"name", fs.field},
                      {"id", field_id(fs.field)},
                      {"value", ""},
                      {"pasted", value}};
      sink.emit(std::move(paste), segment, vid, true);

      if (fs.edit_after_paste) edit_field(fs.field, value, true);
    }
    for (const auto& te : variant.tail_edits) {
      switch (te.kind) {
        case DirectEditSpec::Kind::MappedFromField: {
          auto it = field_values.find(te.source_field);
          assert(it != field_values.end());
          auto mapped = te.mapping.find(it->second);
          assert(mapped != te.mapping.end());
          edit_field(te.field, mapped->second, true);
          break;
        }
        case DirectEditSpec::Kind::RandomValue:
          edit_field(te.field, sample.random_token(), false);
          break;
        case DirectEditSpec::Kind::FixedValue:
          edit_field(te.field, te.fixed, true);
          break;
      }
    }
    click(variant.end_button);

    if (model.noise_rate > 0.0 && unit(rng) < model.noise_rate) {
      UiEvent noise;
      noise.type = UiType::NavigateTo;
      noise.params = {{"url", "https://elsewhere.example.com/" + std::to_string(noise_counter++)}};
      sink.emit(std::move(noise), -1, -1, false);
    }
  }

  return {std::move(sink.log), std::move(sink.truth)};
}

void write_ground_truth(const GroundTruth& truth, std::ostream& out) {
  out << "event_index,segment_id,variant_id,automatable\n";
  for (const auto& row : truth.rows) {
    out << row.event_index << ',' << row.segment_id << ',' << row.variant_id << ','
        << (row.automatable ? 1 : 0) << "\n";
  }
}

GroundTruth read_ground_truth(std::istream& in) {
  GroundTruth truth;
  std::string line;
  if (!std::getline(in, line)) return truth;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    GroundTruthRow row;
    std::istringstream fields(line);
    std::string cell;
    std::getline(fields, cell, ',');
    row.event_index = std::stoul(cell);
    std::getline(fields, cell, ',');
    row.segment_id = std::stoi(cell);
    std::getline(fields, cell, ',');
    row.variant_id = std::stoi(cell);
    std::getline(fields, cell, ',');
    row.automatable = cell == "1" || cell == "true";
    truth.rows.push_back(row);
  }
  return truth;
}

GroundTruth read_ground_truth_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open ground truth file: " + path);
  return read_ground_truth(in);
}

// --- Ready-made models -------------------------------------------------------------

RoutineModel single_form_model(std::size_t n_fields, double noise_rate, std::uint64_t seed) {
  static const char* names[] = {"Full Name", "Date",    "Phone",   "Country",
                                "City",      "Street",  "Zip",     "Company",
                                "Role",      "Email",   "Team",    "Manager"};
  static const char* columns = "ABCDEFGHIJKL";
  assert(n_fields >= 1 && n_fields <= 12);

  VariantSpec variant;
  for (std::size_t i = 0; i < n_fields; ++i) {
    FieldSpec fs;
    fs.field = names[i];
    fs.column = std::string(1, columns[i]);
    fs.data = i == 1 ? FieldSpec::Data::Date
                     : (i == 2 ? FieldSpec::Data::Phone : FieldSpec::Data::Name);
    variant.fields.push_back(std::move(fs));
  }
  RoutineModel model;
  model.variants.push_back(std::move(variant));
  model.noise_rate = noise_rate;
  model.seed = seed;
  return model;
}

RoutineModel weighted_variants_model(std::uint64_t seed) {
  RoutineModel model;
  model.seed = seed;

  auto make = [](std::initializer_list<std::pair<const char*, const char*>> fields,
                 double weight) {
    VariantSpec v;
    for (const auto& [field, column] : fields) {
      FieldSpec fs;
      fs.field = field;
      fs.column = column;
      v.fields.push_back(std::move(fs));
    }
    v.weight = weight;
    return v;
  };
  // 14, 12 and 10 events per instance; fields are disjoint across variants
  // apart from the shared framing clicks.
  model.variants.push_back(make({{"Full Name", "A"}, {"Date", "B"}, {"Phone", "C"}, {"Country", "D"}}, 0.5));
  model.variants.push_back(make({{"Company", "E"}, {"Role", "F"}, {"Email", "G"}}, 0.3));
  model.variants.push_back(make({{"Team", "H"}, {"Manager", "I"}}, 0.2));
  return model;
}

RoutineModel mixed_edit_model(std::uint64_t seed) {
  RoutineModel model;
  model.seed = seed;

  VariantSpec variant;
  static const char* transfer_fields[] = {"Full Name", "Date", "Phone", "City", "Street", "Zip"};
  static const char* transfer_columns[] = {"A", "B", "C", "D", "E", "F"};
  for (std::size_t i = 0; i < 6; ++i) {
    FieldSpec fs;
    fs.field = transfer_fields[i];
    fs.column = transfer_columns[i];
    fs.data = i == 1 ? FieldSpec::Data::Date
                     : (i == 2 ? FieldSpec::Data::Phone : FieldSpec::Data::Name);
    variant.fields.push_back(std::move(fs));
  }
  {
    FieldSpec fs;
    fs.field = "Country";
    fs.column = "G";
    fs.data = FieldSpec::Data::Choice;
    fs.choices = {"Germany", "Australia", "New Zealand", "Italy", "Ukraine"};
    variant.fields.push_back(std::move(fs));
  }
  {
    FieldSpec fs;
    fs.field = "Plan";
    fs.column = "H";
    fs.data = FieldSpec::Data::Choice;
    fs.choices = {"Starter", "Team", "Business"};
    variant.fields.push_back(std::move(fs));
  }

  DirectEditSpec status;
  status.field = "Student Status";
  status.kind = DirectEditSpec::Kind::MappedFromField;
  status.source_field = "Country";
  status.mapping = {{"Germany", "International"},
                    {"Australia", "Domestic"},
                    {"New Zealand", "International"},
                    {"Italy", "International"},
                    {"Ukraine", "International"}};
  variant.tail_edits.push_back(std::move(status));

  DirectEditSpec tier;
  tier.field = "Support Tier";
  tier.kind = DirectEditSpec::Kind::MappedFromField;
  tier.source_field = "Plan";
  tier.mapping = {{"Starter", "Basic"}, {"Team", "Priority"}, {"Business", "Priority"}};
  variant.tail_edits.push_back(std::move(tier));

  for (const char* field : {"Notes", "Reference", "Ticket", "Remark"}) {
    DirectEditSpec r;
    r.field = field;
    r.kind = DirectEditSpec::Kind::RandomValue;
    variant.tail_edits.push_back(std::move(r));
  }

  model.variants.push_back(std::move(variant));
  return model;
}

}  // namespace rpmine
