#include "rpmine/log_model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "rpmine/error.hpp"

namespace rpmine {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownUiType: return "UnknownUiType";
    case ErrorCode::MalformedTimestamp: return "MalformedTimestamp";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::OrderViolation: return "OrderViolation";
    case ErrorCode::InvalidSchema: return "InvalidSchema";
    case ErrorCode::EmptyLog: return "EmptyLog";
    case ErrorCode::NoMatch: return "NoMatch";
    case ErrorCode::MisalignedInstances: return "MisalignedInstances";
    case ErrorCode::UnseenDeterminantValue: return "UnseenDeterminantValue";
    case ErrorCode::PatternMismatch: return "PatternMismatch";
    case ErrorCode::BothEmpty: return "BothEmpty";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::vector<UiTypeInfo> make_taxonomy() {
  using G = UiGroup;
  std::vector<UiTypeInfo> t;
  t.push_back({UiType::CreateNewTab, "createNewTab", "Create New Tab (Web)", G::Navigation, {"id"}});
  t.push_back({UiType::SelectTab, "selectTab", "Select Tab (Web)", G::Navigation, {"url", "id", "title"}});
  t.push_back({UiType::CloseTab, "closeTab", "Close Tab (Web)", G::Navigation, {"url", "id", "title"}});
  t.push_back({UiType::NavigateTo, "navigateTo", "Navigate To (Web)", G::Navigation, {"url"}});
  t.push_back({UiType::AddWorksheet, "addWorksheet", "Add Worksheet (Excel)", G::Navigation, {"workbook", "worksheet"}});
  t.push_back({UiType::SelectWorksheet, "selectWorksheet", "Select Worksheet (Excel)", G::Navigation, {"workbook", "worksheet"}});
  t.push_back({UiType::SelectCell, "selectCell", "Select Cell (Excel)", G::Navigation, {"workbook", "worksheet", "column", "row", "value"}});
  t.push_back({UiType::SelectRange, "selectRange", "Select Range (Excel)", G::Navigation, {"workbook", "worksheet", "columns", "rows", "value"}});
  t.push_back({UiType::SelectField, "selectField", "Select Field (Web)", G::Navigation, {"url", "name", "id", "value"}});
  t.push_back({UiType::Copy, "copy", "Copy (Web)", G::Read, {"url", "name", "id", "value", "copied"}});
  t.push_back({UiType::CopyCell, "copyCell", "Copy Cell (Excel)", G::Read, {"workbook", "worksheet", "column", "row", "value", "copied"}});
  t.push_back({UiType::CopyRange, "copyRange", "Copy Range (Excel)", G::Read, {"workbook", "worksheet", "columns", "rows", "value", "copied"}});
  t.push_back({UiType::PasteIntoCell, "pasteIntoCell", "Paste Into Cell (Excel)", G::Write, {"workbook", "worksheet", "column", "row", "value", "pasted"}});
  t.push_back({UiType::PasteIntoRange, "pasteIntoRange", "Paste Into Range (Excel)", G::Write, {"workbook", "worksheet", "columns", "rows", "value", "pasted"}});
  t.push_back({UiType::Paste, "paste", "Paste (Web)", G::Write, {"url", "name", "id", "value", "pasted"}});
  t.push_back({UiType::ClickButton, "clickButton", "Click Button (Web)", G::Write, {"url", "name", "id", "type"}});
  t.push_back({UiType::ClickLink, "clickLink", "Click Link (Web)", G::Write, {"url", "innerText", "href"}});
  t.push_back({UiType::EditField, "editField", "Edit Field (Web)", G::Write, {"url", "name", "id", "type", "value"}});
  t.push_back({UiType::EditCell, "editCell", "Edit Cell (Excel)", G::Write, {"workbook", "worksheet", "column", "row", "value"}});
  t.push_back({UiType::EditRange, "editRange", "Edit Range (Excel)", G::Write, {"workbook", "worksheet", "columns", "rows", "value"}});
  return t;
}

const std::vector<UiTypeInfo>& taxonomy() {
  static const std::vector<UiTypeInfo> t = make_taxonomy();
  return t;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

const UiTypeInfo& ui_type_info(UiType type) {
  return taxonomy()[static_cast<std::size_t>(type)];
}

std::optional<UiType> ui_type_from_name(std::string_view name) {
  for (const auto& info : taxonomy()) {
    if (name == info.canonical) return info.type;
  }
  const std::string low = lower(name);
  for (const auto& info : taxonomy()) {
    if (low == lower(info.display)) return info.type;
  }
  return std::nullopt;
}

bool is_selection(UiType t) {
  return t == UiType::SelectCell || t == UiType::SelectRange || t == UiType::SelectField;
}

bool is_copy(UiType t) {
  return t == UiType::Copy || t == UiType::CopyCell || t == UiType::CopyRange;
}

bool is_paste(UiType t) {
  return t == UiType::Paste || t == UiType::PasteIntoCell || t == UiType::PasteIntoRange;
}

bool is_edit(UiType t) {
  return t == UiType::EditField || t == UiType::EditCell || t == UiType::EditRange;
}

bool is_click(UiType t) {
  return t == UiType::ClickButton || t == UiType::ClickLink;
}

std::optional<std::string_view> UiEvent::param(std::string_view name) const {
  for (const auto& [key, value] : params) {
    if (key == name) return std::string_view(value);
  }
  return std::nullopt;
}

// --- Context schema ---------------------------------------------------------

ContextSchema ContextSchema::default_schema() {
  ContextSchema s;
  auto set = [&s](UiType t, std::vector<std::string> names) {
    s.context_[t] = std::move(names);
  };
  // Cell rows and data values vary across task executions, so they are data
  // parameters by default. Click/edit widgets on web pages are located by
  // URL, name, id and widget type.
  set(UiType::CreateNewTab, {"id"});
  set(UiType::SelectTab, {"url", "id", "title"});
  set(UiType::CloseTab, {"url", "id", "title"});
  set(UiType::NavigateTo, {"url"});
  set(UiType::AddWorksheet, {"workbook", "worksheet"});
  set(UiType::SelectWorksheet, {"workbook", "worksheet"});
  set(UiType::SelectCell, {"workbook", "worksheet", "column"});
  set(UiType::SelectRange, {"workbook", "worksheet", "columns"});
  set(UiType::SelectField, {"url", "name", "id"});
  set(UiType::Copy, {"url", "name", "id"});
  set(UiType::CopyCell, {"workbook", "worksheet", "column"});
  set(UiType::CopyRange, {"workbook", "worksheet", "columns"});
  set(UiType::PasteIntoCell, {"workbook", "worksheet", "column"});
  set(UiType::PasteIntoRange, {"workbook", "worksheet", "columns"});
  set(UiType::Paste, {"url", "name", "id"});
  set(UiType::ClickButton, {"url", "name", "id", "type"});
  set(UiType::ClickLink, {"url", "innerText", "href"});
  set(UiType::EditField, {"url", "name", "id", "type"});
  set(UiType::EditCell, {"workbook", "worksheet", "column"});
  set(UiType::EditRange, {"workbook", "worksheet", "columns"});
  s.validate();
  return s;
}

ContextSchema ContextSchema::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidSchema, std::string("schema is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw Error(ErrorCode::InvalidSchema, "schema root must be an object");
  }
  // Start from the default and override per type, so partial files are valid.
  ContextSchema s = default_schema();
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    auto type = ui_type_from_name(it.key());
    if (!type) {
      throw Error(ErrorCode::InvalidSchema, "unknown UI type in schema: " + it.key());
    }
    if (!it.value().is_array()) {
      throw Error(ErrorCode::InvalidSchema, "schema value for " + it.key() + " must be an array");
    }
    std::vector<std::string> names;
    for (const auto& v : it.value()) {
      if (!v.is_string()) {
        throw Error(ErrorCode::InvalidSchema, "schema parameter names must be strings");
      }
      names.push_back(v.get<std::string>());
    }
    s.context_[*type] = std::move(names);
  }
  s.validate();
  return s;
}

ContextSchema ContextSchema::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open schema file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string ContextSchema::to_json_text() const {
  nlohmann::ordered_json doc;
  for (const auto& [type, names] : context_) {
    doc[std::string(ui_type_info(type).canonical)] = names;
  }
  return doc.dump(2);
}

void ContextSchema::validate() const {
  for (const auto& info : taxonomy()) {
    auto it = context_.find(info.type);
    if (it == context_.end()) {
      throw Error(ErrorCode::InvalidSchema,
                  "schema misses UI type " + std::string(info.canonical));
    }
    for (const auto& name : it->second) {
      if (std::find(info.params.begin(), info.params.end(), name) == info.params.end()) {
        throw Error(ErrorCode::InvalidSchema,
                    "parameter '" + name + "' is not in the payload of " +
                        std::string(info.canonical));
      }
    }
  }
}

const std::vector<std::string>& ContextSchema::context_params(UiType type) const {
  return context_.at(type);
}

// --- Timestamps --------------------------------------------------------------

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = static_cast<int>(yy + (m <= 2));
}

bool parse_fixed_uint(std::string_view s, std::size_t pos, std::size_t len, unsigned& out) {
  if (pos + len > s.size()) return false;
  unsigned v = 0;
  for (std::size_t i = 0; i < len; ++i) {
    char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + static_cast<unsigned>(c - '0');
  }
  out = v;
  return true;
}

}  // namespace

std::int64_t parse_timestamp(std::string_view iso) {
  // YYYY-MM-DDTHH:MM:SS with optional .mmm fraction and optional trailing Z.
  auto fail = [&iso]() -> Error {
    return Error(ErrorCode::MalformedTimestamp, "bad timestamp: '" + std::string(iso) + "'");
  };
  unsigned year, month, day, hour, minute, second;
  if (!parse_fixed_uint(iso, 0, 4, year)) throw fail();
  if (iso.size() < 19 || iso[4] != '-' || iso[7] != '-' ||
      (iso[10] != 'T' && iso[10] != ' ') || iso[13] != ':' || iso[16] != ':') {
    throw fail();
  }
  if (!parse_fixed_uint(iso, 5, 2, month) || !parse_fixed_uint(iso, 8, 2, day) ||
      !parse_fixed_uint(iso, 11, 2, hour) || !parse_fixed_uint(iso, 14, 2, minute) ||
      !parse_fixed_uint(iso, 17, 2, second)) {
    throw fail();
  }
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60) {
    throw fail();
  }
  std::size_t pos = 19;
  unsigned millis = 0;
  if (pos < iso.size() && iso[pos] == '.') {
    ++pos;
    std::size_t digits = 0;
    while (pos < iso.size() && iso[pos] >= '0' && iso[pos] <= '9' && digits < 3) {
      millis = millis * 10 + static_cast<unsigned>(iso[pos] - '0');
      ++pos;
      ++digits;
    }
    if (digits == 0) throw fail();
    while (digits < 3) {
      millis *= 10;
      ++digits;
    }
  }
  if (pos < iso.size() && iso[pos] == 'Z') ++pos;
  if (pos != iso.size()) throw fail();

  const std::int64_t days = days_from_civil(static_cast<int>(year), month, day);
  return ((days * 24 + hour) * 60 + minute) * 60000 +
         static_cast<std::int64_t>(second) * 1000 + millis;
}

std::string format_timestamp(std::int64_t ms) {
  std::int64_t rest = ms;
  std::int64_t millis = ((rest % 1000) + 1000) % 1000;
  rest = (rest - millis) / 1000;
  std::int64_t secs = ((rest % 86400) + 86400) % 86400;
  std::int64_t days = (rest - secs) / 86400;
  int y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lld", y, m, d,
                static_cast<long long>(secs / 3600), static_cast<long long>((secs / 60) % 60),
                static_cast<long long>(secs % 60));
  std::string out(buf);
  if (millis != 0) {
    std::snprintf(buf, sizeof(buf), ".%03lld", static_cast<long long>(millis));
    out += buf;
  }
  return out;
}

// --- CSV ---------------------------------------------------------------------

namespace {

struct CsvField {
  std::string text;
  bool quoted = false;
};

// RFC 4180 reader; quoted fields may contain commas, quotes and newlines.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  std::optional<std::vector<CsvField>> next_record() {
    if (!peek_ok()) return std::nullopt;
    std::vector<CsvField> fields;
    CsvField field;
    bool in_quotes = false;
    bool any = false;
    int c;
    while ((c = in_.get()) != EOF) {
      any = true;
      char ch = static_cast<char>(c);
      if (in_quotes) {
        if (ch == '"') {
          if (in_.peek() == '"') {
            field.text.push_back('"');
            in_.get();
          } else {
            in_quotes = false;
          }
        } else {
          field.text.push_back(ch);
        }
        continue;
      }
      if (ch == '"' && field.text.empty() && !field.quoted) {
        in_quotes = true;
        field.quoted = true;
        continue;
      }
      if (ch == ',') {
        fields.push_back(std::move(field));
        field = CsvField{};
        continue;
      }
      if (ch == '\r') {
        if (in_.peek() == '\n') in_.get();
        break;
      }
      if (ch == '\n') break;
      field.text.push_back(ch);
    }
    if (!any) return std::nullopt;
    fields.push_back(std::move(field));
    ++line_;
    return fields;
  }

  std::size_t line() const { return line_; }

 private:
  bool peek_ok() { return in_.peek() != EOF; }

  std::istream& in_;
  std::size_t line_ = 0;
};

std::string csv_escape(const std::string& value, bool force_quote) {
  bool need = force_quote || value.find_first_of(",\"\r\n") != std::string::npos;
  if (!need) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

constexpr std::string_view kHeader = "timestamp,type,p1,p2,p3,p4,p5,p6";

}  // namespace

UiLog parse_log(std::istream& in) {
  CsvReader reader(in);
  auto header = reader.next_record();
  if (!header) return UiLog{};  // empty input: empty log
  {
    std::string joined;
    for (std::size_t i = 0; i < header->size(); ++i) {
      if (i) joined += ',';
      joined += lower((*header)[i].text);
    }
    if (joined != kHeader) {
      throw Error(ErrorCode::MalformedCsv, "unexpected header row: '" + joined + "'");
    }
  }

  UiLog log;
  while (auto record = reader.next_record()) {
    const auto& fields = *record;
    if (fields.size() == 1 && fields[0].text.empty() && !fields[0].quoted) continue;
    if (fields.size() != 8) {
      throw Error(ErrorCode::MalformedCsv,
                  "row " + std::to_string(reader.line()) + " has " +
                      std::to_string(fields.size()) + " fields, expected 8");
    }
    UiEvent event;
    event.timestamp_ms = parse_timestamp(fields[0].text);
    auto type = ui_type_from_name(fields[1].text);
    if (!type) {
      throw Error(ErrorCode::UnknownUiType,
                  "row " + std::to_string(reader.line()) + ": '" + fields[1].text + "'");
    }
    event.type = *type;
    const auto& info = ui_type_info(event.type);
    for (std::size_t i = 0; i < 6; ++i) {
      const CsvField& f = fields[2 + i];
      const bool absent = !f.quoted && f.text == "--";
      if (absent) continue;
      if (i >= info.params.size()) {
        if (f.text.empty()) continue;  // trailing empties beyond the arity are fine
        throw Error(ErrorCode::MalformedCsv,
                    "row " + std::to_string(reader.line()) + ": value in p" +
                        std::to_string(i + 1) + " but " + std::string(info.canonical) +
                        " has only " + std::to_string(info.params.size()) + " parameters");
      }
      event.params.emplace_back(std::string(info.params[i]), f.text);
    }
    if (!log.events.empty() && event.timestamp_ms < log.events.back().timestamp_ms) {
      throw Error(ErrorCode::OrderViolation,
                  "row " + std::to_string(reader.line()) + " precedes the previous row");
    }
    log.events.push_back(std::move(event));
  }
  return log;
}

UiLog parse_log_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open log file: " + path);
  return parse_log(in);
}

void serialize_log(const UiLog& log, std::ostream& out) {
  out << kHeader << "\n";
  for (const auto& event : log.events) {
    out << format_timestamp(event.timestamp_ms) << ',';
    out << ui_type_info(event.type).display;
    const auto& info = ui_type_info(event.type);
    std::size_t next_param = 0;
    for (std::size_t i = 0; i < 6; ++i) {
      out << ',';
      if (i < info.params.size() && next_param < event.params.size() &&
          event.params[next_param].first == info.params[i]) {
        const std::string& value = event.params[next_param].second;
        out << csv_escape(value, value == "--");
        ++next_param;
      } else {
        out << "--";
      }
    }
    out << "\n";
  }
}

std::string serialize_log(const UiLog& log) {
  std::ostringstream out;
  serialize_log(log, out);
  return out.str();
}

// --- Normalization -----------------------------------------------------------

bool NormalizedEvent::same_action(const NormalizedEvent& other) const {
  return type == other.type && context == other.context;
}

std::vector<NormalizedEvent> normalize(const UiLog& log, const ContextSchema& schema) {
  std::vector<NormalizedEvent> out;
  out.reserve(log.events.size());
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    const UiEvent& e = log.events[i];
    NormalizedEvent ne;
    ne.timestamp_ms = e.timestamp_ms;
    ne.type = e.type;
    ne.origin_index = i;
    for (const auto& name : schema.context_params(e.type)) {
      auto v = e.param(name);
      ne.context.emplace_back(name, v ? std::string(*v) : std::string());
    }
    out.push_back(std::move(ne));
  }
  return out;
}

ActionKey action_key(const NormalizedEvent& e) {
  std::string repr(ui_type_info(e.type).canonical);
  repr += '[';
  bool first = true;
  for (const auto& [name, value] : e.context) {
    (void)name;  // schema fixes the order, names are redundant in the key
    if (!first) repr += '|';
    first = false;
    for (char c : value) {
      if (c == '\\' || c == '|' || c == '[' || c == ']') repr += '\\';
      repr.push_back(c);
    }
  }
  repr += ']';
  return ActionKey(std::move(repr));
}

}  // namespace rpmine
