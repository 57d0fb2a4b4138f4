#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rpmine {

// The closed taxonomy of recordable user interactions. Every event in a log
// is an instantiation of one of these types; unknown names are rejected at
// parse time.
enum class UiType {
  CreateNewTab,
  SelectTab,
  CloseTab,
  NavigateTo,
  AddWorksheet,
  SelectWorksheet,
  SelectCell,
  SelectRange,
  SelectField,
  Copy,
  CopyCell,
  CopyRange,
  PasteIntoCell,
  PasteIntoRange,
  Paste,
  ClickButton,
  ClickLink,
  EditField,
  EditCell,
  EditRange,
};

inline constexpr std::size_t kUiTypeCount = 20;

enum class UiGroup { Navigation, Read, Write };

struct UiTypeInfo {
  UiType type;
  std::string_view canonical;  // e.g. "copyCell"
  std::string_view display;    // e.g. "Copy Cell (Excel)"
  UiGroup group;
  std::vector<std::string_view> params;  // positional payload parameter names
};

const UiTypeInfo& ui_type_info(UiType type);

/// Accepts the canonical name exactly or the display name case-insensitively.
std::optional<UiType> ui_type_from_name(std::string_view name);

// Event-kind groups used by the filtering and assessment rules.
bool is_selection(UiType t);  // selectCell, selectRange, selectField
bool is_copy(UiType t);
bool is_paste(UiType t);
bool is_edit(UiType t);
bool is_click(UiType t);

/// One recorded interaction: timestamp, type and positional payload.
/// Parameters absent in the source row are simply not present in `params`.
struct UiEvent {
  std::int64_t timestamp_ms = 0;
  UiType type = UiType::ClickButton;
  std::vector<std::pair<std::string, std::string>> params;

  std::optional<std::string_view> param(std::string_view name) const;
  bool operator==(const UiEvent&) const = default;
};

struct UiLog {
  std::vector<UiEvent> events;
  bool operator==(const UiLog&) const = default;
};

/// Per-type selection of the payload parameters that locate an action
/// (the rest carry instance-varying data and are dropped on normalization).
class ContextSchema {
 public:
  static ContextSchema default_schema();
  static ContextSchema load_file(const std::string& path);
  static ContextSchema from_json_text(const std::string& text);

  const std::vector<std::string>& context_params(UiType type) const;
  std::string to_json_text() const;

 private:
  void validate() const;

  std::map<UiType, std::vector<std::string>> context_;
};

/// A UI event projected onto its context parameters. Two normalized events
/// denote the same action iff type and all context values match.
struct NormalizedEvent {
  std::int64_t timestamp_ms = 0;
  UiType type = UiType::ClickButton;
  std::vector<std::pair<std::string, std::string>> context;
  std::size_t origin_index = 0;  // position of the source event in the filtered log

  bool same_action(const NormalizedEvent& other) const;
};

/// Canonical string form of (type, context values). Equal keys iff the
/// underlying normalized events denote the same action.
class ActionKey {
 public:
  ActionKey() = default;
  explicit ActionKey(std::string repr) : repr_(std::move(repr)) {}

  const std::string& str() const { return repr_; }
  bool empty() const { return repr_.empty(); }

  auto operator<=>(const ActionKey&) const = default;

 private:
  std::string repr_;
};

ActionKey action_key(const NormalizedEvent& e);

std::int64_t parse_timestamp(std::string_view iso);
std::string format_timestamp(std::int64_t ms);

/// Parses a UTF-8 CSV stream with header `timestamp,type,p1,p2,p3,p4,p5,p6`.
/// Payload names are assigned positionally per the event type. An unquoted
/// `--` cell marks an absent parameter; a quoted one is a literal value.
UiLog parse_log(std::istream& in);
UiLog parse_log_file(const std::string& path);

void serialize_log(const UiLog& log, std::ostream& out);
std::string serialize_log(const UiLog& log);

std::vector<NormalizedEvent> normalize(const UiLog& log, const ContextSchema& schema);

}  // namespace rpmine

template <>
struct std::hash<rpmine::ActionKey> {
  std::size_t operator()(const rpmine::ActionKey& k) const {
    return std::hash<std::string>{}(k.str());
  }
};
