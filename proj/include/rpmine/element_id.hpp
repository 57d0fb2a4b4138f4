#pragma once

#include <optional>
#include <string>

#include "rpmine/log_model.hpp"

namespace rpmine {

/// Application-scoped locator of the element a read/write interaction acts
/// on: a web widget is (url, id), a spreadsheet cell is workbook/worksheet/
/// column and, when known, the concrete row. `label` is a human-readable
/// name kept for reporting only and excluded from identity.
struct ElementIdentifier {
  enum class Kind { Web, Sheet };

  Kind kind = Kind::Web;
  std::string url;       // web
  std::string id;        // web
  std::string workbook;  // sheet
  std::string worksheet; // sheet
  std::string column;    // sheet
  std::optional<std::string> row;  // sheet, concrete occurrences only
  std::string label;

  /// Row-insensitive form: the locator that stays stable across task
  /// executions (rows advance with every processed record).
  ElementIdentifier location() const {
    ElementIdentifier e = *this;
    e.row.reset();
    return e;
  }

  std::string to_string() const;

  friend bool operator==(const ElementIdentifier& a, const ElementIdentifier& b) {
    return a.kind == b.kind && a.url == b.url && a.id == b.id && a.workbook == b.workbook &&
           a.worksheet == b.worksheet && a.column == b.column && a.row == b.row;
  }
  friend bool operator<(const ElementIdentifier& a, const ElementIdentifier& b) {
    auto tup = [](const ElementIdentifier& e) {
      return std::tie(e.kind, e.url, e.id, e.workbook, e.worksheet, e.column, e.row);
    };
    return tup(a) < tup(b);
  }
};

/// The element a selection/read/write event addresses; nullopt for clicks
/// and pure navigation.
std::optional<ElementIdentifier> target_element(const UiEvent& e);

}  // namespace rpmine
