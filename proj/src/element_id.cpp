#include "rpmine/element_id.hpp"

namespace rpmine {

std::string ElementIdentifier::to_string() const {
  if (kind == Kind::Web) {
    std::string out = label.empty() ? id : label;
    return out + " @ " + url;
  }
  std::string out = "cell " + column;
  if (row) out += *row;
  out += " @ " + workbook + "/" + worksheet;
  return out;
}

std::optional<ElementIdentifier> target_element(const UiEvent& e) {
  auto get = [&e](std::string_view name) {
    auto v = e.param(name);
    return v ? std::string(*v) : std::string();
  };
  switch (e.type) {
    case UiType::SelectField:
    case UiType::Copy:
    case UiType::Paste:
    case UiType::EditField: {
      ElementIdentifier id;
      id.kind = ElementIdentifier::Kind::Web;
      id.url = get("url");
      id.id = get("id");
      id.label = get("name");
      return id;
    }
    case UiType::SelectCell:
    case UiType::CopyCell:
    case UiType::PasteIntoCell:
    case UiType::EditCell: {
      ElementIdentifier id;
      id.kind = ElementIdentifier::Kind::Sheet;
      id.workbook = get("workbook");
      id.worksheet = get("worksheet");
      id.column = get("column");
      if (e.param("row")) id.row = get("row");
      return id;
    }
    case UiType::SelectRange:
    case UiType::CopyRange:
    case UiType::PasteIntoRange:
    case UiType::EditRange: {
      ElementIdentifier id;
      id.kind = ElementIdentifier::Kind::Sheet;
      id.workbook = get("workbook");
      id.worksheet = get("worksheet");
      id.column = get("columns");
      if (e.param("rows")) id.row = get("rows");
      return id;
    }
    default:
      return std::nullopt;
  }
}

}  // namespace rpmine
