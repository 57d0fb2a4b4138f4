#include "rpmine/preprocess.hpp"

#include <algorithm>
#include <random>

#include "doctest.h"
#include "rpmine/log_model.hpp"

using namespace rpmine;

namespace {

UiLog fixture() {
  return parse_log_file(std::string(RPMINE_TEST_DATA_DIR) + "/student_records_fragment.csv");
}

UiEvent make_event(UiType type, std::vector<std::pair<std::string, std::string>> params,
                   std::int64_t ts) {
  UiEvent e;
  e.type = type;
  e.params = std::move(params);
  e.timestamp_ms = ts;
  return e;
}

UiEvent web_event(UiType type, const std::string& field, const std::string& value,
                  std::int64_t ts) {
  return make_event(type,
                    {{"url", "https://x.test"},
                     {"name", field},
                     {"id", field},
                     {"type", "text"},
                     {"value", value}},
                    ts);
}

UiEvent copy_cell(const std::string& column, const std::string& row, const std::string& value,
                  std::int64_t ts) {
  return make_event(UiType::CopyCell, {{"workbook", "WB"},
                                       {"worksheet", "S"},
                                       {"column", column},
                                       {"row", row},
                                       {"value", value},
                                       {"copied", value}},
                    ts);
}

UiEvent paste_web(const std::string& field, const std::string& value, std::int64_t ts) {
  return make_event(UiType::Paste,
                    {{"url", "https://x.test"},
                     {"name", field},
                     {"id", field},
                     {"value", ""},
                     {"pasted", value}},
                    ts);
}

bool is_subsequence(const std::vector<UiEvent>& small, const std::vector<UiEvent>& big) {
  std::size_t at = 0;
  for (const auto& e : big) {
    if (at < small.size() && small[at] == e) ++at;
  }
  return at == small.size();
}

}  // namespace

TEST_CASE("selection filtering drops exactly the three select types") {
  UiLog log = fixture();
  UiLog out = filter_selections(log);
  CHECK(out.events.size() == 32);  // 17 of the 49 fixture rows are selections
  for (const auto& e : out.events) CHECK(!is_selection(e.type));
  // Rows 3 and 5 of the source survive while rows 2 and 4 are gone.
  CHECK(out.events[1].type == UiType::CopyCell);
  CHECK(out.events[2].type == UiType::Paste);

  CHECK(filter_selections(out) == out);  // already clean

  UiLog only;
  only.events = {make_event(UiType::SelectCell,
                            {{"workbook", "WB"}, {"worksheet", "S"}, {"column", "A"}}, 0)};
  CHECK(filter_selections(only).events.empty());
}

TEST_CASE("dangling copies are dropped") {
  UiLog log = fixture();
  UiLog out = filter_dangling_copies(filter_selections(log));
  // The second Germany copy is re-copied before any paste: one loss.
  CHECK(out.events.size() == 31);
  for (std::size_t i = 0; i < out.events.size(); ++i) {
    if (!is_copy(out.events[i].type)) continue;
    bool pasted = false;
    for (std::size_t j = i + 1; j < out.events.size() && !is_copy(out.events[j].type); ++j) {
      if (is_paste(out.events[j].type)) pasted = true;
    }
    CHECK(pasted);
  }

  SUBCASE("copy directly before a paste is kept") {
    UiLog tiny;
    tiny.events = {copy_cell("A", "1", "x", 0), paste_web("f", "x", 1)};
    CHECK(filter_dangling_copies(tiny) == tiny);
  }
  SUBCASE("final unmatched copy is dropped") {
    UiLog tiny;
    tiny.events = {copy_cell("A", "1", "x", 0), paste_web("f", "x", 1),
                   copy_cell("B", "1", "y", 2)};
    UiLog filtered = filter_dangling_copies(tiny);
    REQUIRE(filtered.events.size() == 2);
    CHECK(filtered.events[0] == tiny.events[0]);
    CHECK(filtered.events[1] == tiny.events[1]);
  }
}

TEST_CASE("overwritten edits are dropped within a segment") {
  SUBCASE("same-target edits with nothing between") {
    std::vector<UiEvent> segment = {web_event(UiType::EditField, "status", "Domestic", 0),
                                    web_event(UiType::EditField, "status", "International", 1)};
    auto out = filter_overwritten_edits(segment);
    REQUIRE(out.size() == 1);
    CHECK(out[0].param("value") == "International");
  }
  SUBCASE("a copy in between preserves both edits") {
    std::vector<UiEvent> segment = {web_event(UiType::EditField, "status", "Domestic", 0),
                                    copy_cell("A", "1", "x", 1),
                                    web_event(UiType::EditField, "status", "International", 2)};
    CHECK(filter_overwritten_edits(segment) == segment);
  }
  SUBCASE("single edit unchanged") {
    std::vector<UiEvent> segment = {web_event(UiType::EditField, "status", "Domestic", 0)};
    CHECK(filter_overwritten_edits(segment) == segment);
  }
  SUBCASE("different targets unaffected") {
    std::vector<UiEvent> segment = {web_event(UiType::EditField, "a", "1", 0),
                                    web_event(UiType::EditField, "b", "2", 1)};
    CHECK(filter_overwritten_edits(segment) == segment);
  }
}

TEST_CASE("fixpoint catches removals exposed by earlier removals") {
  // Dropping the trailing pasteless copy leaves the first copy dangling too.
  UiLog log;
  log.events = {copy_cell("A", "1", "x", 0), copy_cell("B", "1", "y", 1)};
  UiLog out = run_filter_fixpoint(log, {FilterRule::RemoveDanglingCopies});
  CHECK(out.events.empty());

  UiLog clean;
  clean.events = {copy_cell("A", "1", "x", 0), paste_web("f", "x", 1)};
  CHECK(run_filter_fixpoint(clean, {FilterRule::RemoveDanglingCopies}) == clean);
}

TEST_CASE("filtering preserves the relative order of survivors") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> length(0, 30);
  std::uniform_int_distribution<int> kind(0, 5);
  std::uniform_int_distribution<int> target(0, 2);
  static const char* fields[] = {"a", "b", "c"};
  static const char* columns[] = {"A", "B", "C"};

  for (int round = 0; round < 200; ++round) {
    UiLog log;
    int n = length(rng);
    for (int i = 0; i < n; ++i) {
      int t = target(rng);
      switch (kind(rng)) {
        case 0:
          log.events.push_back(make_event(
              UiType::SelectCell,
              {{"workbook", "WB"}, {"worksheet", "S"}, {"column", columns[t]}}, i));
          break;
        case 1: log.events.push_back(copy_cell(columns[t], "1", fields[t], i)); break;
        case 2: log.events.push_back(paste_web(fields[t], "v", i)); break;
        case 3: log.events.push_back(web_event(UiType::EditField, fields[t], "x", i)); break;
        default:
          log.events.push_back(make_event(UiType::ClickButton,
                                          {{"url", "u"}, {"name", "n"}, {"id", "i"},
                                           {"type", "button"}},
                                          i));
      }
    }
    UiLog out = run_filter_fixpoint(
        log, {FilterRule::RemoveSelections, FilterRule::RemoveDanglingCopies});
    CHECK(is_subsequence(out.events, log.events));
    CHECK(out.events.size() <= log.events.size());
  }
}

TEST_CASE("rule order does not change the fixpoint") {
  std::mt19937 rng(13);
  std::uniform_int_distribution<int> length(0, 30);
  std::uniform_int_distribution<int> kind(0, 4);
  std::uniform_int_distribution<int> target(0, 1);
  static const char* fields[] = {"a", "b"};
  static const char* columns[] = {"A", "B"};

  const std::vector<std::vector<FilterRule>> orders = {
      {FilterRule::RemoveSelections, FilterRule::RemoveDanglingCopies,
       FilterRule::RemoveOverwrittenEdits},
      {FilterRule::RemoveSelections, FilterRule::RemoveOverwrittenEdits,
       FilterRule::RemoveDanglingCopies},
      {FilterRule::RemoveDanglingCopies, FilterRule::RemoveSelections,
       FilterRule::RemoveOverwrittenEdits},
      {FilterRule::RemoveDanglingCopies, FilterRule::RemoveOverwrittenEdits,
       FilterRule::RemoveSelections},
      {FilterRule::RemoveOverwrittenEdits, FilterRule::RemoveSelections,
       FilterRule::RemoveDanglingCopies},
      {FilterRule::RemoveOverwrittenEdits, FilterRule::RemoveDanglingCopies,
       FilterRule::RemoveSelections},
  };

  for (int round = 0; round < 150; ++round) {
    UiLog log;
    int n = length(rng);
    for (int i = 0; i < n; ++i) {
      int t = target(rng);
      switch (kind(rng)) {
        case 0:
          log.events.push_back(make_event(
              UiType::SelectField, {{"url", "u"}, {"name", fields[t]}, {"id", fields[t]}}, i));
          break;
        case 1: log.events.push_back(copy_cell(columns[t], "1", "v", i)); break;
        case 2: log.events.push_back(paste_web(fields[t], "v", i)); break;
        case 3: log.events.push_back(web_event(UiType::EditField, fields[t], "x", i)); break;
        default: log.events.push_back(web_event(UiType::EditField, fields[t], "y", i));
      }
    }
    UiLog first = run_filter_fixpoint(log, orders[0]);
    for (std::size_t o = 1; o < orders.size(); ++o) {
      CHECK(run_filter_fixpoint(log, orders[o]) == first);
    }
  }
}

TEST_CASE("fixture reduces to the expected preprocessed multiset") {
  // 49 events: 17 selections and one dangling copy go; the overwritten
  // status edit goes once segments are known (covered in test_pipeline).
  UiLog out = run_filter_fixpoint(
      fixture(), {FilterRule::RemoveSelections, FilterRule::RemoveDanglingCopies});
  CHECK(out.events.size() == 31);
}
