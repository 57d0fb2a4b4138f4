#include "rpmine/preprocess.hpp"

#include <algorithm>

#include "rpmine/element_id.hpp"

namespace rpmine {

namespace {

using IndexList = std::vector<std::size_t>;

IndexList drop_selections(const UiLog& log, const IndexList& indices) {
  IndexList out;
  out.reserve(indices.size());
  for (std::size_t idx : indices) {
    if (!is_selection(log.events[idx].type)) out.push_back(idx);
  }
  return out;
}

IndexList drop_dangling_copies(const UiLog& log, const IndexList& indices) {
  std::vector<bool> keep(indices.size(), true);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (!is_copy(log.events[indices[i]].type)) continue;
    bool pasted = false;
    for (std::size_t j = i + 1; j < indices.size(); ++j) {
      UiType t = log.events[indices[j]].type;
      if (is_paste(t)) {
        pasted = true;
        break;
      }
      if (is_copy(t)) break;  // clipboard overwritten first
    }
    keep[i] = pasted;
  }
  IndexList out;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (keep[i]) out.push_back(indices[i]);
  }
  return out;
}

IndexList drop_overwritten_edits(const UiLog& log, const IndexList& indices) {
  std::vector<bool> keep(indices.size(), true);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const UiEvent& e = log.events[indices[i]];
    if (!is_edit(e.type)) continue;
    auto target = target_element(e);
    for (std::size_t j = i + 1; j < indices.size(); ++j) {
      const UiEvent& later = log.events[indices[j]];
      if (is_copy(later.type)) break;  // the edited value may have been read
      if (later.type == e.type && target_element(later) == target) {
        keep[i] = false;
        break;
      }
    }
  }
  IndexList out;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (keep[i]) out.push_back(indices[i]);
  }
  return out;
}

}  // namespace

std::vector<std::size_t> run_filter_fixpoint_indices(const UiLog& log,
                                                     const std::vector<FilterRule>& rules) {
  IndexList indices(log.events.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  while (true) {
    std::size_t before = indices.size();
    for (FilterRule rule : rules) {
      switch (rule) {
        case FilterRule::RemoveSelections:
          indices = drop_selections(log, indices);
          break;
        case FilterRule::RemoveDanglingCopies:
          indices = drop_dangling_copies(log, indices);
          break;
        case FilterRule::RemoveOverwrittenEdits:
          indices = drop_overwritten_edits(log, indices);
          break;
      }
    }
    if (indices.size() == before) break;
  }
  return indices;
}

namespace {

UiLog select_events(const UiLog& log, const IndexList& indices) {
  UiLog out;
  out.events.reserve(indices.size());
  for (std::size_t idx : indices) out.events.push_back(log.events[idx]);
  return out;
}

}  // namespace

UiLog filter_selections(const UiLog& log) {
  IndexList all(log.events.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return select_events(log, drop_selections(log, all));
}

UiLog filter_dangling_copies(const UiLog& log) {
  IndexList all(log.events.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return select_events(log, drop_dangling_copies(log, all));
}

std::vector<bool> overwritten_edits_keep_mask(const std::vector<UiEvent>& segment) {
  UiLog view;
  view.events = segment;
  IndexList all(segment.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  IndexList kept = drop_overwritten_edits(view, all);
  std::vector<bool> mask(segment.size(), false);
  for (std::size_t idx : kept) mask[idx] = true;
  return mask;
}

std::vector<UiEvent> filter_overwritten_edits(const std::vector<UiEvent>& segment) {
  std::vector<bool> mask = overwritten_edits_keep_mask(segment);
  std::vector<UiEvent> out;
  for (std::size_t i = 0; i < segment.size(); ++i) {
    if (mask[i]) out.push_back(segment[i]);
  }
  return out;
}

UiLog run_filter_fixpoint(const UiLog& log, const std::vector<FilterRule>& rules) {
  return select_events(log, run_filter_fixpoint_indices(log, rules));
}

}  // namespace rpmine
