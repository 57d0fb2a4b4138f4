#pragma once

#include <vector>

#include "rpmine/log_model.hpp"

namespace rpmine {

enum class FilterRule {
  RemoveSelections = 1,      // drop selectCell / selectRange / selectField
  RemoveDanglingCopies = 2,  // drop copies never pasted before the next copy
  RemoveOverwrittenEdits = 3 // drop edits overwritten before any copy (per segment)
};

UiLog filter_selections(const UiLog& log);

UiLog filter_dangling_copies(const UiLog& log);

/// Segment-local rule: of two edits on the same element with no copy-group
/// event in between, the earlier one left no observable effect and is dropped.
std::vector<UiEvent> filter_overwritten_edits(const std::vector<UiEvent>& segment);

/// Applies the given rules repeatedly until a full pass removes nothing.
UiLog run_filter_fixpoint(const UiLog& log, const std::vector<FilterRule>& rules);

/// Index-tracking variant: positions (into log.events) of the survivors.
std::vector<std::size_t> run_filter_fixpoint_indices(const UiLog& log,
                                                     const std::vector<FilterRule>& rules);

/// Keep-mask form of the overwritten-edits rule, for callers tracking
/// positions themselves.
std::vector<bool> overwritten_edits_keep_mask(const std::vector<UiEvent>& segment);

}  // namespace rpmine
