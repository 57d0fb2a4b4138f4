#include "rpmine/pattern_mining.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "rpmine/error.hpp"

namespace rpmine {

std::optional<RankCriterion> rank_criterion_from_name(std::string_view name) {
  if (name == "frequency") return RankCriterion::Frequency;
  if (name == "length") return RankCriterion::Length;
  if (name == "coverage") return RankCriterion::Coverage;
  if (name == "cohesion") return RankCriterion::Cohesion;
  return std::nullopt;
}

std::string_view rank_criterion_name(RankCriterion c) {
  switch (c) {
    case RankCriterion::Frequency: return "frequency";
    case RankCriterion::Length: return "length";
    case RankCriterion::Coverage: return "coverage";
    case RankCriterion::Cohesion: return "cohesion";
  }
  return "?";
}

std::optional<std::vector<std::size_t>> try_match(const std::vector<ActionKey>& pattern,
                                                  const std::vector<ActionKey>& segment) {
  std::vector<std::size_t> positions;
  positions.reserve(pattern.size());
  std::size_t at = 0;
  for (const auto& symbol : pattern) {
    while (at < segment.size() && !(segment[at] == symbol)) ++at;
    if (at == segment.size()) return std::nullopt;
    positions.push_back(at++);
  }
  return positions;
}

std::vector<std::size_t> match_occurrences(const std::vector<ActionKey>& pattern,
                                           const std::vector<ActionKey>& segment) {
  auto m = try_match(pattern, segment);
  if (!m) throw Error(ErrorCode::NoMatch, "pattern does not occur in the segment");
  return *m;
}

PatternScore score_pattern(const SequentialPattern& p, std::size_t working_event_count) {
  PatternScore s;
  s.frequency = p.support_count;
  s.length = p.symbols.size();

  std::size_t covered = 0;
  std::vector<double> gaps;
  gaps.reserve(p.occurrences.size());
  for (const auto& [segment, positions] : p.occurrences) {
    (void)segment;
    covered += positions.size();
    if (!positions.empty()) {
      std::size_t span = positions.back() - positions.front() + 1;
      gaps.push_back(static_cast<double>(span - positions.size()));
    }
  }
  s.coverage = working_event_count == 0
                   ? 0.0
                   : static_cast<double>(covered) / static_cast<double>(working_event_count);

  double median = 0.0;
  if (!gaps.empty()) {
    std::sort(gaps.begin(), gaps.end());
    std::size_t mid = gaps.size() / 2;
    median = (gaps.size() % 2 == 1) ? gaps[mid] : (gaps[mid - 1] + gaps[mid]) / 2.0;
  }
  s.cohesion = static_cast<double>(s.length) - median;
  return s;
}

void rank_patterns(std::vector<SequentialPattern>& patterns, RankCriterion criterion,
                   std::size_t working_event_count) {
  struct Keyed {
    double value;
    std::size_t length;
    std::size_t frequency;
    const SequentialPattern* p;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(patterns.size());
  for (const auto& p : patterns) {
    PatternScore s = score_pattern(p, working_event_count);
    double value = 0.0;
    switch (criterion) {
      case RankCriterion::Frequency: value = static_cast<double>(s.frequency); break;
      case RankCriterion::Length: value = static_cast<double>(s.length); break;
      case RankCriterion::Coverage: value = s.coverage; break;
      case RankCriterion::Cohesion: value = s.cohesion; break;
    }
    keyed.push_back({value, s.length, s.frequency, &p});
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.length != b.length) return a.length > b.length;
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.p->symbols < b.p->symbols;
  });
  std::vector<SequentialPattern> sorted;
  sorted.reserve(patterns.size());
  for (const auto& k : keyed) sorted.push_back(*k.p);
  patterns = std::move(sorted);
}

// --- Closed frequent pattern mining ------------------------------------------------

namespace {

// Depth-first projection-based search. A node's subtree is skipped when an
// already explored super-pattern has the identical projected database: every
// closed pattern below the node also occurs below that super-pattern.
// Extensions are visited in order of their earliest projected position so
// absorbing super-patterns are explored first.
class ClosedMiner {
 public:
  // Hard cap on explored nodes; logs that defeat the absorption pruning get
  // a clean failure instead of an unbounded run.
  static constexpr std::size_t kNodeBudget = 2'000'000;

  ClosedMiner(const std::vector<std::vector<int>>& db, std::size_t min_count, int alphabet)
      : db_(db), min_count_(min_count), alphabet_(alphabet) {}

  struct Mined {
    std::vector<int> symbols;
    std::vector<std::size_t> containing;  // segment indices, ascending
  };

  std::vector<Mined> run() {
    std::vector<std::pair<std::size_t, std::size_t>> root;  // (segment, next position)
    root.reserve(db_.size());
    for (std::size_t s = 0; s < db_.size(); ++s) root.emplace_back(s, 0);
    std::vector<int> prefix;
    expand(prefix, root);
    return std::move(found_);
  }

 private:
  using Projection = std::vector<std::pair<std::size_t, std::size_t>>;

  std::string projection_signature(const Projection& proj) const {
    std::string sig;
    sig.reserve(proj.size() * 8);
    for (const auto& [seg, pos] : proj) {
      sig += std::to_string(seg);
      sig.push_back(':');
      sig += std::to_string(pos);
      sig.push_back(';');
    }
    return sig;
  }

  static bool subsequence(const std::vector<int>& small, const std::vector<int>& big) {
    std::size_t at = 0;
    for (int sym : big) {
      if (at < small.size() && small[at] == sym) ++at;
    }
    return at == small.size();
  }

  void expand(std::vector<int>& prefix, const Projection& proj) {
    // Earliest next occurrence of each symbol per projected segment.
    struct Ext {
      std::size_t count = 0;
      std::size_t min_pos = static_cast<std::size_t>(-1);
      Projection proj;
    };
    std::vector<Ext> ext(static_cast<std::size_t>(alphabet_));
    for (const auto& [seg, start] : proj) {
      const auto& seq = db_[seg];
      std::vector<bool> seen(static_cast<std::size_t>(alphabet_), false);
      for (std::size_t i = start; i < seq.size(); ++i) {
        auto sym = static_cast<std::size_t>(seq[i]);
        if (seen[sym]) continue;
        seen[sym] = true;
        ext[sym].count += 1;
        ext[sym].min_pos = std::min(ext[sym].min_pos, i);
        ext[sym].proj.emplace_back(seg, i + 1);
      }
    }

    std::vector<int> order;
    for (int sym = 0; sym < alphabet_; ++sym) {
      if (ext[static_cast<std::size_t>(sym)].count >= min_count_) order.push_back(sym);
    }
    std::sort(order.begin(), order.end(), [&ext](int a, int b) {
      const auto& ea = ext[static_cast<std::size_t>(a)];
      const auto& eb = ext[static_cast<std::size_t>(b)];
      if (ea.min_pos != eb.min_pos) return ea.min_pos < eb.min_pos;
      return a < b;
    });

    for (int sym : order) {
      auto& e = ext[static_cast<std::size_t>(sym)];
      prefix.push_back(sym);
      std::string sig = projection_signature(e.proj);
      auto [it, fresh] = explored_.try_emplace(std::move(sig));
      bool absorbed = false;
      if (!fresh) {
        for (const auto& owner : it->second) {
          if (owner.size() > prefix.size() && subsequence(prefix, owner)) {
            absorbed = true;
            break;
          }
        }
      }
      if (!absorbed) {
        if (found_.size() >= kNodeBudget) {
          throw std::runtime_error("closed-pattern search exceeded its node budget");
        }
        it->second.push_back(prefix);
        Mined m;
        m.symbols = prefix;
        m.containing.reserve(e.proj.size());
        for (const auto& [seg, pos] : e.proj) {
          (void)pos;
          m.containing.push_back(seg);
        }
        found_.push_back(std::move(m));
        expand(prefix, e.proj);
      }
      prefix.pop_back();
    }
  }

  const std::vector<std::vector<int>>& db_;
  std::size_t min_count_;
  int alphabet_;
  std::vector<Mined> found_;
  std::unordered_map<std::string, std::vector<std::vector<int>>> explored_;
};

}  // namespace

std::vector<SequentialPattern> mine_closed_patterns(
    const std::vector<std::vector<ActionKey>>& segments, double min_support) {
  assert(min_support > 0.0 && min_support <= 1.0);
  std::vector<SequentialPattern> result;
  if (segments.empty()) return result;

  // Intern keys so the search runs on small integers.
  std::map<ActionKey, int> symbol_ids;
  std::vector<const ActionKey*> symbols;
  std::vector<std::vector<int>> db(segments.size());
  for (std::size_t s = 0; s < segments.size(); ++s) {
    db[s].reserve(segments[s].size());
    for (const auto& key : segments[s]) {
      auto [it, fresh] = symbol_ids.try_emplace(key, static_cast<int>(symbol_ids.size()));
      if (fresh) symbols.push_back(&it->first);
      db[s].push_back(it->second);
    }
  }

  const auto min_count = static_cast<std::size_t>(
      std::max<double>(1.0, std::ceil(min_support * static_cast<double>(segments.size()) -
                                      1e-9)));
  ClosedMiner miner(db, min_count, static_cast<int>(symbol_ids.size()));
  auto mined = miner.run();

  // Keep the closed ones. A super-pattern with equal support contains the
  // pattern in exactly the same segments, so candidates group by their
  // containing-segment set; closed patterns always survive the search
  // pruning, hence every group holds the witnesses for its non-closed
  // members.
  std::unordered_map<std::string, std::vector<std::size_t>> groups;  // segment-set key
  auto containing_key = [](const std::vector<std::size_t>& segs) {
    std::string key;
    key.reserve(segs.size() * 4);
    for (std::size_t s : segs) {
      key += std::to_string(s);
      key.push_back(',');
    }
    return key;
  };
  for (std::size_t i = 0; i < mined.size(); ++i) {
    groups[containing_key(mined[i].containing)].push_back(i);
  }
  auto is_subsequence = [](const std::vector<int>& small, const std::vector<int>& big) {
    std::size_t at = 0;
    for (int sym : big) {
      if (at < small.size() && small[at] == sym) ++at;
    }
    return at == small.size();
  };
  std::vector<bool> closed(mined.size(), true);
  for (const auto& [key, members] : groups) {
    (void)key;
    for (std::size_t p : members) {
      for (std::size_t q : members) {
        if (mined[q].symbols.size() > mined[p].symbols.size() &&
            is_subsequence(mined[p].symbols, mined[q].symbols)) {
          closed[p] = false;
          break;
        }
      }
    }
  }

  const auto total = static_cast<double>(segments.size());
  for (std::size_t i = 0; i < mined.size(); ++i) {
    if (!closed[i]) continue;
    SequentialPattern p;
    p.symbols.reserve(mined[i].symbols.size());
    for (int id : mined[i].symbols) p.symbols.push_back(*symbols[static_cast<std::size_t>(id)]);
    p.support_count = mined[i].containing.size();
    p.support = static_cast<double>(p.support_count) / total;
    for (std::size_t seg : mined[i].containing) {
      auto m = try_match(p.symbols, segments[seg]);
      assert(m);
      p.occurrences.emplace_back(seg, std::move(*m));
    }
    result.push_back(std::move(p));
  }
  std::sort(result.begin(), result.end(),
            [](const SequentialPattern& a, const SequentialPattern& b) {
              return a.symbols < b.symbols;
            });
  return result;
}

// --- Candidate extraction --------------------------------------------------------

std::vector<CandidateRoutine> extract_candidates(
    const UiLog& filtered, const std::vector<NormalizedEvent>& norm,
    const std::vector<std::vector<std::size_t>>& segment_event_indices, double min_support,
    double min_coverage, RankCriterion criterion) {
  struct Cell {
    ActionKey key;
    std::size_t origin;
  };
  std::vector<std::vector<Cell>> working;
  for (const auto& indices : segment_event_indices) {
    std::vector<Cell> cells;
    cells.reserve(indices.size());
    for (std::size_t idx : indices) {
      cells.push_back({action_key(norm[idx]), norm[idx].origin_index});
    }
    if (!cells.empty()) working.push_back(std::move(cells));
  }

  std::vector<CandidateRoutine> candidates;
  while (!working.empty()) {
    std::vector<std::vector<ActionKey>> key_segments;
    std::size_t working_events = 0;
    key_segments.reserve(working.size());
    for (const auto& cells : working) {
      std::vector<ActionKey> keys;
      keys.reserve(cells.size());
      for (const auto& c : cells) keys.push_back(c.key);
      working_events += cells.size();
      key_segments.push_back(std::move(keys));
    }

    auto patterns = mine_closed_patterns(key_segments, min_support);
    if (patterns.empty()) break;
    rank_patterns(patterns, criterion, working_events);
    const SequentialPattern& best = patterns.front();
    if (score_pattern(best, working_events).coverage < min_coverage) break;

    // Materialize one instance per containing segment and drop those events.
    std::vector<RoutineInstance> instances;
    std::vector<std::vector<Cell>> next_working;
    for (std::size_t s = 0; s < working.size(); ++s) {
      auto embedding = try_match(best.symbols, key_segments[s]);
      if (!embedding) {
        next_working.push_back(working[s]);
        continue;
      }
      RoutineInstance instance;
      for (std::size_t pos : *embedding) {
        instance.event_indices.push_back(working[s][pos].origin);
        instance.events.push_back(filtered.events[working[s][pos].origin]);
      }
      instances.push_back(std::move(instance));

      std::vector<Cell> rest;
      rest.reserve(working[s].size() - embedding->size());
      std::size_t cursor = 0;
      for (std::size_t i = 0; i < working[s].size(); ++i) {
        if (cursor < embedding->size() && (*embedding)[cursor] == i) {
          ++cursor;
          continue;
        }
        rest.push_back(working[s][i]);
      }
      if (!rest.empty()) next_working.push_back(std::move(rest));
    }
    working = std::move(next_working);

    // Repeated extraction of the same pattern extends the earlier candidate,
    // so repeated occurrences within one segment end up in one routine.
    auto existing = std::find_if(candidates.begin(), candidates.end(),
                                 [&best](const CandidateRoutine& c) {
                                   return c.pattern.symbols == best.symbols;
                                 });
    if (existing != candidates.end()) {
      for (auto& inst : instances) existing->instances.push_back(std::move(inst));
    } else {
      CandidateRoutine routine;
      routine.pattern = best;
      routine.instances = std::move(instances);
      routine.discovery_order = candidates.size();
      candidates.push_back(std::move(routine));
    }
  }
  return candidates;
}

}  // namespace rpmine
