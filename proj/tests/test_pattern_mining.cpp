#include "rpmine/pattern_mining.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rpmine/error.hpp"

using namespace rpmine;
using namespace rpmine::testing;

namespace {

ActionKey K(const std::string& s) { return ActionKey("navigateTo[" + s + "]"); }

std::vector<ActionKey> keys(const std::vector<std::string>& symbols) {
  std::vector<ActionKey> out;
  for (const auto& s : symbols) out.push_back(K(s));
  return out;
}

std::vector<std::vector<ActionKey>> random_segments(std::mt19937& rng, std::size_t max_segments,
                                                    std::size_t max_length,
                                                    std::size_t alphabet) {
  std::uniform_int_distribution<std::size_t> n_seg(1, max_segments);
  std::uniform_int_distribution<std::size_t> n_len(1, max_length);
  std::uniform_int_distribution<std::size_t> sym(0, alphabet - 1);
  static const char* names[] = {"a", "b", "c", "d", "e"};
  std::vector<std::vector<ActionKey>> segments(n_seg(rng));
  for (auto& segment : segments) {
    std::size_t len = n_len(rng);
    for (std::size_t i = 0; i < len; ++i) segment.push_back(K(names[sym(rng)]));
  }
  return segments;
}

}  // namespace

TEST_CASE("a shared gapped pattern reaches full support") {
  std::vector<std::vector<ActionKey>> segments = {
      keys({"u1", "uy", "u2", "u3"}),
      keys({"u1", "u2", "ux", "u3"}),
      keys({"u1", "ux", "u2", "u3"}),
  };
  auto patterns = mine_closed_patterns(segments, 0.9);
  bool found = false;
  for (const auto& p : patterns) {
    if (p.symbols == keys({"u1", "u2", "u3"})) {
      found = true;
      CHECK(p.support == doctest::Approx(1.0));
      CHECK(p.support_count == 3);
    }
  }
  CHECK(found);
}

TEST_CASE("a single segment closes to itself") {
  std::vector<std::vector<ActionKey>> segments = {keys({"a", "b", "c"})};
  auto patterns = mine_closed_patterns(segments, 1.0);
  REQUIRE(patterns.size() == 1);
  CHECK(patterns[0].symbols == keys({"a", "b", "c"}));
  CHECK(patterns[0].support == doctest::Approx(1.0));
}

TEST_CASE("miner equals exhaustive closed enumeration on random inputs") {
  std::mt19937 rng(211);
  for (int round = 0; round < 200; ++round) {
    auto segments = random_segments(rng, 8, 6, 5);
    auto fast = mine_closed_patterns(segments, 0.25);
    auto slow = brute_closed_patterns(segments, 0.25);
    REQUIRE(fast.size() == slow.size());
    for (std::size_t i = 0; i < fast.size(); ++i) {
      CHECK(fast[i].symbols == slow[i].symbols);
      CHECK(fast[i].support_count == slow[i].support_count);
    }
  }
}

TEST_CASE("every prefix of a mined pattern is at least as frequent") {
  std::mt19937 rng(223);
  auto contains = [](const std::vector<ActionKey>& pattern, const std::vector<ActionKey>& seg) {
    std::size_t at = 0;
    for (const auto& s : seg) {
      if (at < pattern.size() && pattern[at] == s) ++at;
    }
    return at == pattern.size();
  };
  for (int round = 0; round < 60; ++round) {
    auto segments = random_segments(rng, 6, 6, 4);
    for (const auto& p : mine_closed_patterns(segments, 0.3)) {
      for (std::size_t cut = 1; cut < p.symbols.size(); ++cut) {
        std::vector<ActionKey> prefix(p.symbols.begin(),
                                      p.symbols.begin() + static_cast<std::ptrdiff_t>(cut));
        std::size_t count = 0;
        for (const auto& seg : segments) {
          if (contains(prefix, seg)) ++count;
        }
        CHECK(count >= p.support_count);
      }
    }
  }
}

TEST_CASE("greedy leftmost matching") {
  CHECK(match_occurrences(keys({"a", "b"}), keys({"a", "x", "a", "b"})) ==
        std::vector<std::size_t>{0, 3});
  CHECK(match_occurrences(keys({"a", "b"}), keys({"a", "b"})) ==
        std::vector<std::size_t>{0, 1});
  CHECK_THROWS_AS(match_occurrences(keys({"b", "a"}), keys({"a", "b"})), Error);
}

TEST_CASE("scores follow the stated formulas") {
  SequentialPattern p;
  p.symbols = keys({"a", "b", "c"});
  p.support_count = 3;
  p.support = 1.0;
  // Gap counts 1, 1 and 0 give a median of 1.
  p.occurrences = {{0, {0, 2, 3}}, {1, {1, 2, 5}}, {2, {0, 1, 2}}};
  PatternScore s = score_pattern(p, 20);
  CHECK(s.length == 3);
  CHECK(s.frequency == 3);
  CHECK(s.cohesion == doctest::Approx(2.0));
  CHECK(s.coverage == doctest::Approx(9.0 / 20.0));

  SUBCASE("contiguous occurrences give cohesion equal to length") {
    p.occurrences = {{0, {0, 1, 2}}, {1, {3, 4, 5}}};
    CHECK(score_pattern(p, 20).cohesion == doctest::Approx(3.0));
  }
  SUBCASE("full coverage") {
    p.occurrences = {{0, {0, 1, 2}}, {1, {0, 1, 2}}};
    CHECK(score_pattern(p, 6).coverage == doctest::Approx(1.0));
  }
}

TEST_CASE("ranking breaks ties deterministically") {
  SequentialPattern ab;
  ab.symbols = keys({"a", "b"});
  ab.support_count = 2;
  ab.occurrences = {{0, {0, 1}}, {1, {0, 1}}};
  SequentialPattern ba;
  ba.symbols = keys({"b", "a"});
  ba.support_count = 2;
  ba.occurrences = {{0, {2, 3}}, {1, {2, 3}}};
  std::vector<SequentialPattern> patterns{ba, ab};
  rank_patterns(patterns, RankCriterion::Cohesion, 8);
  CHECK(patterns[0].symbols == ab.symbols);  // lexicographic fallback
}

namespace {

UiLog symbolic_filtered(const std::vector<std::string>& symbols) {
  UiLog log;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    UiEvent e;
    e.type = UiType::NavigateTo;
    e.timestamp_ms = static_cast<std::int64_t>(i);
    e.params = {{"url", symbols[i]}};
    log.events.push_back(std::move(e));
  }
  return log;
}

struct ExtractionSetup {
  UiLog filtered;
  std::vector<NormalizedEvent> norm;
  std::vector<std::vector<std::size_t>> segments;
};

ExtractionSetup make_setup(const std::vector<std::vector<std::string>>& segment_symbols) {
  ExtractionSetup setup;
  std::vector<std::string> flat;
  for (const auto& seg : segment_symbols) {
    std::vector<std::size_t> indices;
    for (const auto& s : seg) {
      indices.push_back(flat.size());
      flat.push_back(s);
    }
    setup.segments.push_back(std::move(indices));
  }
  setup.filtered = symbolic_filtered(flat);
  setup.norm = normalize(setup.filtered, ContextSchema::default_schema());
  return setup;
}

}  // namespace

TEST_CASE("extraction returns disjoint instances and terminates") {
  auto setup = make_setup({{"s", "a", "b", "e"},
                           {"s", "a", "x", "b", "e"},
                           {"s", "a", "b", "e"}});
  auto candidates = extract_candidates(setup.filtered, setup.norm, setup.segments, 0.5, 0.01,
                                       RankCriterion::Cohesion);
  REQUIRE(!candidates.empty());
  CHECK(candidates[0].pattern.symbols == keys({"s", "a", "b", "e"}));
  CHECK(candidates[0].instances.size() == 3);

  std::set<std::size_t> seen;
  for (const auto& c : candidates) {
    for (const auto& inst : c.instances) {
      for (std::size_t idx : inst.event_indices) {
        CHECK(seen.insert(idx).second);  // no index claimed twice
      }
      CHECK(inst.events.size() == c.pattern.symbols.size());
    }
  }
}

TEST_CASE("overlapping patterns extract into event-disjoint candidates") {
  // u1 and u4 belong to two overlapping frequent patterns; extraction must
  // hand each event to exactly one routine.
  auto setup = make_setup({{"u1", "uy", "u2", "u3", "ux", "u4"},
                           {"u1", "uy", "u2", "ux", "u3", "u4"},
                           {"u1", "ux", "u2", "u3", "u4"}});
  auto candidates = extract_candidates(setup.filtered, setup.norm, setup.segments, 0.6, 0.01,
                                       RankCriterion::Cohesion);
  REQUIRE(!candidates.empty());
  std::set<std::size_t> seen;
  for (const auto& c : candidates) {
    for (const auto& inst : c.instances) {
      for (std::size_t idx : inst.event_indices) {
        CHECK(seen.insert(idx).second);
      }
    }
  }
  // Most cohesive first: the five-step pattern shared by the two uy-segments
  // (one gap) beats the three-segment backbone (two gaps).
  CHECK(candidates[0].pattern.symbols == keys({"u1", "uy", "u2", "u3", "u4"}));
  CHECK(candidates[0].instances.size() == 2);
}

TEST_CASE("empty segment list extracts nothing") {
  auto setup = make_setup({});
  CHECK(extract_candidates(setup.filtered, setup.norm, setup.segments, 0.5, 0.05,
                           RankCriterion::Cohesion)
            .empty());
}

TEST_CASE("repeated occurrences within a segment merge into one candidate") {
  // The first segment holds the pattern twice; the second pass must extend
  // the same candidate instead of inventing a duplicate.
  auto setup = make_setup({{"a", "b", "a", "b"}, {"a", "b"}});
  auto candidates = extract_candidates(setup.filtered, setup.norm, setup.segments, 0.9, 0.01,
                                       RankCriterion::Cohesion);
  REQUIRE(candidates.size() == 1);
  CHECK(candidates[0].pattern.symbols == keys({"a", "b"}));
  CHECK(candidates[0].instances.size() == 3);
}

TEST_CASE("coverage threshold stops extraction") {
  auto setup = make_setup({{"a", "b", "c", "x"}, {"a", "b", "c", "y"}});
  SUBCASE("best pattern below the bar: nothing extracted") {
    CHECK(extract_candidates(setup.filtered, setup.norm, setup.segments, 0.6, 0.9,
                             RankCriterion::Cohesion)
              .empty());
  }
  SUBCASE("above the bar: extracted, leftovers too rare to continue") {
    auto candidates = extract_candidates(setup.filtered, setup.norm, setup.segments, 0.6, 0.5,
                                         RankCriterion::Cohesion);
    REQUIRE(candidates.size() == 1);
    CHECK(candidates[0].pattern.symbols == keys({"a", "b", "c"}));
    CHECK(candidates[0].instances.size() == 2);
  }
}
