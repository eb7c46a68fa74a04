#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "driftlab/event_model.hpp"

namespace driftlab {

/// Ordered activity pair: source directly followed by target within one
/// trace. (A,A) is a legal length-one loop.
struct DfRelation {
  std::int32_t source = -1;
  std::int32_t target = -1;

  bool operator==(const DfRelation&) const = default;
};

struct DfRelationHash {
  std::size_t operator()(const DfRelation& r) const noexcept {
    std::uint64_t k =
        (std::uint64_t(std::uint32_t(r.source)) << 32) | std::uint32_t(r.target);
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    return std::size_t(k);
  }
};

using RelationCounts = std::unordered_map<DfRelation, std::int64_t, DfRelationHash>;
using RelationSet = std::unordered_set<DfRelation, DfRelationHash>;

/// Count directly-follows occurrences with BOTH endpoint events inside
/// [begin, end) of the stream.
RelationCounts extract_df_relations(const EventStream& s, std::size_t begin,
                                    std::size_t end);

/**
 * @brief Sliding reference window with an incrementally maintained
 * directly-follows multiset.
 *
 * relation_counts() always equals extract_df_relations over the current
 * window slice. The exclusion set suppresses failed drift candidates from
 * the novelty check without touching the counts; an excluded type is
 * evicted as soon as its last in-window occurrence slides out.
 *
 * Single-owner mutable state: one detector run per direction owns one
 * window.
 */
class WindowState {
 public:
  WindowState(const EventStream& s, std::size_t start, std::size_t size);

  std::size_t start() const { return start_; }
  std::size_t size() const { return size_; }

  /// Slide the window one event to the right; O(1) amortized.
  void advance();

  /// Relation brought by the event just past the window (index start+size):
  /// (most recent in-window same-trace activity, its activity). Nothing when
  /// the trace has no in-window predecessor.
  std::optional<DfRelation> peek_new_relation() const;

  /// True when r has no in-window occurrence or is excluded.
  bool is_novel(const DfRelation& r) const;

  /// Suppress a failed candidate from the novelty set; counts are untouched.
  void exclude(const DfRelation& r);

  const RelationCounts& relation_counts() const { return counts_; }
  const RelationSet& excluded() const { return excluded_; }
  std::size_t active_trace_count() const { return per_trace_.size(); }

 private:
  void insert_event(std::size_t index);

  const EventStream* stream_;
  std::size_t start_;
  std::size_t size_;
  RelationCounts counts_;
  RelationSet excluded_;
  // In-window event indices per trace, ascending. Front is the next to
  // depart, back feeds peek_new_relation.
  std::unordered_map<std::int32_t, std::deque<std::size_t>> per_trace_;
};

}  // namespace driftlab
