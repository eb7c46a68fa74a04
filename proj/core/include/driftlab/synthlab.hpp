#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "driftlab/event_model.hpp"
#include "driftlab/rng.hpp"

namespace driftlab {

enum class NodeKind { activity, sequence, choice, parallel, loop, skip };

/**
 * @brief Block-structured process model node.
 *
 * activity: leaf emitting its label.
 * sequence: children in order.
 * choice:   one child, drawn from `probabilities`.
 * parallel: children sampled independently, interleaved uniformly at random.
 * loop:     body once, then again while a coin with repeat_probability hits.
 * skip:     body omitted with skip_probability.
 */
struct ModelNode {
  NodeKind kind = NodeKind::activity;
  std::string label;                    // activity leaves only
  std::vector<ModelNode> children;
  std::vector<double> probabilities;    // choice branches, sum to 1
  double repeat_probability = 0.0;      // loop, in (0,1)
  double skip_probability = 0.0;        // skip, in (0,1]

  bool operator==(const ModelNode&) const = default;
};

struct ProcessModel {
  ModelNode root;

  /// Throws std::invalid_argument on duplicate labels or out-of-range
  /// probabilities.
  void validate() const;
  std::vector<std::string> alphabet() const;

  bool operator==(const ProcessModel&) const = default;
};

/// One random walk of the block tree.
std::vector<std::string> sample_trace(const ProcessModel& m, Rng& rng);

/// Activity pair using labels; model-level counterpart of DfRelation.
using LabelPair = std::pair<std::string, std::string>;

/**
 * @brief Every directly-follows type some trace of the model can exhibit.
 *
 * Computed structurally (no sampling), exact for loops as well: one
 * repetition already realizes every junction type.
 */
std::set<LabelPair> reachable_df_types(const ProcessModel& m);

enum class PatternKind {
  serial_insert,          // insertion
  conditional_insert,     // insertion
  parallel_insert,        // insertion
  remove_fragment,        // insertion (inverse)
  swap_fragments,         // resequentialization
  sequentialize_parallel, // resequentialization
  parallelize_sequence,   // resequentialization
  loop_fragment,          // optionalization
  skip_fragment,          // optionalization
};

const char* pattern_name(PatternKind k);
PatternKind pattern_from_name(const std::string& name);
std::vector<PatternKind> all_pattern_kinds();

/**
 * @brief A control-flow change applied to a model.
 *
 * target/target2 are child-index paths from the root. payload carries fresh
 * activity labels for inserting kinds; probability parameterizes
 * conditional/loop/skip kinds.
 */
struct ChangePattern {
  PatternKind kind = PatternKind::serial_insert;
  std::vector<std::size_t> target;
  std::vector<std::size_t> target2;  // swap_fragments only
  std::vector<std::string> payload;
  double probability = 0.5;
};

/**
 * @brief Apply a change pattern, returning the altered model.
 *
 * Throws std::invalid_argument for invalid targets and for patterns that do
 * not change the reachable directly-follows type set ("undetectable
 * pattern") -- pure branching-frequency changes are rejected by design.
 */
ProcessModel apply_change_pattern(const ProcessModel& m, const ChangePattern& p);

/// Canonical pattern instance for the default targets of this model;
/// throws when the model offers no applicable target.
ChangePattern make_default_pattern(const ProcessModel& m, PatternKind kind);

/// Built-in base model used by the generator CLI and the evaluation runs.
ProcessModel default_base_model();

struct GroundTruth {
  std::vector<std::int64_t> drift_trace_indexes;  // strictly increasing
  std::vector<std::string> segment_descriptions;
};

/**
 * @brief Concatenate per-segment samples into one drifting log.
 *
 * Segment k contributes traces_per_segment traces of segments[k]; ground
 * truth marks the first trace index of every segment after the first.
 */
std::pair<EventLog, GroundTruth> generate_drift_log(
    const std::vector<ProcessModel>& segments, int traces_per_segment,
    std::uint64_t seed);

enum class NoiseMode {
  random_activity,   // insert a uniformly random alphabet activity
  duplicate_event,   // duplicate an existing event in place
};

/**
 * @brief Random event add/remove noise.
 *
 * Removes floor(remove_fraction*n) events uniformly (never emptying a
 * trace), then adds floor(add_fraction*n) events; n is the original event
 * count. Trace count and order are unchanged, so drift trace indexes stay
 * valid. Fractions must lie in [0,1).
 */
EventLog inject_noise(const EventLog& log, double add_fraction, double remove_fraction,
                      std::uint64_t seed, NoiseMode mode = NoiseMode::random_activity);

struct ScoreResult {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  std::vector<std::pair<std::int64_t, std::int64_t>> matches;  // (detected, actual)
};

/**
 * @brief Score detected against actual drift trace indexes.
 *
 * Greedy one-to-one matching in ascending order: each detection takes the
 * nearest unmatched actual within [t-et, t+et] (ties to the smaller index).
 * Both inputs must be sorted.
 */
ScoreResult score(const std::vector<std::int64_t>& detected,
                  const std::vector<std::int64_t>& actual, std::int64_t et);

}  // namespace driftlab
