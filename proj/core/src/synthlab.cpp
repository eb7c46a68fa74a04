#include "driftlab/synthlab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <unordered_set>

namespace driftlab {

namespace {

void validate_node(const ModelNode& n, std::unordered_set<std::string>& labels) {
  switch (n.kind) {
    case NodeKind::activity:
      if (n.label.empty()) throw std::invalid_argument("activity node without label");
      if (!labels.insert(n.label).second)
        throw std::invalid_argument("duplicate activity label: " + n.label);
      if (!n.children.empty())
        throw std::invalid_argument("activity node cannot have children");
      return;
    case NodeKind::sequence:
    case NodeKind::parallel:
      if (n.children.empty())
        throw std::invalid_argument("sequence/parallel node needs children");
      break;
    case NodeKind::choice:
      if (n.children.size() < 2)
        throw std::invalid_argument("choice node needs at least two branches");
      if (n.probabilities.size() != n.children.size())
        throw std::invalid_argument("choice needs one probability per branch");
      {
        double sum = 0.0;
        for (double p : n.probabilities) {
          if (!(p > 0.0 && p < 1.0))
            throw std::invalid_argument("choice probabilities must lie in (0,1)");
          sum += p;
        }
        if (std::fabs(sum - 1.0) > 1e-9)
          throw std::invalid_argument("choice probabilities must sum to 1");
      }
      break;
    case NodeKind::loop:
      if (n.children.size() != 1)
        throw std::invalid_argument("loop node needs exactly one body child");
      if (!(n.repeat_probability > 0.0 && n.repeat_probability < 1.0))
        throw std::invalid_argument("loop repeat probability must lie in (0,1)");
      break;
    case NodeKind::skip:
      if (n.children.size() != 1)
        throw std::invalid_argument("skip node needs exactly one body child");
      if (!(n.skip_probability > 0.0 && n.skip_probability <= 1.0))
        throw std::invalid_argument("skip probability must lie in (0,1]");
      break;
  }
  for (const auto& child : n.children) validate_node(child, labels);
}

void collect_labels(const ModelNode& n, std::vector<std::string>& out) {
  if (n.kind == NodeKind::activity) out.push_back(n.label);
  for (const auto& c : n.children) collect_labels(c, out);
}

}  // namespace

void ProcessModel::validate() const {
  std::unordered_set<std::string> labels;
  validate_node(root, labels);
}

std::vector<std::string> ProcessModel::alphabet() const {
  std::vector<std::string> out;
  collect_labels(root, out);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void sample_node(const ModelNode& n, Rng& rng, std::vector<std::string>& out) {
  switch (n.kind) {
    case NodeKind::activity:
      out.push_back(n.label);
      return;
    case NodeKind::sequence:
      for (const auto& c : n.children) sample_node(c, rng, out);
      return;
    case NodeKind::choice: {
      double u = rng.uniform_real();
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        u -= n.probabilities[i];
        if (u < 0.0 || i + 1 == n.children.size()) {
          sample_node(n.children[i], rng, out);
          return;
        }
      }
      return;
    }
    case NodeKind::parallel: {
      std::vector<std::vector<std::string>> parts(n.children.size());
      for (std::size_t i = 0; i < n.children.size(); ++i)
        sample_node(n.children[i], rng, parts[i]);
      // Draw the next source proportional to remaining length: uniform over
      // all interleavings.
      std::vector<std::size_t> remaining(parts.size());
      std::size_t total = 0;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        remaining[i] = parts[i].size();
        total += remaining[i];
      }
      while (total > 0) {
        std::size_t pick = rng.uniform_index(total);
        for (std::size_t i = 0; i < parts.size(); ++i) {
          if (pick < remaining[i]) {
            out.push_back(parts[i][parts[i].size() - remaining[i]]);
            --remaining[i];
            --total;
            break;
          }
          pick -= remaining[i];
        }
      }
      return;
    }
    case NodeKind::loop:
      sample_node(n.children[0], rng, out);
      while (rng.bernoulli(n.repeat_probability)) sample_node(n.children[0], rng, out);
      return;
    case NodeKind::skip:
      if (!rng.bernoulli(n.skip_probability)) sample_node(n.children[0], rng, out);
      return;
  }
}

}  // namespace

std::vector<std::string> sample_trace(const ProcessModel& m, Rng& rng) {
  std::vector<std::string> out;
  sample_node(m.root, rng, out);
  return out;
}

namespace {

struct DfInfo {
  std::set<std::string> firsts;
  std::set<std::string> lasts;
  std::set<std::string> activities;
  std::set<LabelPair> dfs;
  bool can_be_empty = false;
};

DfInfo df_info(const ModelNode& n) {
  DfInfo info;
  switch (n.kind) {
    case NodeKind::activity:
      info.firsts = {n.label};
      info.lasts = {n.label};
      info.activities = {n.label};
      return info;
    case NodeKind::sequence: {
      info.can_be_empty = true;
      std::set<std::string> open_lasts;
      bool firsts_locked = false;
      for (const auto& child : n.children) {
        DfInfo ci = df_info(child);
        info.activities.insert(ci.activities.begin(), ci.activities.end());
        info.dfs.insert(ci.dfs.begin(), ci.dfs.end());
        for (const auto& l : open_lasts)
          for (const auto& f : ci.firsts) info.dfs.insert({l, f});
        if (!firsts_locked) {
          info.firsts.insert(ci.firsts.begin(), ci.firsts.end());
          if (!ci.can_be_empty) firsts_locked = true;
        }
        if (ci.can_be_empty) {
          open_lasts.insert(ci.lasts.begin(), ci.lasts.end());
        } else {
          open_lasts = ci.lasts;
        }
        info.can_be_empty = info.can_be_empty && ci.can_be_empty;
      }
      // Lasts: walk children right to left until one cannot be empty.
      for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) {
        DfInfo ci = df_info(*it);
        info.lasts.insert(ci.lasts.begin(), ci.lasts.end());
        if (!ci.can_be_empty) break;
      }
      return info;
    }
    case NodeKind::choice: {
      info.can_be_empty = false;
      bool any_empty = false;
      for (const auto& child : n.children) {
        DfInfo ci = df_info(child);
        info.firsts.insert(ci.firsts.begin(), ci.firsts.end());
        info.lasts.insert(ci.lasts.begin(), ci.lasts.end());
        info.activities.insert(ci.activities.begin(), ci.activities.end());
        info.dfs.insert(ci.dfs.begin(), ci.dfs.end());
        any_empty = any_empty || ci.can_be_empty;
      }
      info.can_be_empty = any_empty;
      return info;
    }
    case NodeKind::parallel: {
      info.can_be_empty = true;
      std::vector<DfInfo> children;
      for (const auto& child : n.children) children.push_back(df_info(child));
      for (const auto& ci : children) {
        info.firsts.insert(ci.firsts.begin(), ci.firsts.end());
        info.lasts.insert(ci.lasts.begin(), ci.lasts.end());
        info.activities.insert(ci.activities.begin(), ci.activities.end());
        info.dfs.insert(ci.dfs.begin(), ci.dfs.end());
        info.can_be_empty = info.can_be_empty && ci.can_be_empty;
      }
      // Any event of one branch can directly precede any event of another:
      // the interleaving can always schedule them adjacently.
      for (std::size_t i = 0; i < children.size(); ++i)
        for (std::size_t j = 0; j < children.size(); ++j) {
          if (i == j) continue;
          for (const auto& a : children[i].activities)
            for (const auto& b : children[j].activities) info.dfs.insert({a, b});
        }
      return info;
    }
    case NodeKind::loop: {
      DfInfo body = df_info(n.children[0]);
      info = body;
      for (const auto& l : body.lasts)
        for (const auto& f : body.firsts) info.dfs.insert({l, f});
      return info;
    }
    case NodeKind::skip: {
      info = df_info(n.children[0]);
      info.can_be_empty = true;
      return info;
    }
  }
  return info;
}

}  // namespace

std::set<LabelPair> reachable_df_types(const ProcessModel& m) {
  return df_info(m.root).dfs;
}

const char* pattern_name(PatternKind k) {
  switch (k) {
    case PatternKind::serial_insert: return "serial_insert";
    case PatternKind::conditional_insert: return "conditional_insert";
    case PatternKind::parallel_insert: return "parallel_insert";
    case PatternKind::remove_fragment: return "remove_fragment";
    case PatternKind::swap_fragments: return "swap_fragments";
    case PatternKind::sequentialize_parallel: return "sequentialize_parallel";
    case PatternKind::parallelize_sequence: return "parallelize_sequence";
    case PatternKind::loop_fragment: return "loop_fragment";
    case PatternKind::skip_fragment: return "skip_fragment";
  }
  return "unknown";
}

std::vector<PatternKind> all_pattern_kinds() {
  return {PatternKind::serial_insert,       PatternKind::conditional_insert,
          PatternKind::parallel_insert,     PatternKind::remove_fragment,
          PatternKind::swap_fragments,      PatternKind::sequentialize_parallel,
          PatternKind::parallelize_sequence, PatternKind::loop_fragment,
          PatternKind::skip_fragment};
}

PatternKind pattern_from_name(const std::string& name) {
  for (PatternKind k : all_pattern_kinds())
    if (name == pattern_name(k)) return k;
  throw std::invalid_argument("unknown change pattern: " + name);
}

namespace {

ModelNode* node_at(ModelNode& root, const std::vector<std::size_t>& path) {
  ModelNode* n = &root;
  for (std::size_t idx : path) {
    if (idx >= n->children.size()) return nullptr;
    n = &n->children[idx];
  }
  return n;
}

ModelNode* parent_of(ModelNode& root, const std::vector<std::size_t>& path) {
  if (path.empty()) return nullptr;
  std::vector<std::size_t> up(path.begin(), path.end() - 1);
  return node_at(root, up);
}

ModelNode activity_node(const std::string& label) {
  ModelNode n;
  n.kind = NodeKind::activity;
  n.label = label;
  return n;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

ProcessModel apply_change_pattern(const ProcessModel& m, const ChangePattern& p) {
  m.validate();
  ProcessModel out = m;
  ModelNode* target = node_at(out.root, p.target);
  require(target != nullptr, "pattern target path does not exist");

  const auto fresh_label = [&](std::size_t i) -> const std::string& {
    require(i < p.payload.size(), "pattern needs a payload label");
    return p.payload[i];
  };

  switch (p.kind) {
    case PatternKind::serial_insert: {
      ModelNode* parent = parent_of(out.root, p.target);
      require(parent && parent->kind == NodeKind::sequence,
              "serial_insert target must sit in a sequence");
      parent->children.insert(parent->children.begin() + std::ptrdiff_t(p.target.back()) + 1,
                              activity_node(fresh_label(0)));
      break;
    }
    case PatternKind::conditional_insert: {
      ModelNode* parent = parent_of(out.root, p.target);
      require(parent && parent->kind == NodeKind::sequence,
              "conditional_insert target must sit in a sequence");
      require(p.probability > 0.0 && p.probability < 1.0,
              "conditional_insert probability must lie in (0,1)");
      ModelNode skip;
      skip.kind = NodeKind::skip;
      skip.skip_probability = 1.0 - p.probability;  // executes with p.probability
      skip.children.push_back(activity_node(fresh_label(0)));
      parent->children.insert(parent->children.begin() + std::ptrdiff_t(p.target.back()) + 1,
                              std::move(skip));
      break;
    }
    case PatternKind::parallel_insert: {
      ModelNode fragment = *target;
      ModelNode par;
      par.kind = NodeKind::parallel;
      par.children.push_back(std::move(fragment));
      par.children.push_back(activity_node(fresh_label(0)));
      *target = std::move(par);
      break;
    }
    case PatternKind::remove_fragment: {
      ModelNode* parent = parent_of(out.root, p.target);
      require(parent && parent->kind == NodeKind::sequence,
              "remove_fragment target must sit in a sequence");
      require(parent->children.size() > 1, "cannot remove the only child of a sequence");
      parent->children.erase(parent->children.begin() + std::ptrdiff_t(p.target.back()));
      break;
    }
    case PatternKind::swap_fragments: {
      ModelNode* other = node_at(out.root, p.target2);
      require(other != nullptr, "pattern target2 path does not exist");
      require(p.target != p.target2, "swap_fragments needs two distinct targets");
      // Disallow nested targets; swapping a node with its ancestor is ill-formed.
      const auto is_prefix = [](const std::vector<std::size_t>& a,
                                const std::vector<std::size_t>& b) {
        if (a.size() > b.size()) return false;
        return std::equal(a.begin(), a.end(), b.begin());
      };
      require(!is_prefix(p.target, p.target2) && !is_prefix(p.target2, p.target),
              "swap_fragments targets must not be nested");
      std::swap(*target, *other);
      break;
    }
    case PatternKind::sequentialize_parallel: {
      require(target->kind == NodeKind::parallel,
              "sequentialize_parallel target must be a parallel block");
      target->kind = NodeKind::sequence;
      break;
    }
    case PatternKind::parallelize_sequence: {
      require(target->kind == NodeKind::sequence && target->children.size() >= 2,
              "parallelize_sequence target must be a sequence of two or more");
      target->kind = NodeKind::parallel;
      break;
    }
    case PatternKind::loop_fragment: {
      require(p.probability > 0.0 && p.probability < 1.0,
              "loop_fragment probability must lie in (0,1)");
      ModelNode body = *target;
      ModelNode loop;
      loop.kind = NodeKind::loop;
      loop.repeat_probability = p.probability;
      loop.children.push_back(std::move(body));
      *target = std::move(loop);
      break;
    }
    case PatternKind::skip_fragment: {
      require(p.probability > 0.0 && p.probability < 1.0,
              "skip_fragment probability must lie in (0,1)");
      ModelNode body = *target;
      ModelNode skip;
      skip.kind = NodeKind::skip;
      skip.skip_probability = p.probability;
      skip.children.push_back(std::move(body));
      *target = std::move(skip);
      break;
    }
  }

  out.validate();
  if (reachable_df_types(out) == reachable_df_types(m))
    throw std::invalid_argument(
        std::string("undetectable pattern: ") + pattern_name(p.kind) +
        " does not change the directly-follows type set");
  return out;
}

namespace {

// Index of the first sequence child path suitable as a generic fragment
// target: an activity in the root sequence, off the first position so
// removed/new relations sit mid-trace.
std::vector<std::size_t> default_fragment_path(const ProcessModel& m, NodeKind wanted,
                                               std::size_t nth = 0) {
  std::vector<std::size_t> found;
  std::vector<std::size_t> path;
  std::size_t seen = 0;
  const std::function<bool(const ModelNode&)> walk = [&](const ModelNode& n) -> bool {
    if (n.kind == wanted && !path.empty()) {
      if (seen == nth) {
        found = path;
        return true;
      }
      ++seen;
    }
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      path.push_back(i);
      if (walk(n.children[i])) return true;
      path.pop_back();
    }
    return false;
  };
  walk(m.root);
  return found;
}

}  // namespace

ChangePattern make_default_pattern(const ProcessModel& m, PatternKind kind) {
  m.validate();
  ChangePattern p;
  p.kind = kind;
  require(m.root.kind == NodeKind::sequence && m.root.children.size() >= 2,
          "default patterns need a sequence root with two or more children");

  switch (kind) {
    case PatternKind::serial_insert:
      p.target = {0};
      p.payload = {"X1"};
      break;
    case PatternKind::conditional_insert:
      p.target = {0};
      p.payload = {"X1"};
      p.probability = 0.9;  // execution probability of the inserted branch
      break;
    case PatternKind::parallel_insert:
      p.target = {1};
      p.payload = {"X1"};
      break;
    case PatternKind::remove_fragment:
      p.target = {1};
      break;
    case PatternKind::swap_fragments: {
      // Swap the second child with the last; both mainline.
      p.target = {1};
      p.target2 = {m.root.children.size() - 1};
      require(p.target != p.target2, "model too small to swap fragments");
      break;
    }
    case PatternKind::sequentialize_parallel: {
      p.target = default_fragment_path(m, NodeKind::parallel);
      require(!p.target.empty(), "model has no parallel block to sequentialize");
      break;
    }
    case PatternKind::parallelize_sequence: {
      p.target = default_fragment_path(m, NodeKind::sequence);
      require(!p.target.empty(), "model has no nested sequence to parallelize");
      break;
    }
    case PatternKind::loop_fragment:
      // High repeat probability so the loop junction dominates its windows;
      // a rare loop is statistically indistinguishable from noise at small
      // window sizes.
      p.target = {1};
      p.probability = 0.75;
      break;
    case PatternKind::skip_fragment:
      p.target = {1};
      p.probability = 0.5;
      break;
  }

  // Keep payload labels fresh relative to the model alphabet.
  if (!p.payload.empty()) {
    const auto alphabet = m.alphabet();
    std::size_t suffix = 1;
    for (auto& label : p.payload) {
      while (std::binary_search(alphabet.begin(), alphabet.end(),
                                "X" + std::to_string(suffix)))
        ++suffix;
      label = "X" + std::to_string(suffix);
      ++suffix;
    }
  }
  return p;
}

ProcessModel default_base_model() {
  // seq(A, B, xor{C 0.55 | D 0.45}, seq(E, F)): five events per trace over a
  // six-activity alphabet. Trace length is the knob that sets how many
  // traces a window holds, which drives the power of the window-pair tests;
  // five keeps a 150-event window at ~30 traces.
  ProcessModel m;
  m.root.kind = NodeKind::sequence;
  m.root.children.push_back(activity_node("A"));
  m.root.children.push_back(activity_node("B"));
  ModelNode choice;
  choice.kind = NodeKind::choice;
  choice.children.push_back(activity_node("C"));
  choice.children.push_back(activity_node("D"));
  choice.probabilities = {0.55, 0.45};
  m.root.children.push_back(std::move(choice));
  ModelNode tail;
  tail.kind = NodeKind::sequence;
  tail.children.push_back(activity_node("E"));
  tail.children.push_back(activity_node("F"));
  m.root.children.push_back(std::move(tail));
  m.validate();
  return m;
}

std::pair<EventLog, GroundTruth> generate_drift_log(
    const std::vector<ProcessModel>& segments, int traces_per_segment,
    std::uint64_t seed) {
  if (segments.size() < 2)
    throw std::invalid_argument("drift log generation needs at least two segments");
  if (traces_per_segment < 1)
    throw std::invalid_argument("traces_per_segment must be positive");
  for (const auto& m : segments) m.validate();

  EventLog log;
  GroundTruth truth;
  Rng rng(seed);
  std::int64_t trace_index = 0;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    if (k > 0) truth.drift_trace_indexes.push_back(trace_index);
    truth.segment_descriptions.push_back("segment " + std::to_string(k));
    for (int i = 0; i < traces_per_segment; ++i, ++trace_index) {
      Trace trace;
      trace.id = "t" + std::to_string(trace_index);
      for (auto& activity : sample_trace(segments[k], rng))
        trace.events.push_back(LogEvent{std::move(activity), std::nullopt});
      log.traces.push_back(std::move(trace));
    }
  }
  return {std::move(log), std::move(truth)};
}

EventLog inject_noise(const EventLog& log, double add_fraction, double remove_fraction,
                      std::uint64_t seed, NoiseMode mode) {
  if (!(add_fraction >= 0.0 && add_fraction < 1.0) ||
      !(remove_fraction >= 0.0 && remove_fraction < 1.0))
    throw std::invalid_argument("noise fractions must lie in [0, 1)");

  EventLog out = log;
  const std::size_t n = log.total_events();
  const std::size_t to_remove = std::size_t(std::floor(remove_fraction * double(n)));
  const std::size_t to_add = std::size_t(std::floor(add_fraction * double(n)));
  Rng rng(seed);

  // Removals: uniform over remaining events, redrawing any pick that would
  // empty its trace. Marks are resolved at the end so positions stay stable.
  if (to_remove > 0) {
    struct Slot {
      std::size_t trace;
      std::size_t position;
    };
    std::vector<Slot> alive;
    alive.reserve(n);
    std::vector<std::size_t> remaining(out.traces.size());
    std::vector<std::vector<bool>> removed(out.traces.size());
    for (std::size_t t = 0; t < out.traces.size(); ++t) {
      remaining[t] = out.traces[t].events.size();
      removed[t].assign(out.traces[t].events.size(), false);
      for (std::size_t p = 0; p < out.traces[t].events.size(); ++p)
        alive.push_back({t, p});
    }
    std::size_t done = 0;
    while (done < to_remove) {
      if (alive.empty())
        throw std::invalid_argument("cannot remove " + std::to_string(to_remove) +
                                    " events without emptying a trace");
      const std::size_t pick = rng.uniform_index(alive.size());
      const Slot slot = alive[pick];
      alive[pick] = alive.back();
      alive.pop_back();
      if (remaining[slot.trace] <= 1) continue;  // would empty the trace; redraw
      removed[slot.trace][slot.position] = true;
      --remaining[slot.trace];
      ++done;
    }
    for (std::size_t t = 0; t < out.traces.size(); ++t) {
      if (remaining[t] == out.traces[t].events.size()) continue;
      std::vector<LogEvent> kept;
      kept.reserve(remaining[t]);
      for (std::size_t p = 0; p < out.traces[t].events.size(); ++p)
        if (!removed[t][p]) kept.push_back(std::move(out.traces[t].events[p]));
      out.traces[t].events = std::move(kept);
    }
  }

  // Additions.
  if (to_add > 0) {
    if (out.traces.empty())
      throw std::invalid_argument("cannot add noise events to an empty log");
    const auto alphabet = log.alphabet();
    if (mode == NoiseMode::random_activity && alphabet.empty())
      throw std::invalid_argument("cannot draw noise activities from an empty alphabet");
    for (std::size_t i = 0; i < to_add; ++i) {
      if (mode == NoiseMode::random_activity) {
        auto& trace = out.traces[rng.uniform_index(out.traces.size())];
        const std::size_t position = rng.uniform_index(trace.events.size() + 1);
        LogEvent event;
        event.activity = alphabet[rng.uniform_index(alphabet.size())];
        trace.events.insert(trace.events.begin() + std::ptrdiff_t(position),
                            std::move(event));
      } else {
        // Duplicate a uniformly random existing event in place.
        std::size_t total = 0;
        for (const auto& t : out.traces) total += t.events.size();
        std::size_t pick = rng.uniform_index(total);
        for (auto& trace : out.traces) {
          if (pick < trace.events.size()) {
            LogEvent copy = trace.events[pick];
            trace.events.insert(trace.events.begin() + std::ptrdiff_t(pick) + 1,
                                std::move(copy));
            break;
          }
          pick -= trace.events.size();
        }
      }
    }
  }
  return out;
}

ScoreResult score(const std::vector<std::int64_t>& detected,
                  const std::vector<std::int64_t>& actual, std::int64_t et) {
  if (et < 0) throw std::invalid_argument("error tolerance must be non-negative");
  if (!std::is_sorted(detected.begin(), detected.end()) ||
      !std::is_sorted(actual.begin(), actual.end()))
    throw std::invalid_argument("score expects sorted inputs");

  ScoreResult result;
  std::vector<bool> used(actual.size(), false);
  for (const std::int64_t d : detected) {
    std::size_t best = actual.size();
    std::int64_t best_distance = et + 1;
    // Candidates lie in [d - et, d + et].
    auto lo = std::lower_bound(actual.begin(), actual.end(), d - et);
    for (auto it = lo; it != actual.end() && *it <= d + et; ++it) {
      const std::size_t j = std::size_t(it - actual.begin());
      if (used[j]) continue;
      const std::int64_t distance = std::llabs(*it - d);
      if (distance < best_distance) {
        best_distance = distance;
        best = j;
      }
    }
    if (best != actual.size()) {
      used[best] = true;
      ++result.tp;
      result.matches.push_back({d, actual[best]});
    } else {
      ++result.fp;
    }
  }
  result.fn = int(actual.size()) - result.tp;

  result.precision =
      result.tp + result.fp > 0 ? double(result.tp) / double(result.tp + result.fp) : 0.0;
  result.recall =
      result.tp + result.fn > 0 ? double(result.tp) / double(result.tp + result.fn) : 0.0;
  result.f_score = result.precision + result.recall > 0.0
                       ? 2.0 * result.precision * result.recall /
                             (result.precision + result.recall)
                       : 0.0;
  return result;
}

}  // namespace driftlab
