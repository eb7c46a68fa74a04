#include "driftlab/dfr_window.hpp"

#include <stdexcept>
#include <string>

namespace driftlab {

RelationCounts extract_df_relations(const EventStream& s, std::size_t begin,
                                    std::size_t end) {
  RelationCounts counts;
  std::unordered_map<std::int32_t, std::int32_t> last_activity;
  for (std::size_t i = begin; i < end && i < s.size(); ++i) {
    const StreamEvent& e = s[i];
    auto it = last_activity.find(e.trace);
    if (it != last_activity.end()) {
      ++counts[DfRelation{it->second, e.activity}];
      it->second = e.activity;
    } else {
      last_activity.emplace(e.trace, e.activity);
    }
  }
  return counts;
}

WindowState::WindowState(const EventStream& s, std::size_t start, std::size_t size)
    : stream_(&s), start_(start), size_(size) {
  if (start + size > s.size())
    throw std::out_of_range("window [" + std::to_string(start) + ", " +
                            std::to_string(start + size) + ") exceeds stream of " +
                            std::to_string(s.size()) + " events");
  for (std::size_t i = start; i < start + size; ++i) insert_event(i);
}

void WindowState::insert_event(std::size_t index) {
  const StreamEvent& e = (*stream_)[index];
  auto& dq = per_trace_[e.trace];
  if (!dq.empty()) {
    const StreamEvent& pred = (*stream_)[dq.back()];
    ++counts_[DfRelation{pred.activity, e.activity}];
  }
  dq.push_back(index);
}

void WindowState::advance() {
  if (start_ + size_ >= stream_->size())
    throw std::out_of_range("cannot advance window past stream end");

  // Departing event: the window start. Its relation with its in-window
  // successor loses an endpoint.
  const std::size_t departing = start_;
  const StreamEvent& d = (*stream_)[departing];
  auto it = per_trace_.find(d.trace);
  auto& dq = it->second;  // departing event is always tracked
  dq.pop_front();
  if (dq.empty()) {
    per_trace_.erase(it);
  } else {
    const StreamEvent& succ = (*stream_)[dq.front()];
    const DfRelation r{d.activity, succ.activity};
    auto cit = counts_.find(r);
    if (--cit->second == 0) {
      counts_.erase(cit);
      excluded_.erase(r);  // nothing left to shadow; type is naturally novel again
    }
  }

  insert_event(start_ + size_);
  ++start_;
}

std::optional<DfRelation> WindowState::peek_new_relation() const {
  const std::size_t next = start_ + size_;
  if (next >= stream_->size())
    throw std::out_of_range("no event past the window to peek");
  const StreamEvent& e = (*stream_)[next];
  auto it = per_trace_.find(e.trace);
  if (it == per_trace_.end() || it->second.empty()) return std::nullopt;
  const StreamEvent& pred = (*stream_)[it->second.back()];
  return DfRelation{pred.activity, e.activity};
}

bool WindowState::is_novel(const DfRelation& r) const {
  if (excluded_.contains(r)) return true;
  auto it = counts_.find(r);
  return it == counts_.end() || it->second == 0;
}

void WindowState::exclude(const DfRelation& r) { excluded_.insert(r); }

}  // namespace driftlab
