#include "driftlab/model_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace driftlab {

namespace {

const char* kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::activity: return "activity";
    case NodeKind::sequence: return "sequence";
    case NodeKind::choice: return "choice";
    case NodeKind::parallel: return "parallel";
    case NodeKind::loop: return "loop";
    case NodeKind::skip: return "skip";
  }
  return "unknown";
}

NodeKind kind_from_name(const std::string& name) {
  if (name == "activity") return NodeKind::activity;
  if (name == "sequence") return NodeKind::sequence;
  if (name == "choice") return NodeKind::choice;
  if (name == "parallel") return NodeKind::parallel;
  if (name == "loop") return NodeKind::loop;
  if (name == "skip") return NodeKind::skip;
  throw std::invalid_argument("unknown model node kind: " + name);
}

nlohmann::json node_to_json(const ModelNode& n) {
  nlohmann::json j;
  j["kind"] = kind_name(n.kind);
  if (n.kind == NodeKind::activity) {
    j["label"] = n.label;
    return j;
  }
  j["children"] = nlohmann::json::array();
  for (const auto& c : n.children) j["children"].push_back(node_to_json(c));
  if (n.kind == NodeKind::choice) j["probabilities"] = n.probabilities;
  if (n.kind == NodeKind::loop) j["repeat_probability"] = n.repeat_probability;
  if (n.kind == NodeKind::skip) j["skip_probability"] = n.skip_probability;
  return j;
}

ModelNode node_from_json(const nlohmann::json& j) {
  ModelNode n;
  n.kind = kind_from_name(j.at("kind").get<std::string>());
  if (n.kind == NodeKind::activity) {
    n.label = j.at("label").get<std::string>();
    return n;
  }
  for (const auto& c : j.at("children")) n.children.push_back(node_from_json(c));
  if (n.kind == NodeKind::choice)
    n.probabilities = j.at("probabilities").get<std::vector<double>>();
  if (n.kind == NodeKind::loop) n.repeat_probability = j.at("repeat_probability").get<double>();
  if (n.kind == NodeKind::skip) n.skip_probability = j.at("skip_probability").get<double>();
  return n;
}

}  // namespace

nlohmann::json model_to_json(const ProcessModel& m) {
  nlohmann::json j;
  j["root"] = node_to_json(m.root);
  return j;
}

ProcessModel model_from_json(const nlohmann::json& j) {
  ProcessModel m;
  m.root = node_from_json(j.contains("root") ? j.at("root") : j);
  m.validate();
  return m;
}

ProcessModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  nlohmann::json j;
  in >> j;
  return model_from_json(j);
}

void save_model_file(const ProcessModel& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << model_to_json(m).dump(2) << '\n';
}

nlohmann::json ground_truth_to_json(const GroundTruth& gt) {
  nlohmann::json j;
  j["drift_trace_indexes"] = gt.drift_trace_indexes;
  j["segment_descriptions"] = gt.segment_descriptions;
  return j;
}

GroundTruth ground_truth_from_json(const nlohmann::json& j) {
  GroundTruth gt;
  gt.drift_trace_indexes = j.at("drift_trace_indexes").get<std::vector<std::int64_t>>();
  if (j.contains("segment_descriptions"))
    gt.segment_descriptions = j.at("segment_descriptions").get<std::vector<std::string>>();
  return gt;
}

GroundTruth load_ground_truth_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  nlohmann::json j;
  in >> j;
  return ground_truth_from_json(j);
}

void save_ground_truth_file(const GroundTruth& gt, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << ground_truth_to_json(gt).dump(2) << '\n';
}

}  // namespace driftlab
