#pragma once

#include <filesystem>

#include <nlohmann/json_fwd.hpp>

#include "driftlab/synthlab.hpp"

namespace driftlab {

// Block-tree JSON: {"kind": ..., "label"/"children"/"probabilities"/
// "repeat_probability"/"skip_probability" as the kind requires}.
nlohmann::json model_to_json(const ProcessModel& m);
ProcessModel model_from_json(const nlohmann::json& j);
ProcessModel load_model_file(const std::filesystem::path& path);
void save_model_file(const ProcessModel& m, const std::filesystem::path& path);

nlohmann::json ground_truth_to_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(const nlohmann::json& j);
GroundTruth load_ground_truth_file(const std::filesystem::path& path);
void save_ground_truth_file(const GroundTruth& gt, const std::filesystem::path& path);

}  // namespace driftlab
