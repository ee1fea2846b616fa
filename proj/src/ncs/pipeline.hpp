#pragma once

#include <string>

#include "json.hpp"

namespace ncs {

// End-to-end run: ingest -> triggers -> poison -> train -> eval -> defend,
// all stage seeds derived from the one root seed. Every output lands in
// out_dir; re-running with the same config is byte-identical.
struct PipelineOutputs {
  std::string train_path;
  std::string valid_path;
  std::string test_path;
  std::string triggers_path;
  std::string poisoned_path;
  std::string records_path;
  std::string model_path;
  std::string report_path;
  std::string embeddings_path;
  std::string defense_path;
  std::string manifest_path;
};

nlohmann::json load_pipeline_config(const std::string& path);

PipelineOutputs run_pipeline(const nlohmann::json& config,
                             const std::string& config_path,
                             const std::string& out_dir);

}  // namespace ncs
