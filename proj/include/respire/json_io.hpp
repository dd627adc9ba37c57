#pragma once

// nlohmann::json conversions for configuration structs shared by the model,
// trace and report files.

#include <json.hpp>

#include "respire/ensemble.hpp"
#include "respire/mfcc.hpp"
#include "respire/model.hpp"
#include "respire/svm.hpp"
#include "respire/tree.hpp"

namespace respire::mfcc {
void to_json(nlohmann::json& j, const MfccConfig& cfg);
void from_json(const nlohmann::json& j, MfccConfig& cfg);
}  // namespace respire::mfcc

namespace respire::learners {
void to_json(nlohmann::json& j, const SvmConfig& cfg);
void from_json(const nlohmann::json& j, SvmConfig& cfg);
void to_json(nlohmann::json& j, const TreeConfig& cfg);
void from_json(const nlohmann::json& j, TreeConfig& cfg);
void to_json(nlohmann::json& j, const BaggingConfig& cfg);
void from_json(const nlohmann::json& j, BaggingConfig& cfg);
void to_json(nlohmann::json& j, const AdaBoostConfig& cfg);
void from_json(const nlohmann::json& j, AdaBoostConfig& cfg);
// Only the block for spec.kind is written; the others keep their defaults on read.
void to_json(nlohmann::json& j, const LearnerSpec& spec);
void from_json(const nlohmann::json& j, LearnerSpec& spec);
}  // namespace respire::learners
