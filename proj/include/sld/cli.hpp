#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sld/constants.hpp"
#include "sld/model.hpp"
#include "sld/verify.hpp"

namespace sld::cli {

inline constexpr const char* kToolName = "sldlab";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kSchemaVersion = "1";
// Default output directory when neither --out nor the config provides one.
inline constexpr const char* kOutEnvVar = "SLDLAB_OUT";
inline constexpr const char* kOutFallback = "sldlab_out";

// Exit codes of the sldlab binary.
inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitSchema = 2;
inline constexpr int kExitBlowup = 3;

struct SchemaError : SldError {
  using SldError::SldError;
};
struct BlowupError : SldError {
  using SldError::SldError;
};

struct RunResult {
  int exit_code = kExitPass;
  std::vector<std::string> files;  // paths written, relative to the out dir
  std::string summary;             // human-readable table (also written to summary.txt)
};

// FNV-1a over the canonical (sorted-key) dump; recorded in the manifest so a
// rerun can prove it executed the same config.
uint64_t config_hash(const nlohmann::json& config);

nlohmann::json check_result_to_json(const verify::CheckResult& r);
nlohmann::json certificate_to_json(const constants::InequalityCertificate& c);

// Config-driven constructors (throw SchemaError on any malformed declaration).
model::PotentialSpec build_potential(const nlohmann::json& j);
model::DiffusionSpec build_spec(const nlohmann::json& j);

// Execute a parsed config, writing all result files under out_dir. Throws
// SchemaError / BlowupError; other SldError propagate as runtime failures.
RunResult run_config(nlohmann::json config, const std::string& out_dir);

// Full argv entry point used by the binary (and by subprocess tests).
int run_cli(int argc, char** argv);

}  // namespace sld::cli
