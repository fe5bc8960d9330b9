#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "json.hpp"

#include "jtd/bounds.hpp"
#include "jtd/decoder.hpp"
#include "jtd/harness.hpp"
#include "jtd/model.hpp"

namespace jtd {

using Json = nlohmann::json;

/// Instances whose matrix has more entries than this are written by seed only.
inline constexpr std::uint64_t kInlineMatrixLimit = 4096;

/// {"n","m","l","sigma2","seed","matrix_seed","support","values","y"} plus
/// "matrix" (row-major) when the matrix is small or has no seed.
Json instance_to_json(const ProblemInstance& inst, std::uint64_t inline_limit = kInlineMatrixLimit);

/// Inverse of instance_to_json; regenerates A from matrix_seed when "matrix"
/// is absent. Throws kInvalidConfig on malformed or inconsistent documents.
ProblemInstance instance_from_json(const Json& doc);

Json decode_result_to_json(const DecodeResult& result);
Json regime_to_json(const RegimeReport& report);
RegimeReport regime_from_json(const Json& doc);
Json bounds_to_json(const BoundValues& bounds);

/// Experiment identity only (parallelism and output_format are omitted).
Json config_to_json(const ExperimentConfig& config);

/// Accepts every ExperimentConfig field; unknown keys are rejected with kInvalidConfig.
ExperimentConfig config_from_json(const Json& doc);

Json report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const Json& doc);

/// Shortest decimal that round-trips; empty for non-finite values.
std::string format_double(double value);

/// JSON: the full report. CSV: one row per trial and a final summary row.
void emit_report(const ExperimentReport& report, OutputFormat format, std::ostream& out);
void emit_report(const ExperimentReport& report, OutputFormat format, const std::filesystem::path& path);

Json read_json_file(const std::filesystem::path& path);

}  // namespace jtd
