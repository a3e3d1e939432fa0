#pragma once

#include <filesystem>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <string_view>

#include "tgaicc/pipeline.hpp"

namespace tgaicc {

inline constexpr std::string_view kReportSchema = "tgaicc-report/1";

// Report JSON. Object keys are emitted sorted and arrays keep their
// deterministic order, so equal reports serialize to equal bytes.
nlohmann::json to_json(const EvalReport& report);
nlohmann::json to_json(const Explanation& explanation);

// Pretty-printed JSON with a trailing newline.
std::string serialize_report(const EvalReport& report);
void save_report(const std::filesystem::path& path, const EvalReport& report);

}  // namespace tgaicc
