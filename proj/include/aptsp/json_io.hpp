#pragma once

#include "aptsp/bounds.hpp"
#include "aptsp/evaluation.hpp"
#include "aptsp/instance.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace aptsp {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "aptsp/1";

Json instance_to_json(const Instance& inst);
/// Throws InvalidInput on missing fields or shape mismatches.
Instance instance_from_json(const Json& j);

Json tour_to_json(const Tour& tour);
Tour tour_from_json(const Json& j);

Json active_set_to_json(const ActiveSet& a);
ActiveSet active_set_from_json(const Json& j);

Json report_to_json(const ExpectedCostReport& r);

/// Rational fields are written as "num/den" strings; config values likewise.
Json certificate_to_json(const DualCertificate& cert);
/// Accepts numbers or rational strings for config values and multipliers.
DualCertificate certificate_from_json(const Json& j);

/// Exact value of a JSON number (shortest round-trip decimal) or rational string.
Rational rational_from_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace aptsp
