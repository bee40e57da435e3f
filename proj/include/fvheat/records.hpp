// records.hpp: Versioned JSON result records

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "fvheat/json.hpp"
#include "fvheat/types.hpp"

namespace fvheat::cli {

inline constexpr int kSchemaVersion = 1;

std::string code_version();

struct ResultRecord {
    int schema_version{kSchemaVersion};
    std::string kind;  // density | gf | kernels | cumulants | verify
    std::string code_version;
    nlohmann::json parameters = nlohmann::json::object();
    nlohmann::json values = nlohmann::json::object();
    nlohmann::json tolerances = nlohmann::json::object();
    std::optional<double> wall_time;  // seconds; left out of records meant to be reproducible

    bool operator==(const ResultRecord&) const = default;
};

ResultRecord make_record(std::string kind);

nlohmann::json to_json(const ResultRecord& r);
// Throws std::runtime_error on a missing field or an unsupported schema version.
ResultRecord record_from_json(const nlohmann::json& j);

void write_record(const std::filesystem::path& path, const ResultRecord& r);
ResultRecord read_record(const std::filesystem::path& path);

nlohmann::json complex_json(cplx z);
cplx complex_from_json(const nlohmann::json& j);
// Row-major list of [re, im] rows.
nlohmann::json matrix_json(const DenseOp& m);
DenseOp matrix_from_json(const nlohmann::json& j);

}  // namespace fvheat::cli
