// records.cpp: Result record serialization

#include "fvheat/records.hpp"

#include <fstream>
#include <stdexcept>

namespace fvheat::cli {

std::string code_version() { return FVHEAT_VERSION; }

ResultRecord make_record(std::string kind) {
    ResultRecord r;
    r.kind = std::move(kind);
    r.code_version = code_version();
    return r;
}

nlohmann::json to_json(const ResultRecord& r) {
    nlohmann::json j;
    j["schema_version"] = r.schema_version;
    j["kind"] = r.kind;
    j["code_version"] = r.code_version;
    j["parameters"] = r.parameters;
    j["values"] = r.values;
    j["tolerances"] = r.tolerances;
    if (r.wall_time) j["wall_time"] = *r.wall_time;
    return j;
}

ResultRecord record_from_json(const nlohmann::json& j) {
    for (const char* key : {"schema_version", "kind", "code_version", "parameters", "values", "tolerances"})
        if (!j.contains(key)) throw std::runtime_error(std::string("record: missing field '") + key + "'");
    ResultRecord r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kSchemaVersion)
        throw std::runtime_error("record: unsupported schema version " + std::to_string(r.schema_version));
    r.kind = j.at("kind").get<std::string>();
    r.code_version = j.at("code_version").get<std::string>();
    r.parameters = j.at("parameters");
    r.values = j.at("values");
    r.tolerances = j.at("tolerances");
    if (j.contains("wall_time")) r.wall_time = j.at("wall_time").get<double>();
    return r;
}

void write_record(const std::filesystem::path& path, const ResultRecord& r) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << to_json(r).dump(2) << '\n';
}

ResultRecord read_record(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return record_from_json(nlohmann::json::parse(in));
}

nlohmann::json complex_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

cplx complex_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2) throw std::runtime_error("record: complex values are [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

nlohmann::json matrix_json(const DenseOp& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

DenseOp matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty()) throw std::runtime_error("record: matrix must be a non-empty list of rows");
    const auto n_rows = static_cast<Eigen::Index>(j.size());
    const auto n_cols = static_cast<Eigen::Index>(j[0].size());
    DenseOp m(n_rows, n_cols);
    for (Eigen::Index r = 0; r < n_rows; ++r) {
        if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(r)].size()) != n_cols)
            throw std::runtime_error("record: ragged matrix");
        for (Eigen::Index c = 0; c < n_cols; ++c)
            m(r, c) = complex_from_json(j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
    }
    return m;
}

}  // namespace fvheat::cli
