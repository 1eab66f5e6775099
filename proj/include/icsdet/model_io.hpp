#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "icsdet/model.hpp"
#include "icsdet/types.hpp"

// ============================================================================
// JSON model files.
//
// {
//   "schema_version": 1,
//   "subsystems": [
//     {"i": 1, "A": [[...]], "C": [[...]], "B_attack": [[...]],
//      "Sigma_w": [[...]], "Sigma_v": [[...]]}
//   ],
//   "coupling": [
//     {"i": 1, "j": 2, "A_ij": [[...]]}
//   ]
// }
//
// Matrices are nested row-major arrays. Coupling entry {i, j} is the block
// through which subsystem j's state drives subsystem i.
// ============================================================================

namespace icsdet {

inline constexpr int kSchemaVersion = 1;

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& j, const std::string& name,
                                           const std::string& context) {
    const auto it = j.find(name);
    if (it == j.end()) {
        throw ValidationError("model file: missing field '" + name + "' in " + context);
    }
    return *it;
}

inline Matrix parse_matrix(const nlohmann::json& j, const std::string& context) {
    if (!j.is_array() || j.empty()) {
        throw ValidationError("model file: " + context + " must be a nonempty array of rows");
    }
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    Matrix out;
    for (std::size_t r = 0; r < rows; ++r) {
        const auto& row = j[r];
        if (!row.is_array() || row.empty()) {
            throw ValidationError("model file: " + context + " row " + std::to_string(r) +
                                  " must be a nonempty array of numbers");
        }
        if (r == 0) {
            cols = row.size();
            out.resize(static_cast<Index>(rows), static_cast<Index>(cols));
        } else if (row.size() != cols) {
            throw ValidationError("model file: " + context + " rows have inconsistent lengths");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            if (!row[c].is_number()) {
                throw ValidationError("model file: " + context + " entry (" + std::to_string(r) +
                                      ", " + std::to_string(c) + ") is not a number");
            }
            out(static_cast<Index>(r), static_cast<Index>(c)) = row[c].get<double>();
        }
    }
    return out;
}

inline nlohmann::json matrix_to_json(const Matrix& M) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index r = 0; r < M.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        rows.push_back(row);
    }
    return rows;
}

inline int parse_id(const nlohmann::json& j, const std::string& name,
                    const std::string& context) {
    const auto& field = require_field(j, name, context);
    if (!field.is_number_integer()) {
        throw ValidationError("model file: field '" + name + "' in " + context +
                              " must be an integer");
    }
    return field.get<int>();
}

}  // namespace detail

/// Build a model from parsed JSON. Throws ValidationError naming the
/// offending field on malformed input.
inline InterconnectedModel model_from_json(const nlohmann::json& j) {
    using detail::parse_matrix;
    using detail::require_field;

    const auto& version = require_field(j, "schema_version", "model root");
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion) {
        throw ValidationError("model file: unsupported schema_version (expected " +
                              std::to_string(kSchemaVersion) + ")");
    }
    const auto& subs = require_field(j, "subsystems", "model root");
    if (!subs.is_array() || subs.empty()) {
        throw ValidationError("model file: 'subsystems' must be a nonempty array");
    }

    std::vector<Subsystem> subsystems;
    subsystems.reserve(subs.size());
    for (std::size_t k = 0; k < subs.size(); ++k) {
        const std::string context = "subsystems[" + std::to_string(k) + "]";
        const auto& entry = subs[k];
        Subsystem s;
        s.id = detail::parse_id(entry, "i", context);
        s.A = parse_matrix(require_field(entry, "A", context), context + ".A");
        s.C = parse_matrix(require_field(entry, "C", context), context + ".C");
        s.B_attack =
            parse_matrix(require_field(entry, "B_attack", context), context + ".B_attack");
        s.Sigma_w =
            parse_matrix(require_field(entry, "Sigma_w", context), context + ".Sigma_w");
        s.Sigma_v =
            parse_matrix(require_field(entry, "Sigma_v", context), context + ".Sigma_v");
        subsystems.push_back(std::move(s));
    }

    CouplingMap coupling;
    if (const auto it = j.find("coupling"); it != j.end()) {
        if (!it->is_array()) {
            throw ValidationError("model file: 'coupling' must be an array");
        }
        for (std::size_t k = 0; k < it->size(); ++k) {
            const std::string context = "coupling[" + std::to_string(k) + "]";
            const auto& entry = (*it)[k];
            const int to = detail::parse_id(entry, "i", context);
            const int from = detail::parse_id(entry, "j", context);
            Matrix block =
                parse_matrix(require_field(entry, "A_ij", context), context + ".A_ij");
            if (!coupling.emplace(std::make_pair(to, from), std::move(block)).second) {
                throw ValidationError("model file: duplicate coupling entry (" +
                                      std::to_string(to) + ", " + std::to_string(from) + ")");
            }
        }
    }
    return InterconnectedModel(std::move(subsystems), std::move(coupling));
}

inline nlohmann::json model_to_json(const InterconnectedModel& model) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["subsystems"] = nlohmann::json::array();
    for (const auto& s : model.subsystems()) {
        nlohmann::json entry;
        entry["i"] = s.id;
        entry["A"] = detail::matrix_to_json(s.A);
        entry["C"] = detail::matrix_to_json(s.C);
        entry["B_attack"] = detail::matrix_to_json(s.B_attack);
        entry["Sigma_w"] = detail::matrix_to_json(s.Sigma_w);
        entry["Sigma_v"] = detail::matrix_to_json(s.Sigma_v);
        j["subsystems"].push_back(std::move(entry));
    }
    j["coupling"] = nlohmann::json::array();
    for (const auto& [pair, block] : model.coupling()) {
        nlohmann::json entry;
        entry["i"] = pair.first;
        entry["j"] = pair.second;
        entry["A_ij"] = detail::matrix_to_json(block);
        j["coupling"].push_back(std::move(entry));
    }
    return j;
}

inline InterconnectedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("model file: cannot open '" + path + "'");
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("model file: '" + path + "' is not valid JSON (" + e.what() + ")");
    }
    return model_from_json(j);
}

inline void save_model(const InterconnectedModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw ValidationError("model file: cannot write '" + path + "'");
    }
    out << model_to_json(model).dump(2) << "\n";
}

}  // namespace icsdet
