#pragma once

#include "gcm/error.hpp"
#include "gcm/matlib.hpp"

#include <json.hpp>

#include <cmath>
#include <initializer_list>
#include <limits>
#include <string>
#include <string_view>

namespace gcm::detail {

using json = nlohmann::json;

[[noreturn]] inline void schema_error(std::string_view where, const std::string& what) {
    throw Error(ErrorKind::Parse, std::string(where) + ": " + what);
}

inline json parse_json(std::string_view text, std::string_view where) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        schema_error(where, e.what());
    }
}

inline void expect_object(const json& j, std::string_view where) {
    if (!j.is_object()) {
        schema_error(where, "expected an object");
    }
}

/// Every required key present; nothing outside required + optional.
inline void expect_keys(const json& j, std::initializer_list<std::string_view> required,
                        std::initializer_list<std::string_view> optional, std::string_view where) {
    expect_object(j, where);
    for (auto key : required) {
        if (!j.contains(std::string(key))) {
            schema_error(where, "missing key '" + std::string(key) + "'");
        }
    }
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (auto k : required) known = known || key == k;
        for (auto k : optional) known = known || key == k;
        if (!known) {
            schema_error(where, "unknown key '" + key + "'");
        }
    }
}

inline json number(double x) {
    return std::isfinite(x) ? json(x) : json(nullptr);
}

inline double number_from(const json& j, std::string_view where) {
    if (j.is_null()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (!j.is_number()) {
        schema_error(where, "expected a number");
    }
    return j.get<double>();
}

inline json matrix_json(const Matrix& a) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            row.push_back(number(a(i, j)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from(const json& j, std::string_view where) {
    if (!j.is_array()) {
        schema_error(where, "expected an array of rows");
    }
    if (j.empty()) {
        return Matrix(0, 0);
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (!j[0].is_array()) {
        schema_error(where, "expected an array of rows");
    }
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Matrix a(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            schema_error(where, "rows must all have the same length");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            a(i, c) = number_from(row[static_cast<std::size_t>(c)], where);
        }
    }
    return a;
}

template <typename T>
T get_as(const json& j, std::string_view where) {
    try {
        return j.get<T>();
    } catch (const json::exception& e) {
        schema_error(where, e.what());
    }
}

}  // namespace gcm::detail

namespace gcm {

struct ExperimentConfig;

namespace detail {

ExperimentConfig experiment_config_from(const json& j);
json experiment_config_json(const ExperimentConfig& cfg);

}  // namespace detail
}  // namespace gcm
