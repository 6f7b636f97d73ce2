#pragma once

// Shared helpers for the YAML-backed input formats. Private to the core library.

#include <yaml-cpp/yaml.h>

#include <string>

#include "cogverify/types.hpp"

namespace cogverify::detail {

inline InputError yaml_error(const YAML::Node& node, const std::string& msg) {
    const auto mark = node.Mark();
    if (mark.is_null()) return InputError(msg);
    return InputError(msg, mark.line + 1, mark.column + 1);
}

template <typename T>
T yaml_as(const YAML::Node& node, const std::string& what) {
    if (!node || !node.IsScalar()) throw yaml_error(node, "expected a scalar for " + what);
    try {
        return node.as<T>();
    } catch (const YAML::BadConversion&) {
        throw yaml_error(node, "malformed value '" + node.Scalar() + "' for " + what);
    }
}

inline YAML::Node yaml_parse(const std::string& text) {
    try {
        return YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw InputError("syntax error: " + e.msg, e.mark.line + 1, e.mark.column + 1);
    }
}

inline const YAML::Node require(const YAML::Node& parent, const char* key) {
    const YAML::Node n = parent[key];
    if (!n) throw yaml_error(parent, std::string("missing section '") + key + "'");
    return n;
}

inline void require_sequence(const YAML::Node& n, const std::string& what, std::size_t size = 0) {
    if (!n.IsSequence()) throw yaml_error(n, what + " must be a list");
    if (size != 0 && n.size() != size)
        throw yaml_error(n, what + " must have " + std::to_string(size) + " entries");
}

}  // namespace cogverify::detail
