// schema_check.hpp — test-only structural validator for the shipped schema
// documents (the subset of JSON Schema they use: type, required, properties,
// items, enum).

#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

namespace schema {

using json = nlohmann::json;

inline bool type_matches(const json& value, const std::string& t) {
    if (t == "object") return value.is_object();
    if (t == "array") return value.is_array();
    if (t == "number") return value.is_number();
    if (t == "string") return value.is_string();
    if (t == "boolean") return value.is_boolean();
    if (t == "null") return value.is_null();
    return false;
}

inline bool validate(const json& value, const json& sch, std::string* why = nullptr) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (sch.contains("type")) {
        const json& t = sch["type"];
        bool ok = false;
        if (t.is_string()) ok = type_matches(value, t.get<std::string>());
        else
            for (const auto& alt : t) ok = ok || type_matches(value, alt.get<std::string>());
        if (!ok) return fail("type mismatch: " + value.dump().substr(0, 60));
    }
    if (sch.contains("enum")) {
        bool ok = false;
        for (const auto& e : sch["enum"]) ok = ok || e == value;
        if (!ok) return fail("enum mismatch: " + value.dump().substr(0, 60));
    }
    if (value.is_object()) {
        if (sch.contains("required"))
            for (const auto& r : sch["required"])
                if (!value.contains(r.get<std::string>()))
                    return fail("missing required field " + r.get<std::string>());
        if (sch.contains("properties"))
            for (auto it = sch["properties"].begin(); it != sch["properties"].end(); ++it)
                if (value.contains(it.key()) && !validate(value[it.key()], it.value(), why))
                    return false;
    }
    if (value.is_array() && sch.contains("items"))
        for (const auto& el : value)
            if (!validate(el, sch["items"], why)) return false;
    return true;
}

inline json load(const std::string& path) {
    std::ifstream in(path);
    json j;
    in >> j;
    return j;
}

}  // namespace schema
