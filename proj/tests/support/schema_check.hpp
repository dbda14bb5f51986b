#pragma once

// Structural validator for the subset of JSON Schema the shipped document
// schemas use: type (string or list), required, properties,
// additionalProperties (bool), items, enum.

#include <string>
#include <vector>

#include "json.hpp"

namespace osag_test {

inline bool type_matches(const nlohmann::json& value, const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "boolean") return value.is_boolean();
  if (type == "null") return value.is_null();
  if (type == "integer") return value.is_number_integer();
  if (type == "number") return value.is_number();
  return false;
}

inline void validate_schema(const nlohmann::json& value, const nlohmann::json& schema,
                            const std::string& path, std::vector<std::string>& errors) {
  if (schema.contains("type")) {
    const auto& type = schema.at("type");
    bool ok = false;
    if (type.is_string()) {
      ok = type_matches(value, type.get<std::string>());
    } else {
      for (const auto& t : type) ok = ok || type_matches(value, t.get<std::string>());
    }
    if (!ok) {
      errors.push_back(path + ": type mismatch, got " + value.dump().substr(0, 40));
      return;
    }
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& allowed : schema.at("enum")) ok = ok || allowed == value;
    if (!ok) errors.push_back(path + ": value not in enum");
  }
  if (value.is_object()) {
    if (schema.contains("required"))
      for (const auto& key : schema.at("required"))
        if (!value.contains(key.get<std::string>()))
          errors.push_back(path + ": missing required key '" + key.get<std::string>() + "'");
    const bool closed = schema.contains("additionalProperties") &&
                        schema.at("additionalProperties") == false;
    for (const auto& [key, child] : value.items()) {
      if (schema.contains("properties") && schema.at("properties").contains(key)) {
        validate_schema(child, schema.at("properties").at(key), path + "." + key, errors);
      } else if (closed) {
        errors.push_back(path + ": unexpected key '" + key + "'");
      }
    }
  }
  if (value.is_array() && schema.contains("items")) {
    int index = 0;
    for (const auto& item : value) {
      validate_schema(item, schema.at("items"), path + "[" + std::to_string(index) + "]",
                      errors);
      ++index;
    }
  }
}

inline std::vector<std::string> schema_errors(const nlohmann::json& value,
                                              const nlohmann::json& schema) {
  std::vector<std::string> errors;
  validate_schema(value, schema, "$", errors);
  return errors;
}

}  // namespace osag_test
