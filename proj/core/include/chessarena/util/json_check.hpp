#pragma once

#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace chessarena::util {

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws config_error naming the first key of `obj` not in `allowed`.
void require_known_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                        std::string_view where);

/// obj[key] converted to T, or config_error naming `where.key`.
template <typename T>
T required(const nlohmann::json& obj, std::string_view key, std::string_view where) {
  const std::string k(key);
  if (!obj.contains(k)) throw config_error(std::string(where) + "." + k + ": missing required key");
  try {
    return obj.at(k).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw config_error(std::string(where) + "." + k + ": wrong type");
  }
}

template <typename T>
T optional_or(const nlohmann::json& obj, std::string_view key, T fallback, std::string_view where) {
  const std::string k(key);
  if (!obj.contains(k) || obj.at(k).is_null()) return fallback;
  try {
    return obj.at(k).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw config_error(std::string(where) + "." + k + ": wrong type");
  }
}

}  // namespace chessarena::util
