#include "arena/util/json.hpp"

#include "arena/error.hpp"

namespace arena::util {

namespace {

std::string line_col(std::string_view text, size_t byte) {
  size_t line = 1;
  size_t col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

}  // namespace

Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::kParseError, std::string(what) + " at " + line_col(text, e.byte) +
                                       ": malformed JSON");
  }
}

std::string canonical_dump(const Json& value) {
  // Replacement handler keeps arbitrary bytes from throwing mid-dump.
  return value.dump(2, ' ', false, Json::error_handler_t::replace) + "\n";
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return true;
}

void require_identifier(std::string_view s, const std::string& where) {
  if (!is_identifier(s)) {
    throw Error(Errc::kValidationError,
                where + ": '" + std::string(s) + "' is not a lower-case identifier [a-z0-9_]");
  }
}

FieldReader::FieldReader(const Json& object, std::string where)
    : object_(object), where_(std::move(where)) {
  if (!object_.is_object()) throw Error(Errc::kValidationError, where_ + ": expected an object");
}

std::string FieldReader::path(std::string_view key) const {
  return where_ + "." + std::string(key);
}

const Json* FieldReader::find(std::string_view key) {
  seen_.emplace(key);
  auto it = object_.find(std::string(key));
  if (it == object_.end() || it->is_null()) return nullptr;
  return &*it;
}

const Json& FieldReader::required(std::string_view key) {
  const Json* v = find(key);
  if (!v) throw Error(Errc::kValidationError, path(key) + ": missing required field");
  return *v;
}

const Json& FieldReader::required_nullable(std::string_view key) {
  seen_.emplace(key);
  auto it = object_.find(std::string(key));
  if (it == object_.end()) throw Error(Errc::kValidationError, path(key) + ": missing required field");
  return *it;
}

std::string FieldReader::required_string(std::string_view key) {
  const Json& v = required(key);
  if (!v.is_string()) throw Error(Errc::kValidationError, path(key) + ": expected a string");
  return v.get<std::string>();
}

std::optional<std::string> FieldReader::optional_string(std::string_view key) {
  const Json* v = find(key);
  if (!v) return std::nullopt;
  if (!v->is_string()) throw Error(Errc::kValidationError, path(key) + ": expected a string");
  return v->get<std::string>();
}

int64_t FieldReader::required_int(std::string_view key) {
  const Json& v = required(key);
  if (!v.is_number_integer()) {
    throw Error(Errc::kValidationError, path(key) + ": expected an integer");
  }
  return v.get<int64_t>();
}

std::optional<int64_t> FieldReader::optional_int(std::string_view key) {
  const Json* v = find(key);
  if (!v) return std::nullopt;
  if (!v->is_number_integer()) {
    throw Error(Errc::kValidationError, path(key) + ": expected an integer");
  }
  return v->get<int64_t>();
}

std::optional<bool> FieldReader::optional_bool(std::string_view key) {
  const Json* v = find(key);
  if (!v) return std::nullopt;
  if (!v->is_boolean()) throw Error(Errc::kValidationError, path(key) + ": expected a boolean");
  return v->get<bool>();
}

std::optional<double> FieldReader::optional_number(std::string_view key) {
  const Json* v = find(key);
  if (!v) return std::nullopt;
  if (!v->is_number()) throw Error(Errc::kValidationError, path(key) + ": expected a number");
  return v->get<double>();
}

const Json& FieldReader::required_array(std::string_view key) {
  const Json& v = required(key);
  if (!v.is_array()) throw Error(Errc::kValidationError, path(key) + ": expected an array");
  return v;
}

const Json& FieldReader::required_object(std::string_view key) {
  const Json& v = required(key);
  if (!v.is_object()) throw Error(Errc::kValidationError, path(key) + ": expected an object");
  return v;
}

void FieldReader::reject_unknown(std::initializer_list<std::string_view> also_allowed) {
  for (std::string_view k : also_allowed) seen_.emplace(k);
  for (auto it = object_.begin(); it != object_.end(); ++it) {
    if (!seen_.contains(it.key())) {
      throw Error(Errc::kValidationError, path(it.key()) + ": unknown field");
    }
  }
}

scene::Cell parse_cell(const Json& value, const std::string& where) {
  if (!value.is_array() || value.size() != 2 || !value[0].is_number_integer() ||
      !value[1].is_number_integer()) {
    throw Error(Errc::kValidationError, where + ": expected [x, y] integer pair");
  }
  const int64_t x = value[0].get<int64_t>();
  const int64_t y = value[1].get<int64_t>();
  if (x < -100000 || x > 100000 || y < -100000 || y > 100000) {
    throw Error(Errc::kValidationError, where + ": coordinate out of range");
  }
  return {static_cast<int>(x), static_cast<int>(y)};
}

Json cell_json(scene::Cell c) { return Json::array({c.x, c.y}); }

}  // namespace arena::util
