#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "arena/scene/geometry.hpp"

namespace arena::util {

// std::map-backed, so dump() always emits sorted keys.
using Json = nlohmann::json;

// Throws ParseError with a line:column diagnostic.
Json parse_json(std::string_view text, std::string_view what);

// Canonical text: sorted keys, 2-space indent, LF endings, trailing newline.
std::string canonical_dump(const Json& value);

// Lower-case identifiers: [a-z0-9_]+, no "--".
bool is_identifier(std::string_view s);
void require_identifier(std::string_view s, const std::string& where);

// Typed field access over one JSON object that records which keys were read
// so unknown keys can be rejected with a field path.
class FieldReader {
 public:
  FieldReader(const Json& object, std::string where);

  const Json* find(std::string_view key);
  const Json& required(std::string_view key);
  // Like required() but an explicit null counts as present.
  const Json& required_nullable(std::string_view key);
  std::string required_string(std::string_view key);
  std::optional<std::string> optional_string(std::string_view key);
  int64_t required_int(std::string_view key);
  std::optional<int64_t> optional_int(std::string_view key);
  std::optional<bool> optional_bool(std::string_view key);
  std::optional<double> optional_number(std::string_view key);
  const Json& required_array(std::string_view key);
  const Json& required_object(std::string_view key);

  void reject_unknown(std::initializer_list<std::string_view> also_allowed = {});

  std::string path(std::string_view key) const;
  const std::string& where() const { return where_; }

 private:
  const Json& object_;
  std::string where_;
  std::set<std::string, std::less<>> seen_;
};

scene::Cell parse_cell(const Json& value, const std::string& where);
Json cell_json(scene::Cell c);

}  // namespace arena::util
