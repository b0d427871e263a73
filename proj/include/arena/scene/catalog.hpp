#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arena/scene/properties.hpp"

namespace arena::scene {

struct Appearance {
  std::string shape;
  std::string color;
  std::string material;

  bool operator==(const Appearance&) const = default;
};

// How a receptacle holds what is placed in it: "in" links need the
// receptacle open when it is openable, "on" links never do.
enum class Containment : uint8_t { kOn, kIn };

struct ObjectClass {
  std::string class_id;
  std::string semantic_group;
  PropertySet properties;
  Appearance appearance;
  int spawn_size_px = 0;
  // Cell-located instances of blocking classes occupy their cell.
  bool blocking = false;
  Containment containment = Containment::kOn;
  // Liquid handed out by Fill and used by Clean when in range (sinks).
  std::optional<std::string> provides_liquid;

  bool has(Property p) const { return properties.has(p); }
  std::string display_name() const;

  bool operator==(const ObjectClass&) const = default;
};

class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<ObjectClass> classes);

  const ObjectClass* find(std::string_view class_id) const;
  // Throws UnknownClass.
  const ObjectClass& at(std::string_view class_id) const;

  const std::map<std::string, ObjectClass, std::less<>>& classes() const { return classes_; }
  size_t size() const { return classes_.size(); }

  // All distinct colors named by catalog appearances.
  std::vector<std::string> colors() const;

 private:
  std::map<std::string, ObjectClass, std::less<>> classes_;
};

// Throws ParseError for malformed text, ValidationError for schema violations.
Catalog parse_catalog(std::string_view text);
Catalog load_catalog(const std::filesystem::path& path);

}  // namespace arena::scene
