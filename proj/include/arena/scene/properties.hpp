#pragma once

#include <array>
#include <bitset>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace arena::scene {

// The closed set of object affordances.
enum class Property : uint8_t {
  kPickupable,
  kOpenable,
  kBreakable,
  kReceptacle,
  kToggleable,
  kPowerable,
  kDirtyable,
  kHeatable,
  kEatable,
  kChillable,
  kFillable,
  kCookable,
  kDecor,
  kInfectable,
};

inline constexpr size_t kPropertyCount = 14;

inline constexpr std::array<std::string_view, kPropertyCount> kPropertyNames = {
    "pickupable", "openable", "breakable", "receptacle", "toggleable", "powerable", "dirtyable",
    "heatable",   "eatable",  "chillable", "fillable",   "cookable",   "decor",     "infectable",
};

inline std::string_view property_name(Property p) {
  return kPropertyNames[static_cast<size_t>(p)];
}

std::optional<Property> parse_property(std::string_view name);

class PropertySet {
 public:
  PropertySet() = default;
  PropertySet(std::initializer_list<Property> props) {
    for (Property p : props) insert(p);
  }

  void insert(Property p) { bits_.set(static_cast<size_t>(p)); }
  bool has(Property p) const { return bits_.test(static_cast<size_t>(p)); }
  bool empty() const { return bits_.none(); }
  size_t size() const { return bits_.count(); }

  std::vector<std::string_view> names() const;

  bool operator==(const PropertySet&) const = default;

 private:
  std::bitset<kPropertyCount> bits_;
};

}  // namespace arena::scene
