#include "arena/scene/catalog.hpp"

#include <algorithm>
#include <set>

#include "arena/error.hpp"
#include "arena/util/files.hpp"
#include "arena/util/json.hpp"

namespace arena::scene {

std::optional<Property> parse_property(std::string_view name) {
  for (size_t i = 0; i < kPropertyCount; ++i) {
    if (kPropertyNames[i] == name) return static_cast<Property>(i);
  }
  return std::nullopt;
}

std::vector<std::string_view> PropertySet::names() const {
  std::vector<std::string_view> out;
  for (size_t i = 0; i < kPropertyCount; ++i) {
    if (bits_.test(i)) out.push_back(kPropertyNames[i]);
  }
  return out;
}

std::string ObjectClass::display_name() const {
  std::string name = class_id;
  std::replace(name.begin(), name.end(), '_', ' ');
  return name;
}

Catalog::Catalog(std::vector<ObjectClass> classes) {
  for (auto& c : classes) {
    std::string id = c.class_id;
    if (!classes_.emplace(id, std::move(c)).second) {
      throw Error(Errc::kValidationError, "duplicate class id '" + id + "'");
    }
  }
}

const ObjectClass* Catalog::find(std::string_view class_id) const {
  auto it = classes_.find(class_id);
  return it == classes_.end() ? nullptr : &it->second;
}

const ObjectClass& Catalog::at(std::string_view class_id) const {
  const ObjectClass* c = find(class_id);
  if (!c) throw Error(Errc::kUnknownClass, "unknown class '" + std::string(class_id) + "'");
  return *c;
}

std::vector<std::string> Catalog::colors() const {
  std::set<std::string> seen;
  for (const auto& [id, c] : classes_) seen.insert(c.appearance.color);
  return {seen.begin(), seen.end()};
}

Catalog parse_catalog(std::string_view text) {
  const util::Json doc = util::parse_json(text, "catalog");
  util::FieldReader root(doc, "catalog");
  const util::Json& list = root.required_array("classes");

  std::vector<ObjectClass> classes;
  std::set<std::string> seen;
  for (size_t i = 0; i < list.size(); ++i) {
    const std::string where = "classes[" + std::to_string(i) + "]";
    util::FieldReader entry(list[i], where);
    ObjectClass c;
    c.class_id = entry.required_string("id");
    util::require_identifier(c.class_id, where + ".id");
    if (!seen.insert(c.class_id).second) {
      throw Error(Errc::kValidationError, where + ".id: duplicate class id '" + c.class_id + "'");
    }
    c.semantic_group = entry.optional_string("group").value_or(c.class_id);
    for (const auto& p : entry.required_array("properties")) {
      if (!p.is_string()) throw Error(Errc::kValidationError, where + ".properties: expected strings");
      auto prop = parse_property(p.get<std::string>());
      if (!prop) {
        throw Error(Errc::kValidationError,
                    where + ".properties: unknown property '" + p.get<std::string>() + "'");
      }
      c.properties.insert(*prop);
    }
    util::FieldReader app(entry.required_object("appearance"), where + ".appearance");
    c.appearance.shape = app.required_string("shape");
    c.appearance.color = app.required_string("color");
    c.appearance.material = app.required_string("material");
    if (c.appearance.shape.empty() || c.appearance.color.empty() || c.appearance.material.empty()) {
      throw Error(Errc::kValidationError, where + ".appearance: fields must be non-empty");
    }
    c.spawn_size_px = static_cast<int>(entry.optional_int("spawn_size_px").value_or(0));
    c.blocking = entry.optional_bool("blocking").value_or(false);
    const std::string containment = entry.optional_string("containment").value_or("on");
    if (containment == "in") {
      c.containment = Containment::kIn;
    } else if (containment == "on") {
      c.containment = Containment::kOn;
    } else {
      throw Error(Errc::kValidationError, where + ".containment: expected \"in\" or \"on\"");
    }
    if (c.has(Property::kOpenable) && c.has(Property::kReceptacle)) c.containment = Containment::kIn;
    c.provides_liquid = entry.optional_string("provides_liquid");
    if (c.has(Property::kDecor)) {
      for (Property p : {Property::kPickupable, Property::kOpenable, Property::kBreakable,
                         Property::kToggleable, Property::kDirtyable, Property::kHeatable,
                         Property::kChillable, Property::kFillable, Property::kCookable,
                         Property::kInfectable, Property::kPowerable}) {
        if (c.has(p)) {
          throw Error(Errc::kValidationError,
                      where + ": decor class cannot carry mutable-state property '" +
                          std::string(property_name(p)) + "'");
        }
      }
    }
    entry.reject_unknown();
    classes.push_back(std::move(c));
  }
  root.reject_unknown({"catalog_version"});
  return Catalog(std::move(classes));
}

Catalog load_catalog(const std::filesystem::path& path) {
  return parse_catalog(util::read_file(path));
}

}  // namespace arena::scene
