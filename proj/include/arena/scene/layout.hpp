#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arena/scene/catalog.hpp"
#include "arena/scene/geometry.hpp"
#include "arena/scene/object.hpp"

namespace arena::scene {

struct Room {
  std::string name;
  Rect rect;

  std::string display_name() const;
  bool operator==(const Room&) const = default;
};

struct Doorway {
  Cell a;
  Cell b;
  bool operator==(const Doorway&) const = default;
};

struct Viewpoint {
  std::string name;
  Cell cell;
  std::string room;
  bool operator==(const Viewpoint&) const = default;
};

struct StickyNoteSpec {
  Cell cell;
  std::string text;
  bool operator==(const StickyNoteSpec&) const = default;
};

// Default fixture placement shipped with a layout; mission generation copies
// these into each mission's scene.
struct Furnishing {
  std::string instance_id;
  std::string class_id;
  Cell cell;
  ObjectState state;
  std::optional<std::string> color_override;
  bool operator==(const Furnishing&) const = default;
};

// Blocked-cell mask; out-of-bounds cells read as blocked.
class Occupancy {
 public:
  Occupancy() = default;
  Occupancy(int width, int height) : width_(width), height_(height), blocked_(width * height, 0) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  bool blocked(Cell c) const { return !in_bounds(c) || blocked_[index(c)] != 0; }
  void block(Cell c) {
    if (in_bounds(c)) blocked_[index(c)] = 1;
  }
  void unblock(Cell c) {
    if (in_bounds(c)) blocked_[index(c)] = 0;
  }

 private:
  size_t index(Cell c) const { return static_cast<size_t>(c.y) * width_ + c.x; }
  int width_ = 0;
  int height_ = 0;
  std::vector<uint8_t> blocked_;
};

class SceneLayout {
 public:
  std::string layout_id;
  int width = 0;
  int height = 0;
  std::vector<std::string> grid;  // '#' blocked, '.' free
  std::vector<Room> rooms;
  std::vector<Doorway> doorways;
  std::vector<Viewpoint> viewpoints;
  std::vector<StickyNoteSpec> sticky_notes;
  std::vector<Furnishing> furnishings;

  bool wall(Cell c) const;
  Occupancy base_occupancy() const;

  const Room* room_at(Cell c) const;
  const Room* room(std::string_view name) const;
  const Viewpoint* viewpoint(std::string_view name) const;
  std::vector<const Viewpoint*> viewpoints_in(std::string_view room) const;
};

// Validates geometry; furnishing classes are checked against the catalog.
SceneLayout parse_layout(std::string_view text, const Catalog& catalog);
SceneLayout load_layout(const std::filesystem::path& path, const Catalog& catalog);

// Problems with the layout's invariants (empty when valid). `occupancy` is the
// mask the connectivity and viewpoint checks run against.
std::vector<std::string> layout_problems(const SceneLayout& layout, const Occupancy& occupancy);

}  // namespace arena::scene
