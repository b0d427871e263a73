#pragma once

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>

namespace arena::scene {

// Grid origin is top-left, x grows east, y grows south.
struct Cell {
  int x = 0;
  int y = 0;

  auto operator<=>(const Cell&) const = default;
};

enum class Heading : uint8_t { kN = 0, kE = 1, kS = 2, kW = 3 };

inline int manhattan(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }
inline int chebyshev(Cell a, Cell b) {
  return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

std::string_view heading_name(Heading h);
std::optional<Heading> parse_heading(std::string_view name);

// Unit offset of one step along a heading.
Cell heading_delta(Heading h);
Cell step(Cell c, Heading h, int cells = 1);

// quarter_turns is clockwise and may be negative.
Heading rotate(Heading h, int quarter_turns);

// Offset of `target` from `origin` expressed in the heading's frame.
struct RelativeOffset {
  int forward = 0;
  int right = 0;
};
RelativeOffset relative_offset(Cell origin, Heading heading, Cell target);

// Clockwise bearing in degrees, (-180, 180]; 0 when target == origin.
double bearing_deg(Cell origin, Heading heading, Cell target);

// Heading that best faces `to` from `from`; the vertical axis wins ties.
Heading heading_towards(Cell from, Cell to, Heading fallback);

struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool contains(Cell c) const { return c.x >= x && c.x < x + w && c.y >= y && c.y < y + h; }
  bool intersects(const Rect& o) const {
    return x < o.x + o.w && o.x < x + w && y < o.y + o.h && o.y < y + h;
  }
  bool operator==(const Rect&) const = default;
};

}  // namespace arena::scene
