#include "arena/scene/geometry.hpp"

#include <cmath>
#include <numbers>

namespace arena::scene {

std::string_view heading_name(Heading h) {
  switch (h) {
    case Heading::kN: return "N";
    case Heading::kE: return "E";
    case Heading::kS: return "S";
    case Heading::kW: return "W";
  }
  return "N";
}

std::optional<Heading> parse_heading(std::string_view name) {
  if (name == "N") return Heading::kN;
  if (name == "E") return Heading::kE;
  if (name == "S") return Heading::kS;
  if (name == "W") return Heading::kW;
  return std::nullopt;
}

Cell heading_delta(Heading h) {
  switch (h) {
    case Heading::kN: return {0, -1};
    case Heading::kE: return {1, 0};
    case Heading::kS: return {0, 1};
    case Heading::kW: return {-1, 0};
  }
  return {0, 0};
}

Cell step(Cell c, Heading h, int cells) {
  const Cell d = heading_delta(h);
  return {c.x + d.x * cells, c.y + d.y * cells};
}

Heading rotate(Heading h, int quarter_turns) {
  const int v = ((static_cast<int>(h) + quarter_turns) % 4 + 4) % 4;
  return static_cast<Heading>(v);
}

RelativeOffset relative_offset(Cell origin, Heading heading, Cell target) {
  const int dx = target.x - origin.x;
  const int dy = target.y - origin.y;
  const Cell f = heading_delta(heading);
  const Cell r = heading_delta(rotate(heading, 1));
  return {dx * f.x + dy * f.y, dx * r.x + dy * r.y};
}

double bearing_deg(Cell origin, Heading heading, Cell target) {
  const RelativeOffset rel = relative_offset(origin, heading, target);
  if (rel.forward == 0 && rel.right == 0) return 0.0;
  double deg = std::atan2(static_cast<double>(rel.right), static_cast<double>(rel.forward)) *
               180.0 / std::numbers::pi;
  if (deg <= -180.0) deg += 360.0;
  return deg;
}

Heading heading_towards(Cell from, Cell to, Heading fallback) {
  const int dx = to.x - from.x;
  const int dy = to.y - from.y;
  if (dx == 0 && dy == 0) return fallback;
  if (std::abs(dy) >= std::abs(dx)) return dy < 0 ? Heading::kN : Heading::kS;
  return dx > 0 ? Heading::kE : Heading::kW;
}

}  // namespace arena::scene
