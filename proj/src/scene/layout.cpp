#include "arena/scene/layout.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "arena/error.hpp"
#include "arena/util/files.hpp"
#include "arena/util/json.hpp"

namespace arena::scene {

std::string Room::display_name() const {
  std::string n = name;
  std::replace(n.begin(), n.end(), '_', ' ');
  return n;
}

bool SceneLayout::wall(Cell c) const {
  if (c.x < 0 || c.y < 0 || c.x >= width || c.y >= height) return true;
  return grid[c.y][c.x] == '#';
}

Occupancy SceneLayout::base_occupancy() const {
  Occupancy occ(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (wall({x, y})) occ.block({x, y});
    }
  }
  return occ;
}

const Room* SceneLayout::room_at(Cell c) const {
  for (const auto& r : rooms) {
    if (r.rect.contains(c)) return &r;
  }
  return nullptr;
}

const Room* SceneLayout::room(std::string_view name) const {
  for (const auto& r : rooms) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

const Viewpoint* SceneLayout::viewpoint(std::string_view name) const {
  for (const auto& v : viewpoints) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

std::vector<const Viewpoint*> SceneLayout::viewpoints_in(std::string_view room_name) const {
  std::vector<const Viewpoint*> out;
  for (const auto& v : viewpoints) {
    if (v.room == room_name) out.push_back(&v);
  }
  std::sort(out.begin(), out.end(),
            [](const Viewpoint* a, const Viewpoint* b) { return a->name < b->name; });
  return out;
}

std::vector<std::string> layout_problems(const SceneLayout& layout, const Occupancy& occ) {
  std::vector<std::string> problems;
  for (size_t i = 0; i < layout.rooms.size(); ++i) {
    for (size_t j = i + 1; j < layout.rooms.size(); ++j) {
      if (layout.rooms[i].rect.intersects(layout.rooms[j].rect)) {
        problems.push_back("rooms '" + layout.rooms[i].name + "' and '" + layout.rooms[j].name +
                           "' overlap");
      }
    }
  }

  std::set<std::pair<Cell, Cell>> door_pairs;
  for (const auto& d : layout.doorways) {
    const Room* ra = layout.room_at(d.a);
    const Room* rb = layout.room_at(d.b);
    if (manhattan(d.a, d.b) != 1) problems.push_back("doorway cells are not 4-adjacent");
    if (!ra || !rb || ra == rb) {
      problems.push_back("doorway must join two distinct rooms");
    }
    if (occ.blocked(d.a) || occ.blocked(d.b)) problems.push_back("doorway cell is blocked");
    door_pairs.insert({d.a, d.b});
    door_pairs.insert({d.b, d.a});
  }

  size_t free_cells = 0;
  Cell first{-1, -1};
  for (int y = 0; y < layout.height; ++y) {
    for (int x = 0; x < layout.width; ++x) {
      const Cell c{x, y};
      if (occ.blocked(c)) continue;
      ++free_cells;
      if (first.x < 0) first = c;
      const Room* rc = layout.room_at(c);
      if (!rc) {
        problems.push_back("free cell (" + std::to_string(x) + "," + std::to_string(y) +
                           ") is outside every room");
        continue;
      }
      for (Cell n : {Cell{x + 1, y}, Cell{x, y + 1}}) {
        if (occ.blocked(n)) continue;
        const Room* rn = layout.room_at(n);
        if (rn && rn != rc && !door_pairs.contains({c, n})) {
          problems.push_back("rooms '" + rc->name + "' and '" + rn->name +
                             "' touch without a doorway at (" + std::to_string(x) + "," +
                             std::to_string(y) + ")");
        }
      }
    }
  }

  if (free_cells > 0) {
    std::vector<uint8_t> seen(static_cast<size_t>(layout.width) * layout.height, 0);
    std::deque<Cell> queue{first};
    seen[first.y * layout.width + first.x] = 1;
    size_t reached = 0;
    while (!queue.empty()) {
      const Cell c = queue.front();
      queue.pop_front();
      ++reached;
      for (Heading h : {Heading::kN, Heading::kE, Heading::kS, Heading::kW}) {
        const Cell n = step(c, h);
        if (occ.blocked(n) || seen[n.y * layout.width + n.x]) continue;
        seen[n.y * layout.width + n.x] = 1;
        queue.push_back(n);
      }
    }
    if (reached != free_cells) problems.push_back("free cells do not form one connected region");
  }

  std::set<std::string> names;
  for (const auto& v : layout.viewpoints) {
    if (!names.insert(v.name).second) problems.push_back("duplicate viewpoint '" + v.name + "'");
    if (occ.blocked(v.cell)) problems.push_back("viewpoint '" + v.name + "' is on a blocked cell");
    const Room* r = layout.room_at(v.cell);
    if (!r || r->name != v.room) {
      problems.push_back("viewpoint '" + v.name + "' is not inside room '" + v.room + "'");
    }
  }
  for (const auto& room : layout.rooms) {
    if (layout.viewpoints_in(room.name).empty()) {
      problems.push_back("room '" + room.name + "' has no viewpoint");
    }
  }
  for (const auto& n : layout.sticky_notes) {
    if (!layout.room_at(n.cell)) problems.push_back("sticky note outside every room");
  }
  return problems;
}

SceneLayout parse_layout(std::string_view text, const Catalog& catalog) {
  const util::Json doc = util::parse_json(text, "layout");
  util::FieldReader root(doc, "layout");
  SceneLayout layout;
  layout.layout_id = root.required_string("id");
  util::require_identifier(layout.layout_id, "layout.id");

  for (const auto& row : root.required_array("grid")) {
    if (!row.is_string()) throw Error(Errc::kValidationError, "layout.grid: expected strings");
    layout.grid.push_back(row.get<std::string>());
  }
  layout.height = static_cast<int>(layout.grid.size());
  layout.width = layout.height ? static_cast<int>(layout.grid[0].size()) : 0;
  if (layout.width == 0) throw Error(Errc::kValidationError, "layout.grid: empty grid");
  for (const auto& row : layout.grid) {
    if (static_cast<int>(row.size()) != layout.width) {
      throw Error(Errc::kValidationError, "layout.grid: rows differ in length");
    }
    for (char c : row) {
      if (c != '#' && c != '.') {
        throw Error(Errc::kValidationError, "layout.grid: only '#' and '.' are allowed");
      }
    }
  }

  const auto& rooms = root.required_array("rooms");
  for (size_t i = 0; i < rooms.size(); ++i) {
    const std::string where = "layout.rooms[" + std::to_string(i) + "]";
    util::FieldReader r(rooms[i], where);
    Room room;
    room.name = r.required_string("name");
    util::require_identifier(room.name, where + ".name");
    const util::Json& rect = r.required_array("rect");
    if (rect.size() != 4 || !std::all_of(rect.begin(), rect.end(), [](const util::Json& v) {
          return v.is_number_integer();
        })) {
      throw Error(Errc::kValidationError, where + ".rect: expected [x,y,w,h] integers");
    }
    room.rect = {rect[0].get<int>(), rect[1].get<int>(), rect[2].get<int>(), rect[3].get<int>()};
    r.reject_unknown();
    if (layout.room(room.name)) throw Error(Errc::kValidationError, where + ": duplicate room");
    layout.rooms.push_back(room);
  }

  if (const util::Json* doors = root.find("doorways")) {
    for (size_t i = 0; i < doors->size(); ++i) {
      const std::string where = "layout.doorways[" + std::to_string(i) + "]";
      const util::Json& d = (*doors)[i];
      if (!d.is_array() || d.size() != 2) {
        throw Error(Errc::kValidationError, where + ": expected a pair of cells");
      }
      layout.doorways.push_back({util::parse_cell(d[0], where), util::parse_cell(d[1], where)});
    }
  }

  const auto& vps = root.required_array("viewpoints");
  for (size_t i = 0; i < vps.size(); ++i) {
    const std::string where = "layout.viewpoints[" + std::to_string(i) + "]";
    util::FieldReader v(vps[i], where);
    Viewpoint vp;
    vp.name = v.required_string("name");
    util::require_identifier(vp.name, where + ".name");
    vp.cell = util::parse_cell(v.required("cell"), where + ".cell");
    vp.room = v.required_string("room");
    v.reject_unknown();
    layout.viewpoints.push_back(vp);
  }

  if (const util::Json* notes = root.find("sticky_notes")) {
    for (size_t i = 0; i < notes->size(); ++i) {
      const std::string where = "layout.sticky_notes[" + std::to_string(i) + "]";
      util::FieldReader n((*notes)[i], where);
      StickyNoteSpec note;
      note.cell = util::parse_cell(n.required("cell"), where + ".cell");
      note.text = n.required_string("text");
      n.reject_unknown();
      layout.sticky_notes.push_back(note);
    }
  }

  if (const util::Json* furn = root.find("furnishings")) {
    std::set<std::string> ids;
    for (size_t i = 0; i < furn->size(); ++i) {
      const std::string where = "layout.furnishings[" + std::to_string(i) + "]";
      util::FieldReader f((*furn)[i], where);
      Furnishing item;
      item.instance_id = f.required_string("id");
      util::require_identifier(item.instance_id, where + ".id");
      if (!ids.insert(item.instance_id).second) {
        throw Error(Errc::kValidationError, where + ".id: duplicate id");
      }
      item.class_id = f.required_string("class");
      const ObjectClass* cls = catalog.find(item.class_id);
      if (!cls) throw Error(Errc::kValidationError, where + ".class: unknown class");
      item.cell = util::parse_cell(f.required("cell"), where + ".cell");
      if (const util::Json* st = f.find("state")) {
        state_from_json(*st, *cls, where + ".state", item.state, item.color_override);
      } else {
        item.state = ObjectState::defaults_for(*cls);
      }
      f.reject_unknown();
      layout.furnishings.push_back(std::move(item));
    }
  }
  root.reject_unknown({"layout_version"});

  Occupancy occ = layout.base_occupancy();
  for (const auto& f : layout.furnishings) {
    if (layout.wall(f.cell)) {
      throw Error(Errc::kValidationError, "furnishing '" + f.instance_id + "' sits in a wall");
    }
    if (catalog.at(f.class_id).blocking) occ.block(f.cell);
  }
  const auto problems = layout_problems(layout, occ);
  if (!problems.empty()) {
    throw Error(Errc::kValidationError, "layout '" + layout.layout_id + "': " + problems.front());
  }
  return layout;
}

SceneLayout load_layout(const std::filesystem::path& path, const Catalog& catalog) {
  return parse_layout(util::read_file(path), catalog);
}

}  // namespace arena::scene
