#include "arena/qa/qa.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <set>

#include "arena/error.hpp"
#include "arena/nav/nav.hpp"
#include "arena/util/files.hpp"

namespace arena::qa {

using scene::Cell;
using scene::Location;
using scene::WorldState;

namespace {

constexpr std::string_view kTokens[] = {"loc", "app", "dir", "ref"};

std::string spaced(std::string s) {
  std::replace(s.begin(), s.end(), '_', ' ');
  return s;
}

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::string_view qtype_token(QType t) { return kTokens[static_cast<size_t>(t)]; }

std::optional<QType> parse_qtype(std::string_view token) {
  for (size_t i = 0; i < std::size(kTokens); ++i) {
    if (kTokens[i] == token) return static_cast<QType>(i);
  }
  return std::nullopt;
}

std::string Question::text() const {
  const std::string o = spaced(object);
  switch (type) {
    case QType::kLoc: return "where is " + o + "?";
    case QType::kApp: return "what does " + o + " look like?";
    case QType::kDir: return "which direction should I turn to?";
    case QType::kRef: return "which " + o + " are you referring to?";
  }
  return {};
}

std::string Question::encoding() const {
  std::string out(qtype_token(type));
  if (type != QType::kDir) out += " " + object;
  return out;
}

std::optional<Question> parse_encoding(std::string_view encoding) {
  const auto toks = tokenize(encoding);
  if (toks.empty()) return std::nullopt;
  auto t = parse_qtype(toks[0]);
  if (!t) return std::nullopt;
  if (*t == QType::kDir) {
    if (toks.size() != 1) return std::nullopt;
    return Question{*t, ""};
  }
  if (toks.size() != 2) return std::nullopt;
  return Question{*t, toks[1]};
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c == '_') {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

void Vocabulary::add(std::vector<std::string> phrase, const std::string& class_id,
                     const std::string& where) {
  if (phrase.empty()) throw Error(Errc::kValidationError, where + ": empty phrase");
  auto [it, fresh] = phrases_.emplace(phrase, class_id);
  if (!fresh && it->second != class_id) {
    throw Error(Errc::kValidationError,
                where + ": phrase already names '" + it->second + "'");
  }
  longest_ = std::max(longest_, phrase.size());
}

Vocabulary Vocabulary::build(const scene::Catalog& catalog, std::string_view synonyms) {
  Vocabulary v;
  for (const auto& [id, cls] : catalog.classes()) {
    v.add({id}, id, "catalog");
    v.add(tokenize(spaced(id)), id, "catalog");
  }
  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= synonyms.size()) {
    const size_t nl = std::min(synonyms.find('\n', pos), synonyms.size());
    std::string_view line = synonyms.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const std::string where = "synonyms:" + std::to_string(line_no);
    const size_t colon = body.find(':');
    if (colon == std::string::npos) {
      throw Error(Errc::kValidationError, where + ": expected 'phrase: class_id'");
    }
    const std::string cls = trim(std::string_view(body).substr(colon + 1));
    if (!catalog.find(cls)) throw Error(Errc::kValidationError, where + ": unknown class '" + cls + "'");
    v.add(tokenize(body.substr(0, colon)), cls, where);
  }
  return v;
}

Vocabulary Vocabulary::load(const Resources& res) {
  const auto path = res.data_dir / "synonyms.txt";
  if (!std::filesystem::exists(path)) return build(*res.catalog);
  return build(*res.catalog, util::read_file(path));
}

const std::string* Vocabulary::lookup(const std::vector<std::string>& phrase) const {
  auto it = phrases_.find(phrase);
  return it == phrases_.end() ? nullptr : &it->second;
}

std::vector<Mention> Vocabulary::mentions(const std::vector<std::string>& tokens) const {
  std::vector<Mention> out;
  size_t i = 0;
  while (i < tokens.size()) {
    bool hit = false;
    for (size_t len = std::min(longest_, tokens.size() - i); len >= 1; --len) {
      const std::vector<std::string> phrase(tokens.begin() + i, tokens.begin() + i + len);
      if (const std::string* cls = lookup(phrase)) {
        out.push_back({*cls, i, len});
        i += len;
        hit = true;
        break;
      }
    }
    if (!hit) ++i;
  }
  return out;
}

std::vector<Question> generate_questions(std::string_view instruction, const Vocabulary& vocab) {
  std::vector<Question> out;
  std::set<std::string> seen;
  bool dir_done = false;
  for (const Mention& m : vocab.mentions(instruction)) {
    if (!seen.insert(m.class_id).second) continue;
    out.push_back({QType::kLoc, m.class_id});
    out.push_back({QType::kApp, m.class_id});
    if (!dir_done) out.push_back({QType::kDir, ""});
    dir_done = true;
    out.push_back({QType::kRef, m.class_id});
  }
  if (!dir_done) out.push_back({QType::kDir, ""});
  return out;
}

std::string_view direction_name(Direction d) {
  constexpr std::string_view names[] = {"front", "right", "behind", "left"};
  return names[static_cast<size_t>(d)];
}

Direction direction_of(Cell origin, scene::Heading heading, Cell target) {
  const auto rel = scene::relative_offset(origin, heading, target);
  const int side = std::abs(rel.right);
  if (rel.forward > 0 && side <= rel.forward) return Direction::kFront;
  if (rel.forward < 0 && side < -rel.forward) return Direction::kBehind;
  return rel.right > 0 ? Direction::kRight : Direction::kLeft;
}

namespace {

std::string display(const WorldState& world, const scene::ObjectInstance& obj) {
  return world.class_of(obj).display_name();
}

const scene::Room* room_of(const WorldState& world, std::string_view id) {
  return world.layout->room_at(world.position(id));
}

// Container clause pieces: link word, container and landmark display names.
struct Container {
  std::string link;
  std::string name;
  std::string landmark;
};

std::optional<Container> container_of(const WorldState& world, const scene::ObjectInstance& obj) {
  if (!obj.location.has_parent()) return std::nullopt;
  const scene::ObjectInstance& parent = world.at(obj.location.parent);
  Container c;
  c.link = obj.location.kind == Location::Kind::kInside ? "in" : "on";
  c.name = display(world, parent);
  std::vector<std::string> others = world.children(parent.instance_id);
  std::sort(others.begin(), others.end());
  for (const auto& id : others) {
    if (id == obj.instance_id) continue;
    c.landmark = display(world, world.at(id));
    break;
  }
  return c;
}

}  // namespace

Answer answer_location(const WorldState& world, std::string_view instance_id) {
  const scene::ObjectInstance& obj = world.at(instance_id);
  Answer a;
  const std::string o = display(world, obj);
  const Cell pos = world.position(instance_id);
  const Direction d = pos == world.agent.cell ? Direction::kFront
                                              : direction_of(world.agent.cell, world.agent.heading, pos);
  a.slots["object"] = o;
  a.slots["direction"] = std::string(direction_name(d));
  a.text = "The " + o + " is to your " + a.slots["direction"];
  if (!world.held_root(instance_id)) {
    if (auto c = container_of(world, obj)) {
      a.slots["container"] = c->name;
      a.text += " " + c->link + " the " + c->name;
      if (!c->landmark.empty()) {
        a.slots["landmark"] = c->landmark;
        a.text += " next to the " + c->landmark;
      }
    }
  }
  const scene::Room* room = room_of(world, instance_id);
  if (!room) throw Error(Errc::kUnknownRoom, "'" + std::string(instance_id) + "' is outside every room");
  a.slots["room"] = room->display_name();
  a.text += " in the " + a.slots["room"] + ".";

  // Path cost from the object's cell, which may hold blocking furniture.
  scene::Occupancy occ = world.occupancy();
  occ.unblock(pos);
  const std::vector<int> dist = nav::distance_field(occ, pos);
  const scene::Viewpoint* best = nullptr;
  int best_cost = 0;
  for (const scene::Viewpoint* vp : world.layout->viewpoints_in(room->name)) {
    const int cost = dist[static_cast<size_t>(vp->cell.y) * occ.width() + vp->cell.x];
    if (cost < 0) continue;
    if (!best || cost < best_cost) {
      best = vp;
      best_cost = cost;
    }
  }
  if (best) {
    a.slots["viewpoint"] = best->name;
    a.text += " It is closest to " + best->name + ".";
  }
  return a;
}

namespace {

Answer appearance(const std::string& o, const scene::Appearance& app, const std::string& color) {
  Answer a;
  a.slots = {{"object", o}, {"shape", app.shape}, {"color", color}, {"material", app.material}};
  a.text = "The " + o + " is " + app.shape + " and of " + color + ". It is made of " + app.material + ".";
  return a;
}

}  // namespace

Answer answer_appearance(const scene::Catalog& catalog, std::string_view class_id) {
  const scene::ObjectClass& cls = catalog.at(class_id);
  return appearance(cls.display_name(), cls.appearance, cls.appearance.color);
}

Answer answer_appearance(const WorldState& world, std::string_view instance_id) {
  const scene::ObjectInstance& obj = world.at(instance_id);
  const scene::ObjectClass& cls = world.class_of(obj);
  return appearance(cls.display_name(), cls.appearance, obj.color_override.value_or(cls.appearance.color));
}

Answer answer_direction(const scene::AgentState& before, const scene::AgentState& after) {
  Answer a;
  if (before.cell == after.cell) {
    a.text = "You don't need to move.";
    return a;
  }
  const Direction d = direction_of(before.cell, before.heading, after.cell);
  switch (d) {
    case Direction::kFront: a.text = "You don't need to turn."; return a;
    case Direction::kRight: a.slots["direction"] = "right"; break;
    case Direction::kLeft: a.slots["direction"] = "left"; break;
    case Direction::kBehind: a.slots["direction"] = "around"; break;
  }
  a.text = "You should turn " + a.slots["direction"] + ".";
  return a;
}

Answer answer_reference(const WorldState& world, std::string_view instance_id) {
  const scene::ObjectInstance& obj = world.at(instance_id);
  Answer a;
  a.slots["instance"] = obj.instance_id;
  a.text = "I mean " + obj.instance_id;
  if (!world.held_root(instance_id)) {
    if (auto c = container_of(world, obj)) {
      a.slots["container"] = c->name;
      a.text += " " + c->link + " the " + c->name;
    }
  }
  const scene::Room* room = room_of(world, instance_id);
  if (!room) throw Error(Errc::kUnknownRoom, "'" + std::string(instance_id) + "' is outside every room");
  a.slots["room"] = room->display_name();
  a.text += " in the " + a.slots["room"] + ".";
  return a;
}

const std::string& location_pattern() {
  static const std::string p =
      R"(^The [a-z0-9 ]+ is to your (front|right|behind|left)( (in|on) the [a-z0-9 ]+( next to the [a-z0-9 ]+)?)? in the [a-z0-9 ]+\.( It is closest to [a-z0-9_]+\.)?$)";
  return p;
}

const std::string& appearance_pattern() {
  static const std::string p = R"(^The [a-z0-9 ]+ is [a-z0-9 -]+ and of [a-z0-9_ -]+\. It is made of [a-z0-9 -]+\.$)";
  return p;
}

const std::string& direction_pattern() {
  static const std::string p = R"(^(You should turn (left|right|around)\.|You don't need to (move|turn)\.)$)";
  return p;
}

const std::string& reference_pattern() {
  static const std::string p = R"(^I mean [a-z0-9_]+( (in|on) the [a-z0-9 ]+)? in the [a-z0-9 ]+\.$)";
  return p;
}

}  // namespace arena::qa
