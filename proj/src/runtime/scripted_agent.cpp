#include "arena/runtime/scripted_agent.hpp"

#include <algorithm>
#include <set>

#include "arena/error.hpp"
#include "arena/nav/nav.hpp"
#include "arena/planner/compile.hpp"
#include "arena/planner/search.hpp"

namespace arena::runtime {

using cdf::GoalCondition;
using cdf::Predicate;
using scene::Flag;
using scene::WorldState;

namespace {

using Phrase = std::vector<std::string>;

const std::vector<std::pair<Phrase, Intent>>& verbs() {
  static const std::vector<std::pair<Phrase, Intent>> table = [] {
    std::vector<std::pair<Phrase, Intent>> t = {
        {{"pick", "up"}, Intent::kPickup}, {{"pickup"}, Intent::kPickup}, {{"grab"}, Intent::kPickup},
        {{"take"}, Intent::kPickup}, {{"get"}, Intent::kPickup},
        {{"put"}, Intent::kPut}, {{"place"}, Intent::kPut}, {{"bring"}, Intent::kPut},
        {{"deliver"}, Intent::kPut}, {{"move"}, Intent::kPut}, {{"set"}, Intent::kPut},
        {{"heat", "up"}, Intent::kHeat}, {{"heat"}, Intent::kHeat}, {{"warm", "up"}, Intent::kHeat},
        {{"warm"}, Intent::kHeat},
        {{"cool", "down"}, Intent::kChill}, {{"chill"}, Intent::kChill}, {{"cool"}, Intent::kChill},
        {{"freeze"}, Intent::kChill},
        {{"break"}, Intent::kBreak}, {{"smash"}, Intent::kBreak}, {{"shatter"}, Intent::kBreak},
        {{"clean"}, Intent::kClean}, {{"wash"}, Intent::kClean}, {{"rinse"}, Intent::kClean},
        {{"fill", "up"}, Intent::kFill}, {{"fill"}, Intent::kFill},
        {{"pour", "out"}, Intent::kEmpty}, {{"empty"}, Intent::kEmpty}, {{"pour"}, Intent::kEmpty},
        {{"turn", "on"}, Intent::kSwitchOn}, {{"switch", "on"}, Intent::kSwitchOn},
        {{"power", "on"}, Intent::kSwitchOn}, {{"press"}, Intent::kSwitchOn},
        {{"toggle"}, Intent::kSwitchOn}, {{"activate"}, Intent::kSwitchOn},
        {{"turn", "off"}, Intent::kSwitchOff}, {{"switch", "off"}, Intent::kSwitchOff},
        {{"power", "off"}, Intent::kSwitchOff}, {{"deactivate"}, Intent::kSwitchOff},
        {{"open"}, Intent::kOpen}, {{"close"}, Intent::kClose}, {{"shut"}, Intent::kClose},
        {{"scan"}, Intent::kScan},
        {{"paint"}, Intent::kPaint}, {{"color"}, Intent::kPaint}, {{"colour"}, Intent::kPaint},
        {{"recolor"}, Intent::kPaint},
        {{"go", "to"}, Intent::kGoto}, {{"go", "into"}, Intent::kGoto}, {{"walk", "to"}, Intent::kGoto},
        {{"head", "to"}, Intent::kGoto}, {{"navigate", "to"}, Intent::kGoto}, {{"enter"}, Intent::kGoto},
    };
    std::stable_sort(t.begin(), t.end(), [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
    return t;
  }();
  return table;
}

const std::set<std::string> kFiller = {"please", "now", "first", "next", "finally", "also", "can",
                                       "could", "you", "kindly", "and", "then"};
const std::set<std::string> kArticles = {"the", "a", "an", "that", "this", "my"};
const std::set<std::string> kPronouns = {"it", "them"};
const std::set<std::string> kPlacePreps = {"on", "onto", "in", "into", "inside", "to"};

bool starts_with(const Phrase& toks, size_t i, const Phrase& p) {
  if (i + p.size() > toks.size()) return false;
  return std::equal(p.begin(), p.end(), toks.begin() + static_cast<long>(i));
}

[[noreturn]] void unparsable(const std::string& why) { throw Error(Errc::kUnparsableInstruction, why); }

// One parsed token run inside a clause.
struct Item {
  enum Kind { kRef, kPronoun, kRoom, kWord } kind = kWord;
  Reference ref;
  std::string text;  // room name or the raw word
};

class ClauseParser {
 public:
  ClauseParser(const qa::Vocabulary& vocab, const WorldState& world) : vocab_(vocab), world_(world) {
    for (const auto& r : world.layout->rooms) {
      rooms_[{r.name}] = r.name;
      rooms_[qa::tokenize(r.display_name())] = r.name;
    }
    for (const auto& [id, cls] : world.catalog->classes()) {
      if (cls.provides_liquid) liquids_.insert(*cls.provides_liquid);
      colors_.insert(cls.appearance.color);
    }
    liquids_.insert("water");
  }

  std::vector<Item> items(const Phrase& toks, size_t from) const {
    std::vector<Item> out;
    size_t i = from;
    while (i < toks.size()) {
      if (kArticles.contains(toks[i])) {
        ++i;
        continue;
      }
      if (kPronouns.contains(toks[i])) {
        out.push_back({Item::kPronoun, {}, toks[i]});
        ++i;
        continue;
      }
      if (world_.find(toks[i])) {
        const auto& obj = world_.at(toks[i]);
        out.push_back({Item::kRef, {obj.class_id, obj.instance_id, ""}, toks[i]});
        ++i;
        continue;
      }
      if (size_t n = room_at(toks, i)) {
        out.push_back({Item::kRoom, {}, rooms_.at(Phrase(toks.begin() + i, toks.begin() + i + n))});
        i += n;
        continue;
      }
      const Phrase tail(toks.begin() + i, toks.end());
      const auto ms = vocab_.mentions(tail);
      if (!ms.empty() && ms.front().token == 0) {
        out.push_back({Item::kRef, {ms.front().class_id, "", ""}, toks[i]});
        i += ms.front().length;
        continue;
      }
      out.push_back({Item::kWord, {}, toks[i]});
      ++i;
    }
    return out;
  }

  bool liquid(const std::string& w) const { return liquids_.contains(w); }
  bool color(const std::string& w) const { return colors_.contains(w); }

 private:
  size_t room_at(const Phrase& toks, size_t i) const {
    for (size_t n = std::min<size_t>(3, toks.size() - i); n >= 1; --n) {
      if (rooms_.contains(Phrase(toks.begin() + i, toks.begin() + i + n))) return n;
    }
    return 0;
  }

  const qa::Vocabulary& vocab_;
  const WorldState& world_;
  std::map<Phrase, std::string> rooms_;
  std::set<std::string> liquids_;
  std::set<std::string> colors_;
};

Clause parse_clause(const Phrase& toks, const ClauseParser& parser, const Clause* previous) {
  size_t i = 0;
  while (i < toks.size() && kFiller.contains(toks[i])) ++i;
  std::optional<Intent> intent;
  for (const auto& [phrase, in] : verbs()) {
    if (starts_with(toks, i, phrase)) {
      intent = in;
      i += phrase.size();
      break;
    }
  }
  if (!intent) unparsable("no known verb in '" + (i < toks.size() ? toks[i] : std::string()) + "'");
  Clause c;
  c.intent = *intent;
  const std::vector<Item> items = parser.items(toks, i);

  size_t k = 0;
  auto skip_words = [&] {
    while (k < items.size() && items[k].kind == Item::kWord && !kPlacePreps.contains(items[k].text) &&
           items[k].text != "with" && items[k].text != "from") {
      ++k;
    }
  };
  skip_words();
  if (c.intent == Intent::kGoto && k < items.size() && items[k].kind == Item::kRoom) {
    c.room = items[k].text;
    return c;
  }
  if (k >= items.size() || (items[k].kind != Item::kRef && items[k].kind != Item::kPronoun)) {
    unparsable("expected an object after the verb");
  }
  if (items[k].kind == Item::kPronoun) {
    if (!previous || previous->object.class_id.empty()) unparsable("'" + items[k].text + "' refers to nothing");
    c.object = previous->object;
  } else {
    c.object = items[k].ref;
  }
  ++k;
  Reference* last = &c.object;
  bool destination_open = c.intent == Intent::kPut;
  while (k < items.size()) {
    const Item& it = items[k++];
    if (it.kind == Item::kWord) {
      if (destination_open && kPlacePreps.contains(it.text) && k < items.size()) {
        const Item& nx = items[k++];
        if (nx.kind == Item::kRef) {
          c.target = nx.ref;
          last = &*c.target;
        } else if (nx.kind == Item::kRoom) {
          c.room = nx.text;
        } else {
          unparsable("expected a destination after '" + it.text + "'");
        }
        destination_open = false;
      } else if ((it.text == "in" || it.text == "from") && k < items.size() && items[k].kind == Item::kRoom) {
        last->room = items[k++].text;
      } else if (c.intent == Intent::kFill && it.text == "with" && k < items.size()) {
        c.argument = items[k++].text;
        if (!parser.liquid(c.argument)) unparsable("unknown liquid '" + c.argument + "'");
      } else if (c.intent == Intent::kPaint && parser.color(it.text)) {
        c.argument = it.text;
      }
    }
  }
  if (c.intent == Intent::kPut && !c.target && c.room.empty()) unparsable("put needs a destination");
  if (c.intent == Intent::kPaint && c.argument.empty()) unparsable("paint needs a colour");
  if (c.intent == Intent::kFill && c.argument.empty()) c.argument = "water";
  return c;
}

}  // namespace

std::vector<Clause> parse_instruction(std::string_view text, const qa::Vocabulary& vocab,
                                      const WorldState& world) {
  const Phrase toks = qa::tokenize(text);
  if (toks.empty()) unparsable("empty instruction");
  const ClauseParser parser(vocab, world);
  std::vector<Clause> out;
  Phrase cur;
  auto flush = [&] {
    if (cur.empty()) return;
    out.push_back(parse_clause(cur, parser, out.empty() ? nullptr : &out.back()));
    cur.clear();
  };
  for (const auto& t : toks) {
    if (t == "and" || t == "then") {
      flush();
    } else {
      cur.push_back(t);
    }
  }
  flush();
  if (out.empty()) unparsable("no clause in instruction");
  return out;
}

cdf::CDF snapshot(const Session& s, std::vector<GoalCondition> goals) {
  cdf::CDF c = s.cdf();
  const WorldState& w = s.world();
  c.scene.agent_cell = w.agent.cell;
  c.scene.agent_heading = w.agent.heading;
  c.scene.obstacles = w.obstacles;
  c.scene.room_power.clear();
  for (const auto& [room, on] : w.room_power) c.scene.room_power[room] = on;
  std::set<std::string> notes;
  for (size_t i = 0; i < w.layout->sticky_notes.size(); ++i) notes.insert(cdf::sticky_note_id(i));
  c.scene.objects.clear();
  for (const auto& [id, obj] : w.objects) {
    if (notes.contains(id)) continue;
    c.scene.objects.push_back(obj);
  }
  c.goals = std::move(goals);
  c.text.subgoal_descriptions.clear();
  for (const auto& g : c.goals) c.text.subgoal_descriptions.push_back(cdf::describe_goal(g));
  return c;
}

namespace {

std::vector<std::string> candidates(const WorldState& w, const Reference& r) {
  std::vector<std::string> out;
  for (const auto& [id, obj] : w.objects) {
    if (!r.instance_id.empty() && id != r.instance_id) continue;
    if (obj.class_id != r.class_id) continue;
    if (!r.room.empty()) {
      const auto room = w.room_at(w.position(id));
      if (!room || *room != r.room) continue;
    }
    out.push_back(id);
  }
  return out;
}

GoalCondition state_goal(const std::string& id, Flag f, bool v) {
  GoalCondition g;
  g.predicate = Predicate::kStateIs;
  g.object = id;
  g.flag = f;
  g.value = v;
  return g;
}

std::vector<GoalCondition> goals_of(const Clause& c) {
  const std::string& id = c.object.instance_id;
  GoalCondition g;
  g.object = id;
  switch (c.intent) {
    case Intent::kPickup: g.predicate = Predicate::kHolding; return {g};
    case Intent::kPut:
      g.predicate = Predicate::kLocated;
      if (c.target) {
        g.receptacle = c.target->instance_id;
      } else {
        g.room = c.room;
      }
      return {g};
    case Intent::kHeat: return {state_goal(id, Flag::kHot, true)};
    case Intent::kChill: return {state_goal(id, Flag::kCold, true)};
    case Intent::kBreak: return {state_goal(id, Flag::kBroken, true)};
    case Intent::kClean: return {state_goal(id, Flag::kDirty, false)};
    case Intent::kFill:
      g.predicate = Predicate::kFilled;
      g.liquid = c.argument;
      return {g};
    case Intent::kEmpty: g.predicate = Predicate::kFilled; return {g};
    case Intent::kSwitchOn: g.predicate = Predicate::kToggled; return {g};
    case Intent::kSwitchOff: return {state_goal(id, Flag::kToggledOn, false)};
    case Intent::kOpen: return {state_goal(id, Flag::kOpen, true)};
    case Intent::kClose: return {state_goal(id, Flag::kOpen, false)};
    case Intent::kScan: g.predicate = Predicate::kScanned; return {g};
    case Intent::kPaint:
      g.predicate = Predicate::kColored;
      g.color = c.argument;
      return {g};
    case Intent::kGoto: return {};
  }
  return {};
}

std::string display(const WorldState& w, const std::string& class_id) { return w.catalog->at(class_id).display_name(); }

}  // namespace

ScriptedAgent::ScriptedAgent(const Resources& res) : ScriptedAgent(res, qa::Vocabulary::load(res)) {}

ScriptedAgent::ScriptedAgent(const Resources& res, qa::Vocabulary vocab) : res_(res), vocab_(std::move(vocab)) {}

AgentReply ScriptedAgent::respond(Session& s, std::string_view text) {
  s.user_event(Utterance{"user", std::string(text)});
  std::vector<Clause> clauses;
  if (pending_) {
    // A reply naming an instance or a room narrows the open reference.
    clauses = std::move(*pending_);
    pending_.reset();
    const WorldState& w = s.world();
    const auto toks = qa::tokenize(text);
    std::optional<Reference> open;
    for (const auto& c : clauses) {
      for (const Reference* r : {&c.object, c.target ? &*c.target : nullptr}) {
        if (!open && r && r->instance_id.empty() && !r->class_id.empty() && candidates(w, *r).size() > 1) open = *r;
      }
    }
    bool narrowed = false;
    if (open) {
      Reference n = *open;
      for (const auto& t : toks) {
        const auto* obj = w.find(t);
        if (obj && obj->class_id == n.class_id) n.instance_id = t;
      }
      if (n.instance_id.empty()) {
        for (const auto& room : w.layout->rooms) {
          const auto name = qa::tokenize(room.display_name());
          if (std::search(toks.begin(), toks.end(), name.begin(), name.end()) != toks.end() ||
              std::find(toks.begin(), toks.end(), room.name) != toks.end()) {
            n.room = room.name;
          }
        }
      }
      narrowed = n != *open;
      for (auto& c : clauses) {
        if (c.object == *open) c.object = n;
        if (c.target && *c.target == *open) c.target = n;
      }
    }
    if (!narrowed) clauses = parse_instruction(text, vocab_, s.world());
  } else {
    clauses = parse_instruction(text, vocab_, s.world());
  }
  AgentReply reply = run(s, std::move(clauses));
  if (s.running()) s.user_event(Utterance{"agent", reply.text});
  return reply;
}

AgentReply ScriptedAgent::run(Session& s, std::vector<Clause> clauses) {
  AgentReply reply;
  const WorldState& w = s.world();
  // Resolve every reference before acting.
  for (auto& c : clauses) {
    for (Reference* r : {&c.object, c.target ? &*c.target : nullptr}) {
      if (!r || r->class_id.empty()) continue;
      const auto found = candidates(w, *r);
      if (found.empty()) {
        reply.text = "I can't find a " + display(w, r->class_id) + ".";
        return reply;
      }
      if (found.size() > 1) {
        reply.clarification = qa::Question{qa::QType::kRef, r->class_id};
        reply.text = reply.clarification->text();
        pending_ = clauses;
        return reply;
      }
      r->instance_id = found.front();
    }
  }
  // Goal clauses between navigation clauses are planned as one batch.
  std::vector<GoalCondition> batch;
  auto flush = [&]() -> bool {
    if (batch.empty()) return true;
    std::vector<GoalCondition> goals;
    for (const auto& g : batch) {
      // A later put supersedes holding the same object.
      const bool superseded = g.predicate == Predicate::kHolding &&
                              std::any_of(batch.begin(), batch.end(), [&](const GoalCondition& o) {
                                return o.predicate == Predicate::kLocated && o.object == g.object;
                              });
      if (!superseded && std::find(goals.begin(), goals.end(), g) == goals.end()) goals.push_back(g);
    }
    batch.clear();
    planner::SearchOptions opt;
    opt.max_expansions = 400'000;
    std::optional<planner::Plan> plan;
    try {
      plan = planner::solve(planner::compile(snapshot(s, goals), res_), opt);
    } catch (const Error& e) {
      if (e.code() != Errc::kCompileError && e.code() != Errc::kUnsolvable &&
          e.code() != Errc::kBudgetExceeded) {
        throw;
      }
      reply.text = "I can't do that: " + e.detail();
      return false;
    }
    for (const auto& a : plan->steps) {
      if (!s.running()) break;
      const auto out = s.step(a);
      reply.actions.push_back(a);
      if (!out.result.success) {
        reply.text = "I got stuck: " + out.result.message;
        return false;
      }
    }
    if (!s.running() && s.phase() != Phase::kSucceeded) {
      reply.text = "I ran out of actions.";
      return false;
    }
    for (const auto& g : goals) {
      if (!cdf::goal_holds(s.world(), g)) {
        reply.text = "I ran out of actions.";
        return false;
      }
    }
    return true;
  };
  for (const auto& c : clauses) {
    if (c.intent != Intent::kGoto) {
      for (auto& g : goals_of(c)) batch.push_back(std::move(g));
      continue;
    }
    if (!flush()) return reply;
    if (!s.running()) break;
    const Action a = c.room.empty() ? Action(nav::NavAction::goto_object(c.object.instance_id))
                                    : Action(nav::NavAction::goto_room(c.room));
    const auto out = s.step(a);
    reply.actions.push_back(a);
    if (!out.result.success) {
      reply.text = "I got stuck: " + out.result.message;
      return reply;
    }
  }
  if (!flush()) return reply;
  reply.done = true;
  reply.text = reply.actions.empty() ? "That is already done."
                                     : "Done in " + std::to_string(reply.actions.size()) +
                                           (reply.actions.size() == 1 ? " action." : " actions.");
  return reply;
}

}  // namespace arena::runtime
