#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arena/resources.hpp"
#include "arena/scene/world.hpp"

namespace arena::qa {

enum class QType { kLoc, kApp, kDir, kRef };
std::string_view qtype_token(QType t);
std::optional<QType> parse_qtype(std::string_view token);

struct Question {
  QType type = QType::kDir;
  std::string object;  // class id; empty for dir

  // "where is coffee pot?"
  std::string text() const;
  // "app microwave", or "dir"
  std::string encoding() const;
  bool operator==(const Question&) const = default;
};

std::optional<Question> parse_encoding(std::string_view encoding);

// Lowercase word tokens: runs of [a-z0-9_].
std::vector<std::string> tokenize(std::string_view text);

struct Mention {
  std::string class_id;
  size_t token = 0;  // first token index
  size_t length = 1;
};

// Noun vocabulary: every class id, its spaced form, and the synonyms file.
class Vocabulary {
 public:
  // Synonym lines are "phrase: class_id"; '#' starts a comment. Throws
  // ValidationError with the line number for unknown classes or clashes.
  static Vocabulary build(const scene::Catalog& catalog, std::string_view synonyms = {});
  // data_dir/synonyms.txt when it exists.
  static Vocabulary load(const Resources& res);

  // Longest match at each position, left to right, non-overlapping.
  std::vector<Mention> mentions(const std::vector<std::string>& tokens) const;
  std::vector<Mention> mentions(std::string_view text) const { return mentions(tokenize(text)); }
  const std::string* lookup(const std::vector<std::string>& phrase) const;
  size_t size() const { return phrases_.size(); }

 private:
  void add(std::vector<std::string> phrase, const std::string& class_id, const std::string& where);

  std::map<std::vector<std::string>, std::string> phrases_;
  size_t longest_ = 1;
};

// Per distinct noun in order of first mention: loc, app, ref; one dir
// question goes after the first noun's app (or alone when there are none).
std::vector<Question> generate_questions(std::string_view instruction, const Vocabulary& vocab);

enum class Direction { kFront, kRight, kBehind, kLeft };
std::string_view direction_name(Direction d);
// 90 degree sectors centred on the heading axes; diagonals fall to the
// sector nearer the front. `target` must differ from `origin`.
Direction direction_of(scene::Cell origin, scene::Heading heading, scene::Cell target);

struct Answer {
  std::string text;
  std::map<std::string, std::string> slots;
};

// "The o is to your D[ in/on the C][ next to the L] in the R. It is closest to V."
Answer answer_location(const scene::WorldState& world, std::string_view instance_id);
// "The o is S and of C. It is made of M."
Answer answer_appearance(const scene::Catalog& catalog, std::string_view class_id);
Answer answer_appearance(const scene::WorldState& world, std::string_view instance_id);
// "You should turn left/right/around.", "You don't need to turn." or
// "You don't need to move."
Answer answer_direction(const scene::AgentState& before, const scene::AgentState& after);
// "I mean i[ in/on the C] in the R."
Answer answer_reference(const scene::WorldState& world, std::string_view instance_id);

// Template patterns every answer text matches.
const std::string& location_pattern();
const std::string& appearance_pattern();
const std::string& direction_pattern();
const std::string& reference_pattern();

}  // namespace arena::qa
