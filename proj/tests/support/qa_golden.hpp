#pragma once

#include <string>

#include "arena/qa/qa.hpp"
#include "missions.hpp"

namespace arena::testing::qa_golden {

const qa::Vocabulary& vocab();
// Contents of tests/golden/<name>.
std::string golden(const std::string& name);

util::Json at(const std::string& id, const std::string& cls, scene::Cell c);

// Two states of the "twin" layout the answer templates are checked against.
MissionSpec state_s1();
MissionSpec state_s2();

// Regenerate a golden file from its own inputs: question lines ("> ...")
// are expanded into encodings and texts, answer rows "<state>\t<query>" get
// the oracle's answer. `n` counts instructions or answered rows.
std::string render_questions(const std::string& golden_text, size_t& n);
std::string render_answers(const std::string& golden_text, size_t& n);

}  // namespace arena::testing::qa_golden
