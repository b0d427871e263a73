#include "arena/planner/pddl.hpp"

#include <map>
#include <set>

#include "arena/error.hpp"

namespace arena::planner {

namespace {

constexpr std::string_view kTypes[] = {"color", "entity", "liquid", "room", "viewpoint"};

std::string atom(const Fluent& f) { return f.key(); }

void write_and(std::string& out, const PlanningProblem& p, const std::vector<FluentId>& pos,
               const std::vector<FluentId>& neg, const std::string& indent) {
  if (pos.empty() && neg.empty()) {
    out += "(and)";
    return;
  }
  out += "(and";
  for (FluentId f : pos) out += "\n" + indent + atom(p.fluents[f]);
  for (FluentId f : neg) out += "\n" + indent + "(not " + atom(p.fluents[f]) + ")";
  out += ")";
}

}  // namespace

PddlText export_pddl(const PlanningProblem& p) {
  PddlText t;
  std::string& d = t.domain;
  d += "(define (domain arena-" + p.name + ")\n";
  d += "  (:requirements :strips :typing)\n";
  d += "  (:types";
  for (auto ty : kTypes) d += " " + std::string(ty);
  d += " - object)\n";

  std::map<std::string, std::vector<std::string>> by_type;
  for (const auto& [name, type] : p.objects) by_type[type].push_back(name);
  d += "  (:constants";
  for (const auto& [type, names] : by_type) {
    d += "\n   ";
    for (const auto& n : names) d += " " + n;
    d += " - " + type;
  }
  d += ")\n";

  std::set<std::string> preds;
  for (const auto& f : p.fluents) preds.insert(f.predicate);
  d += "  (:predicates";
  for (const auto& pred : preds) {
    d += "\n    (" + pred;
    const auto sig = predicate_signature(pred);
    for (size_t i = 0; i < sig.size(); ++i) d += " ?a" + std::to_string(i) + " - " + sig[i];
    d += ")";
  }
  d += ")\n";

  for (const auto& op : p.operators) {
    d += "  (:action " + op.name + "\n";
    d += "    :parameters ()\n";
    d += "    :precondition ";
    write_and(d, p, op.pre, {}, "      ");
    d += "\n    :effect ";
    write_and(d, p, op.add, op.del, "      ");
    d += ")\n";
  }
  d += ")\n";

  std::string& q = t.problem;
  q += "(define (problem " + p.name + ")\n";
  q += "  (:domain arena-" + p.name + ")\n";
  q += "  (:init";
  for (FluentId f : p.initial) q += "\n    " + atom(p.fluents[f]);
  q += ")\n";
  q += "  (:goal ";
  write_and(q, p, p.goal, {}, "    ");
  q += "))\n";
  return t;
}

namespace {

struct Sexp {
  std::string atom;  // empty for lists
  std::vector<Sexp> items;
  int line = 0;
  bool is_list() const { return atom.empty(); }
};

class Reader {
 public:
  Reader(std::string_view text, std::string what) : s_(text), what_(std::move(what)) {}

  Sexp read_document() {
    skip();
    Sexp e = read();
    skip();
    if (i_ != s_.size()) fail("trailing text after the top-level form");
    return e;
  }

  [[noreturn]] void fail(const std::string& msg, int line = 0) const {
    throw Error(Errc::kParseError, what_ + ":" + std::to_string(line ? line : line_) + ": " + msg);
  }

 private:
  void skip() {
    while (i_ < s_.size()) {
      const char c = s_[i_];
      if (c == ';') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      } else if (c == '\n') {
        ++line_;
        ++i_;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++i_;
      } else {
        break;
      }
    }
  }

  Sexp read() {
    skip();
    if (i_ >= s_.size()) fail("unexpected end of input");
    Sexp e;
    e.line = line_;
    if (s_[i_] == ')') fail("unexpected ')'");
    if (s_[i_] == '(') {
      ++i_;
      while (true) {
        skip();
        if (i_ >= s_.size()) fail("unclosed '('", e.line);
        if (s_[i_] == ')') {
          ++i_;
          return e;
        }
        e.items.push_back(read());
      }
    }
    const size_t start = i_;
    while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) && s_[i_] != '(' &&
           s_[i_] != ')' && s_[i_] != ';') {
      ++i_;
    }
    e.atom = std::string(s_.substr(start, i_ - start));
    for (char& c : e.atom) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return e;
  }

  std::string_view s_;
  std::string what_;
  size_t i_ = 0;
  int line_ = 1;
};

class Builder {
 public:
  Builder(const Reader& dr, const Reader& pr) : dr_(dr), pr_(pr) {}

  void domain(const Sexp& root, std::string& name) {
    const Reader& r = dr_;
    expect_define(r, root, "domain", name);
    for (size_t i = 2; i < root.items.size(); ++i) {
      const Sexp& sec = root.items[i];
      const std::string& head = section(r, sec);
      if (head == ":requirements") {
        for (size_t k = 1; k < sec.items.size(); ++k) {
          const auto& req = sec.items[k].atom;
          if (req != ":strips" && req != ":typing") r.fail("unsupported requirement '" + req + "'", sec.line);
        }
      } else if (head == ":types") {
        // Fixed vocabulary; accepted as written.
      } else if (head == ":constants") {
        read_typed_list(r, sec, constants_);
      } else if (head == ":predicates") {
        for (size_t k = 1; k < sec.items.size(); ++k) {
          const Sexp& decl = sec.items[k];
          if (!decl.is_list() || decl.items.empty() || decl.items[0].is_list()) {
            r.fail("malformed predicate declaration", decl.line);
          }
          std::map<std::string, std::string> params;
          read_typed_list(r, decl, params, 1);
          std::vector<std::string> want;
          try {
            want = predicate_signature(decl.items[0].atom);
          } catch (const Error&) {
            r.fail("unknown predicate '" + decl.items[0].atom + "'", decl.line);
          }
          if (params.size() != want.size()) r.fail("predicate arity mismatch", decl.line);
          declared_.insert(decl.items[0].atom);
        }
      } else if (head == ":action") {
        action(r, sec);
      } else {
        r.fail("unsupported domain section '" + head + "'", sec.line);
      }
    }
  }

  void problem(const Sexp& root, const std::string& domain_name) {
    const Reader& r = pr_;
    expect_define(r, root, "problem", name_);
    bool have_goal = false;
    for (size_t i = 2; i < root.items.size(); ++i) {
      const Sexp& sec = root.items[i];
      const std::string& head = section(r, sec);
      if (head == ":domain") {
        if (sec.items.size() != 2 || sec.items[1].atom != domain_name) {
          r.fail("problem refers to a different domain", sec.line);
        }
      } else if (head == ":objects") {
        read_typed_list(r, sec, constants_);
      } else if (head == ":init") {
        std::vector<FluentId> init;
        for (size_t k = 1; k < sec.items.size(); ++k) init.push_back(fluent(r, sec.items[k]));
        b_.set_initial(std::move(init));
      } else if (head == ":goal") {
        if (sec.items.size() != 2) r.fail("expected one goal formula", sec.line);
        std::vector<FluentId> neg;
        std::vector<FluentId> pos;
        conjunction(r, sec.items[1], pos, neg);
        if (!neg.empty()) r.fail("negative goals are not STRIPS", sec.line);
        for (FluentId f : pos) b_.add_goal(f);
        have_goal = true;
      } else {
        r.fail("unsupported problem section '" + head + "'", sec.line);
      }
    }
    if (!have_goal) r.fail("problem has no :goal", root.line);
  }

  PlanningProblem finish() {
    PlanningProblem p = b_.finish(name_);
    for (const auto& [obj, type] : p.objects) {
      auto it = constants_.find(obj);
      if (it == constants_.end() || it->second != type) {
        throw Error(Errc::kParseError, "pddl: constant '" + obj + "' is undeclared or mistyped");
      }
    }
    return p;
  }

 private:
  static const std::string& section(const Reader& r, const Sexp& sec) {
    if (!sec.is_list() || sec.items.empty() || sec.items[0].is_list()) r.fail("expected a section", sec.line);
    return sec.items[0].atom;
  }

  static void expect_define(const Reader& r, const Sexp& root, const std::string& kind, std::string& name) {
    if (!root.is_list() || root.items.size() < 2 || root.items[0].atom != "define" ||
        !root.items[1].is_list() || root.items[1].items.size() != 2 ||
        root.items[1].items[0].atom != kind || root.items[1].items[1].is_list()) {
      r.fail("expected (define (" + kind + " <name>) ...)", root.line);
    }
    name = root.items[1].items[1].atom;
  }

  // "a b - t c - u" starting at items[from].
  static void read_typed_list(const Reader& r, const Sexp& list, std::map<std::string, std::string>& out,
                              size_t from = 1) {
    std::vector<std::string> pending;
    for (size_t k = from; k < list.items.size(); ++k) {
      const Sexp& it = list.items[k];
      if (it.is_list()) r.fail("unexpected list in typed list", it.line);
      if (it.atom == "-") {
        if (k + 1 >= list.items.size() || list.items[k + 1].is_list() || pending.empty()) {
          r.fail("dangling '-' in typed list", it.line);
        }
        const std::string& type = list.items[++k].atom;
        for (auto& n : pending) {
          if (!out.emplace(n, type).second) r.fail("'" + n + "' declared twice", it.line);
        }
        pending.clear();
      } else {
        pending.push_back(it.atom);
      }
    }
    if (!pending.empty()) r.fail("untyped names in typed list", list.line);
  }

  FluentId fluent(const Reader& r, const Sexp& e) {
    if (!e.is_list() || e.items.empty()) r.fail("expected an atom", e.line);
    std::vector<std::string> args;
    for (size_t k = 0; k < e.items.size(); ++k) {
      if (e.items[k].is_list()) r.fail("nested term in atom", e.line);
      if (k) args.push_back(e.items[k].atom);
    }
    const std::string& pred = e.items[0].atom;
    if (!declared_.contains(pred)) r.fail("undeclared predicate '" + pred + "'", e.line);
    if (args.size() != predicate_signature(pred).size()) r.fail("wrong arity for '" + pred + "'", e.line);
    return b_.fluent(pred, std::move(args));
  }

  void conjunction(const Reader& r, const Sexp& e, std::vector<FluentId>& pos, std::vector<FluentId>& neg) {
    if (!e.is_list() || e.items.empty()) r.fail("expected a formula", e.line);
    if (e.items[0].atom == "and") {
      for (size_t k = 1; k < e.items.size(); ++k) conjunction(r, e.items[k], pos, neg);
    } else if (e.items[0].atom == "not") {
      if (e.items.size() != 2) r.fail("malformed (not ...)", e.line);
      neg.push_back(fluent(r, e.items[1]));
    } else {
      pos.push_back(fluent(r, e));
    }
  }

  void action(const Reader& r, const Sexp& sec) {
    if (sec.items.size() < 2 || sec.items[1].is_list()) r.fail("action needs a name", sec.line);
    Operator op;
    op.name = sec.items[1].atom;
    bool have_pre = false, have_eff = false;
    for (size_t k = 2; k < sec.items.size(); k += 2) {
      if (k + 1 >= sec.items.size()) r.fail("action key without value", sec.line);
      const std::string& key = sec.items[k].atom;
      const Sexp& val = sec.items[k + 1];
      if (key == ":parameters") {
        if (!val.is_list() || !val.items.empty()) r.fail("only ground actions are supported", val.line);
      } else if (key == ":precondition") {
        std::vector<FluentId> neg;
        conjunction(r, val, op.pre, neg);
        if (!neg.empty()) r.fail("negative preconditions are not STRIPS", val.line);
        have_pre = true;
      } else if (key == ":effect") {
        conjunction(r, val, op.add, op.del);
        have_eff = true;
      } else {
        r.fail("unsupported action key '" + key + "'", val.line);
      }
    }
    if (!have_pre || !have_eff) r.fail("action '" + op.name + "' lacks precondition or effect", sec.line);
    b_.add_operator(std::move(op));
  }

  const Reader& dr_;
  const Reader& pr_;
  ProblemBuilder b_;
  std::string name_;
  std::map<std::string, std::string> constants_;
  std::set<std::string> declared_;
};

}  // namespace

PlanningProblem parse_pddl(std::string_view domain, std::string_view problem) {
  Reader dr(domain, "domain");
  Reader pr(problem, "problem");
  const Sexp droot = dr.read_document();
  const Sexp proot = pr.read_document();
  Builder b(dr, pr);
  std::string domain_name;
  b.domain(droot, domain_name);
  b.problem(proot, domain_name);
  try {
    return b.finish();
  } catch (const Error& e) {
    if (e.code() == Errc::kParseError) throw;
    throw Error(Errc::kParseError, std::string("pddl: ") + e.detail());
  }
}

}  // namespace arena::planner
