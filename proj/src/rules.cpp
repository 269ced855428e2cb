#include "causelog/rules.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace causelog {

namespace {

bool ident_start(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '*';
}

bool ident_char(char c) { return ident_start(c); }

struct Token {
  enum Kind { Ident, Number, Punct, End } kind = End;
  std::string text;
  int line = 0;
  int col = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (i_ < text_.size()) {
      char c = text_[i_];
      if (c == '#') {
        while (i_ < text_.size() && text_[i_] != '\n') advance();
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
        continue;
      }
      int tl = line_, tc = col_;
      if (ident_start(c)) {
        std::string s;
        while (i_ < text_.size()) {
          char d = text_[i_];
          if (ident_char(d)) {
            s.push_back(d);
            advance();
            continue;
          }
          // '-' joins identifier parts only when followed by another
          // identifier character (entity names like manufacturer-of-x).
          if (d == '-' && i_ + 1 < text_.size() && ident_char(text_[i_ + 1]) &&
              text_[i_ + 1] != '*') {
            s.push_back(d);
            advance();
            continue;
          }
          break;
        }
        out.push_back({Token::Ident, std::move(s), tl, tc});
        continue;
      }
      if (c == '-') {
        if (match3('-', '-', '>')) {
          out.push_back({Token::Punct, "-->", tl, tc});
          continue;
        }
        if (match2('-', '>')) {
          out.push_back({Token::Punct, "->", tl, tc});
          continue;
        }
        if (match2('-', '-')) {
          out.push_back({Token::Punct, "--", tl, tc});
          continue;
        }
        throw ParseError("unexpected '-'", tl, tc);
      }
      if (c == '~') {
        if (match2('~', '>')) {
          out.push_back({Token::Punct, "~>", tl, tc});
          continue;
        }
        throw ParseError("unexpected '~'", tl, tc);
      }
      if (std::string_view("{}(),;:=[]").find(c) != std::string_view::npos) {
        out.push_back({Token::Punct, std::string(1, c), tl, tc});
        advance();
        continue;
      }
      throw ParseError(std::string("unexpected character '") + c + "'", tl, tc);
    }
    out.push_back({Token::End, "", line_, col_});
    return out;
  }

 private:
  void advance() {
    if (text_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }
  bool match2(char a, char b) {
    if (i_ + 1 < text_.size() && text_[i_] == a && text_[i_ + 1] == b) {
      advance();
      advance();
      return true;
    }
    return false;
  }
  bool match3(char a, char b, char c) {
    if (i_ + 2 < text_.size() && text_[i_] == a && text_[i_ + 1] == b && text_[i_ + 2] == c) {
      advance();
      advance();
      advance();
      return true;
    }
    return false;
  }

  std::string_view text_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class RulesParser {
 public:
  explicit RulesParser(std::string_view text) : toks_(Lexer(text).run()) {}

  RuleSet parse() {
    RuleSet rs;
    while (peek().kind != Token::End) {
      const Token& t = peek();
      if (t.kind == Token::Ident && t.text == "law") {
        rs.laws.push_back(parse_law());
      } else if (t.kind == Token::Ident && t.text == "machine") {
        rs.machines.push_back(parse_machine());
      } else if (t.kind == Token::Ident && t.text == "entity") {
        rs.entities.push_back(parse_entity());
      } else {
        throw ParseError("expected 'law', 'machine' or 'entity', got '" + t.text + "'", t.line,
                         t.col);
      }
    }
    validate(rs);
    return rs;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  void expect_punct(const std::string& p) {
    const Token& t = next();
    if (t.kind != Token::Punct || t.text != p)
      throw ParseError("expected '" + p + "', got '" + t.text + "'", t.line, t.col);
  }
  std::string expect_ident(const char* what) {
    const Token& t = next();
    if (t.kind != Token::Ident)
      throw ParseError(std::string("expected ") + what + ", got '" + t.text + "'", t.line, t.col);
    return t.text;
  }

  std::int64_t expect_int(const char* what) {
    const Token& t = next();
    if (t.kind != Token::Ident)
      throw ParseError(std::string("expected ") + what + ", got '" + t.text + "'", t.line, t.col);
    try {
      std::size_t used = 0;
      std::int64_t v = std::stoll(t.text, &used);
      if (used != t.text.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ParseError(std::string("expected ") + what + ", got '" + t.text + "'", t.line, t.col);
    }
  }

  EventPattern parse_pattern() {
    const Token& kw = next();
    if (kw.kind != Token::Ident || kw.text != "event")
      throw ParseError("expected 'event', got '" + kw.text + "'", kw.line, kw.col);
    expect_punct("(");
    EventPattern p;
    p.comp = expect_ident("a component or '*'");
    expect_punct(",");
    p.event = expect_ident("an event name or '*'");
    while (peek().kind == Token::Punct && peek().text == ",") {
      next();
      std::string key = expect_ident("a param key");
      expect_punct("=");
      std::string val = expect_ident("a param value");
      p.param_constraints.emplace_back(std::move(key), std::move(val));
    }
    const Token& close = peek();
    expect_punct(")");
    if (p.comp == "*" && p.event == "*")
      throw ParseError("pattern needs a concrete component or event", close.line, close.col);
    return p;
  }

  CausalLaw parse_law() {
    next();  // law
    CausalLaw law;
    law.id = expect_ident("a law id");
    if (peek().kind == Token::Punct && peek().text == ":") {
      // Either a scope tag or the separator before the cause pattern.
      const Token& after = toks_[std::min(pos_ + 1, toks_.size() - 1)];
      if (after.kind == Token::Ident && (after.text == "world" || after.text == "system")) {
        next();
        law.scope = next().text;
      }
    }
    expect_punct(":");
    law.cause = parse_pattern();
    {
      const Token& t = next();
      if (t.kind != Token::Punct || t.text != "~>")
        throw ParseError("expected '~>', got '" + t.text + "'", t.line, t.col);
    }
    law.effect = parse_pattern();
    {
      const Token& t = next();
      if (t.kind != Token::Ident || t.text != "within")
        throw ParseError("expected 'within', got '" + t.text + "'", t.line, t.col);
    }
    const Token& open = peek();
    expect_punct("[");
    law.window_lo = expect_int("a window bound");
    expect_punct(",");
    if (peek().kind == Token::Ident && peek().text == "inf") {
      next();
      law.window_hi = std::nullopt;
    } else {
      law.window_hi = expect_int("a window bound or 'inf'");
    }
    expect_punct("]");
    if (law.window_lo < 0 || (law.window_hi && *law.window_hi < law.window_lo))
      throw ParseError("invalid window for law '" + law.id + "'", open.line, open.col);
    if (peek().kind == Token::Ident && peek().text == "permitted") {
      next();
      law.modality = Modality::Permitted;
    }
    expect_punct(";");
    return law;
  }

  StateMachineSpec parse_machine() {
    next();  // machine
    StateMachineSpec m;
    m.id = expect_ident("a machine id");
    expect_punct("{");
    {
      const Token& t = next();
      if (t.kind != Token::Ident || t.text != "init")
        throw ParseError("expected 'init', got '" + t.text + "'", t.line, t.col);
    }
    m.initial = expect_ident("a state name");
    expect_punct(";");
    add_state(m, m.initial);
    while (!(peek().kind == Token::Punct && peek().text == "}")) {
      Transition tr;
      tr.from = expect_ident("a state name");
      expect_punct("--");
      tr.on = parse_pattern();
      expect_punct("-->");
      tr.to = expect_ident("a state name");
      expect_punct(";");
      add_state(m, tr.from);
      add_state(m, tr.to);
      m.transitions.push_back(std::move(tr));
    }
    next();  // }
    return m;
  }

  static void add_state(StateMachineSpec& m, const std::string& s) {
    if (std::find(m.states.begin(), m.states.end(), s) == m.states.end()) m.states.push_back(s);
  }

  EntityDecl parse_entity() {
    next();  // entity
    EntityDecl e;
    e.comp = expect_ident("a component id");
    {
      const Token& t = next();
      if (t.kind != Token::Punct || t.text != "->")
        throw ParseError("expected '->', got '" + t.text + "'", t.line, t.col);
    }
    e.entity = expect_ident("an entity name");
    if (peek().kind == Token::Punct && peek().text == ":") {
      next();
      const Token& t = next();
      if (t.text == "agent") {
        e.cls = EntityClass::Agent;
      } else if (t.text == "component") {
        e.cls = EntityClass::Component;
      } else if (t.text == "environment") {
        e.cls = EntityClass::Environment;
      } else {
        throw ParseError("expected 'agent', 'component' or 'environment', got '" + t.text + "'",
                         t.line, t.col);
      }
    }
    expect_punct(";");
    return e;
  }

  // Two patterns overlap when some concrete record can match both.
  static bool patterns_overlap(const EventPattern& a, const EventPattern& b) {
    if (a.comp != "*" && b.comp != "*" && a.comp != b.comp) return false;
    if (a.event != "*" && b.event != "*" && a.event != b.event) return false;
    for (const auto& [ka, va] : a.param_constraints)
      for (const auto& [kb, vb] : b.param_constraints)
        if (ka == kb && va != vb) return false;
    return true;
  }

  static void validate(const RuleSet& rs) {
    for (std::size_t i = 0; i < rs.laws.size(); ++i)
      for (std::size_t j = i + 1; j < rs.laws.size(); ++j)
        if (rs.laws[i].id == rs.laws[j].id)
          throw Error("duplicate law id '" + rs.laws[i].id + "'");
    for (std::size_t i = 0; i < rs.machines.size(); ++i)
      for (std::size_t j = i + 1; j < rs.machines.size(); ++j)
        if (rs.machines[i].id == rs.machines[j].id)
          throw Error("duplicate machine id '" + rs.machines[i].id + "'");
    for (std::size_t i = 0; i < rs.entities.size(); ++i)
      for (std::size_t j = i + 1; j < rs.entities.size(); ++j)
        if (rs.entities[i].comp == rs.entities[j].comp)
          throw Error("duplicate entity mapping for '" + rs.entities[i].comp + "'");
    for (const StateMachineSpec& m : rs.machines) {
      for (std::size_t i = 0; i < m.transitions.size(); ++i) {
        for (std::size_t j = i + 1; j < m.transitions.size(); ++j) {
          if (m.transitions[i].from != m.transitions[j].from) continue;
          if (patterns_overlap(m.transitions[i].on, m.transitions[j].on))
            throw Error("nondeterministic machine '" + m.id + "': overlapping transitions from '" +
                        m.transitions[i].from + "'");
        }
      }
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::string pattern_text(const EventPattern& p) {
  std::string s = "event(" + p.comp + "," + p.event;
  for (const auto& [k, v] : p.param_constraints) s += "," + k + "=" + v;
  return s + ")";
}

}  // namespace

const char* to_string(EntityClass c) {
  switch (c) {
    case EntityClass::Agent: return "agent";
    case EntityClass::Component: return "component";
    case EntityClass::Environment: return "environment";
  }
  return "?";
}

EntityDecl RuleSet::entity_for(std::string_view comp) const {
  for (const EntityDecl& e : entities)
    if (e.comp == comp) return e;
  return EntityDecl{std::string(comp), "unknown", EntityClass::Component};
}

void RuleSet::merge(const RuleSet& other) {
  for (const CausalLaw& law : other.laws) {
    for (const CausalLaw& mine : laws)
      if (mine.id == law.id) throw Error("duplicate law id '" + law.id + "' across rule files");
    laws.push_back(law);
  }
  for (const StateMachineSpec& m : other.machines) {
    for (const StateMachineSpec& mine : machines)
      if (mine.id == m.id) throw Error("duplicate machine id '" + m.id + "' across rule files");
    machines.push_back(m);
  }
  for (const EntityDecl& e : other.entities) {
    for (const EntityDecl& mine : entities)
      if (mine.comp == e.comp)
        throw Error("duplicate entity mapping for '" + e.comp + "' across rule files");
    entities.push_back(e);
  }
}

RuleSet parse_rules(std::string_view text) { return RulesParser(text).parse(); }

std::string serialize(const RuleSet& rules) {
  std::ostringstream out;
  for (const CausalLaw& law : rules.laws) {
    out << "law " << law.id;
    if (!law.scope.empty()) out << ":" << law.scope;
    out << " : " << pattern_text(law.cause) << " ~> " << pattern_text(law.effect) << " within ["
        << law.window_lo << ",";
    if (law.window_hi) {
      out << *law.window_hi;
    } else {
      out << "inf";
    }
    out << "]";
    if (law.modality == Modality::Permitted) out << " permitted";
    out << ";\n";
  }
  for (const StateMachineSpec& m : rules.machines) {
    out << "machine " << m.id << " {\n  init " << m.initial << ";\n";
    for (const Transition& t : m.transitions)
      out << "  " << t.from << " -- " << pattern_text(t.on) << " --> " << t.to << ";\n";
    out << "}\n";
  }
  for (const EntityDecl& e : rules.entities)
    out << "entity " << e.comp << " -> " << e.entity << " : " << to_string(e.cls) << ";\n";
  return out.str();
}

bool match(const EventPattern& pattern, const LogRecord& record) {
  if (pattern.comp != "*" && pattern.comp != record.comp) return false;
  if (pattern.event != "*" && pattern.event != record.event) return false;
  for (const auto& [key, value] : pattern.param_constraints) {
    bool ok = std::any_of(record.params.begin(), record.params.end(),
                          [&](const auto& p) { return p.first == key && p.second == value; });
    if (!ok) return false;
  }
  return true;
}

std::vector<ConformanceViolation> check_conformance(const StateMachineSpec& machine,
                                                    const LogFile& file) {
  std::vector<ConformanceViolation> out;
  std::string state = machine.initial;
  for (std::size_t i = 0; i < file.records.size(); ++i) {
    const LogRecord& r = file.records[i];
    bool in_scope = std::any_of(machine.transitions.begin(), machine.transitions.end(),
                                [&](const Transition& t) { return match(t.on, r); });
    if (!in_scope) continue;
    const Transition* taken = nullptr;
    for (const Transition& t : machine.transitions) {
      if (t.from == state && match(t.on, r)) {
        taken = &t;
        break;
      }
    }
    if (taken) {
      state = taken->to;
    } else {
      out.push_back({static_cast<std::int64_t>(i), state});
    }
  }
  return out;
}

}  // namespace causelog
