#include "causelog/scm.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace causelog {

namespace {

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_token_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

bool is_valid_name(std::string_view s) {
  if (s.empty() || !is_name_start(s[0])) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return is_token_char(c); });
}

}  // namespace

std::optional<int> Domain::index_of(std::string_view token) const {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] == token) return static_cast<int>(i);
  return std::nullopt;
}

int CausalModel::add_variable(std::string name, Domain domain, bool exogenous) {
  if (!is_valid_name(name)) throw Error("invalid variable name '" + name + "'");
  if (by_name_.contains(name)) throw Error("duplicate variable '" + name + "'");
  if (domain.values.empty()) throw Error("empty domain for '" + name + "'");
  for (std::size_t i = 0; i < domain.values.size(); ++i)
    for (std::size_t j = i + 1; j < domain.values.size(); ++j)
      if (domain.values[i] == domain.values[j])
        throw Error("duplicate domain value '" + domain.values[i] + "' for '" + name + "'");

  int idx = static_cast<int>(vars_.size());
  by_name_.emplace(name, idx);
  (exogenous ? exo_ : endo_).push_back(idx);
  vars_.push_back(Variable{std::move(name), std::move(domain), exogenous, {}});
  finalized_ = false;
  return idx;
}

void CausalModel::set_equation(int var, std::vector<int> parents, std::vector<int> table) {
  const Variable& v = vars_.at(static_cast<std::size_t>(var));
  if (v.exogenous) throw Error("exogenous variable '" + v.name + "' cannot have an equation");

  std::size_t rows = 1;
  for (int p : parents) {
    if (p < 0 || p >= static_cast<int>(vars_.size()))
      throw Error("equation for '" + v.name + "' references an unknown parent");
    rows *= vars_[static_cast<std::size_t>(p)].domain.size();
  }
  if (table.size() != rows)
    throw Error("non-total table for '" + v.name + "': expected " + std::to_string(rows) +
                " rows, got " + std::to_string(table.size()));
  for (int out : table)
    if (out < 0 || out >= static_cast<int>(v.domain.size()))
      throw Error("table output out of domain for '" + v.name + "'");

  vars_[static_cast<std::size_t>(var)].equation = {std::move(parents), std::move(table)};
  finalized_ = false;
}

void CausalModel::finalize() {
  for (int e : endo_) {
    const Variable& v = vars_[static_cast<std::size_t>(e)];
    if (v.equation.table.empty()) throw Error("missing equation for '" + v.name + "'");
  }

  // Kahn's algorithm over endogenous variables, lowest index first.
  std::vector<int> pending(vars_.size(), 0);
  for (int e : endo_)
    for (int p : vars_[static_cast<std::size_t>(e)].equation.parents)
      if (!vars_[static_cast<std::size_t>(p)].exogenous) ++pending[static_cast<std::size_t>(e)];

  order_.clear();
  std::vector<bool> placed(vars_.size(), false);
  for (;;) {
    int next = -1;
    for (int e : endo_) {
      if (!placed[static_cast<std::size_t>(e)] && pending[static_cast<std::size_t>(e)] == 0) {
        next = e;
        break;
      }
    }
    if (next < 0) break;
    placed[static_cast<std::size_t>(next)] = true;
    order_.push_back(next);
    for (int e : endo_) {
      if (placed[static_cast<std::size_t>(e)]) continue;
      for (int p : vars_[static_cast<std::size_t>(e)].equation.parents)
        if (p == next) --pending[static_cast<std::size_t>(e)];
    }
  }
  if (order_.size() != endo_.size()) {
    std::string cyclic;
    for (int e : endo_)
      if (!placed[static_cast<std::size_t>(e)]) {
        if (!cyclic.empty()) cyclic += ", ";
        cyclic += vars_[static_cast<std::size_t>(e)].name;
      }
    throw Error("cycle detected among: " + cyclic);
  }
  finalized_ = true;
}

int CausalModel::index_of(std::string_view name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? -1 : it->second;
}

int CausalModel::table_index(const StructuralEquation& eq, const std::vector<int>& assignment) const {
  int idx = 0;
  for (int p : eq.parents) {
    const Variable& pv = vars_[static_cast<std::size_t>(p)];
    idx = idx * static_cast<int>(pv.domain.size()) + assignment[static_cast<std::size_t>(p)];
  }
  return idx;
}

Formula Formula::atom(int var, int value) {
  Formula f;
  f.kind_ = Kind::Atom;
  f.var_ = var;
  f.value_ = value;
  return f;
}

Formula Formula::negation(Formula f) {
  Formula g;
  g.kind_ = Kind::Not;
  g.kids_.push_back(std::move(f));
  return g;
}

Formula Formula::conjunction(std::vector<Formula> kids) {
  Formula g;
  g.kind_ = Kind::And;
  g.kids_ = std::move(kids);
  return g;
}

Formula Formula::disjunction(std::vector<Formula> kids) {
  Formula g;
  g.kind_ = Kind::Or;
  g.kids_ = std::move(kids);
  return g;
}

bool Formula::eval(const std::vector<int>& assignment) const {
  switch (kind_) {
    case Kind::Atom:
      return assignment[static_cast<std::size_t>(var_)] == value_;
    case Kind::Not:
      return !kids_[0].eval(assignment);
    case Kind::And:
      return std::all_of(kids_.begin(), kids_.end(),
                         [&](const Formula& k) { return k.eval(assignment); });
    case Kind::Or:
      return std::any_of(kids_.begin(), kids_.end(),
                         [&](const Formula& k) { return k.eval(assignment); });
  }
  return false;
}

// ---------------------------------------------------------------------------
// Model DSL
//
//   exo <name> [: {v1,v2,...}]
//   var <name> [: {v1,v2,...}] = <expr>
//   var <name> [: {v1,v2,...}] = { (p1=v,...) -> v; ... }
//
// Domains default to {0,1}. `#` starts a comment.
// ---------------------------------------------------------------------------

namespace {

struct Token {
  enum Kind { Ident, Punct, End } kind = End;
  std::string text;
  int line = 0;
  int col = 0;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (is_token_char(c)) {
      std::size_t j = i;
      while (j < text.size() && is_token_char(text[j])) ++j;
      out.push_back({Token::Ident, std::string(text.substr(i, j - i)), line, col});
      advance(j - i);
      continue;
    }
    int tl = line, tc = col;
    if (c == '=' && i + 1 < text.size() && text[i + 1] == '=') {
      out.push_back({Token::Punct, "==", tl, tc});
      advance(2);
      continue;
    }
    if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      out.push_back({Token::Punct, "->", tl, tc});
      advance(2);
      continue;
    }
    if (std::string_view("{}(),;:=|&!").find(c) != std::string_view::npos) {
      out.push_back({Token::Punct, std::string(1, c), tl, tc});
      advance(1);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", tl, tc);
  }
  out.push_back({Token::End, "", line, col});
  return out;
}

struct ExprNode {
  enum class Kind { Ref, Eq, Not, And, Or };
  Kind kind = Kind::Ref;
  std::string token;  // Ref only
  int line = 0, col = 0;
  std::vector<ExprNode> kids;
};

struct TableRow {
  std::vector<std::pair<std::string, std::string>> cells;
  std::string out;
  int line = 0, col = 0;
};

struct Decl {
  bool exogenous = false;
  std::string name;
  std::optional<std::vector<std::string>> domain;
  bool is_table = false;
  std::optional<ExprNode> expr;
  std::vector<TableRow> rows;
  int line = 0, col = 0;
};

class ModelParser {
 public:
  explicit ModelParser(std::string_view text) : toks_(tokenize(text)) {}

  std::vector<Decl> parse_decls() {
    std::vector<Decl> decls;
    while (peek().kind != Token::End) {
      const Token& t = peek();
      if (t.kind == Token::Ident && t.text == "exo") {
        decls.push_back(parse_exo());
      } else if (t.kind == Token::Ident && t.text == "var") {
        decls.push_back(parse_var());
      } else {
        throw ParseError("expected 'exo' or 'var', got '" + t.text + "'", t.line, t.col);
      }
    }
    return decls;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[k];
  }
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

  std::string parse_name() {
    const Token& t = peek();
    std::string s = expect_ident("a variable name");
    if (!is_valid_name(s) || s == "exo" || s == "var")
      throw ParseError("invalid variable name '" + s + "'", t.line, t.col);
    return s;
  }

  std::vector<std::string> parse_domain() {
    expect_punct("{");
    std::vector<std::string> values;
    values.push_back(expect_ident("a domain value"));
    while (peek().kind == Token::Punct && peek().text == ",") {
      next();
      values.push_back(expect_ident("a domain value"));
    }
    expect_punct("}");
    return values;
  }

  Decl parse_exo() {
    Decl d;
    d.exogenous = true;
    d.line = peek().line;
    d.col = peek().col;
    next();  // exo
    d.name = parse_name();
    if (peek().kind == Token::Punct && peek().text == ":") {
      next();
      d.domain = parse_domain();
    }
    return d;
  }

  Decl parse_var() {
    Decl d;
    d.line = peek().line;
    d.col = peek().col;
    next();  // var
    d.name = parse_name();
    if (peek().kind == Token::Punct && peek().text == ":") {
      next();
      d.domain = parse_domain();
    }
    expect_punct("=");
    if (peek().kind == Token::Punct && peek().text == "{") {
      d.is_table = true;
      d.rows = parse_table();
    } else {
      d.expr = parse_or();
    }
    return d;
  }

  std::vector<TableRow> parse_table() {
    expect_punct("{");
    std::vector<TableRow> rows;
    for (;;) {
      if (peek().kind == Token::Punct && peek().text == "}") {
        next();
        break;
      }
      TableRow row;
      row.line = peek().line;
      row.col = peek().col;
      expect_punct("(");
      if (!(peek().kind == Token::Punct && peek().text == ")")) {
        for (;;) {
          std::string key = expect_ident("a parent name");
          expect_punct("=");
          std::string val = expect_ident("a value token");
          row.cells.emplace_back(std::move(key), std::move(val));
          if (peek().kind == Token::Punct && peek().text == ",") {
            next();
            continue;
          }
          break;
        }
      }
      expect_punct(")");
      expect_punct("->");
      row.out = expect_ident("a value token");
      rows.push_back(std::move(row));
      if (peek().kind == Token::Punct && peek().text == ";") {
        next();
        continue;
      }
      expect_punct("}");
      break;
    }
    if (rows.empty()) {
      const Token& t = peek();
      throw ParseError("empty table", t.line, t.col);
    }
    return rows;
  }

  // Precedence: == tightest, then !, &, | loosest.
  ExprNode parse_or() {
    ExprNode lhs = parse_and();
    if (!(peek().kind == Token::Punct && peek().text == "|")) return lhs;
    ExprNode n;
    n.kind = ExprNode::Kind::Or;
    n.line = lhs.line;
    n.col = lhs.col;
    n.kids.push_back(std::move(lhs));
    while (peek().kind == Token::Punct && peek().text == "|") {
      next();
      n.kids.push_back(parse_and());
    }
    return n;
  }

  ExprNode parse_and() {
    ExprNode lhs = parse_unary();
    if (!(peek().kind == Token::Punct && peek().text == "&")) return lhs;
    ExprNode n;
    n.kind = ExprNode::Kind::And;
    n.line = lhs.line;
    n.col = lhs.col;
    n.kids.push_back(std::move(lhs));
    while (peek().kind == Token::Punct && peek().text == "&") {
      next();
      n.kids.push_back(parse_unary());
    }
    return n;
  }

  ExprNode parse_unary() {
    if (peek().kind == Token::Punct && peek().text == "!") {
      const Token& t = next();
      ExprNode n;
      n.kind = ExprNode::Kind::Not;
      n.line = t.line;
      n.col = t.col;
      n.kids.push_back(parse_unary());
      return n;
    }
    return parse_eq();
  }

  ExprNode parse_eq() {
    ExprNode lhs = parse_primary();
    if (peek().kind == Token::Punct && (peek().text == "==" || peek().text == "=")) {
      next();
      ExprNode n;
      n.kind = ExprNode::Kind::Eq;
      n.line = lhs.line;
      n.col = lhs.col;
      n.kids.push_back(std::move(lhs));
      n.kids.push_back(parse_primary());
      return n;
    }
    return lhs;
  }

  ExprNode parse_primary() {
    const Token& t = peek();
    if (t.kind == Token::Punct && t.text == "(") {
      next();
      ExprNode inner = parse_or();
      expect_punct(")");
      return inner;
    }
    if (t.kind == Token::Ident && t.text != "exo" && t.text != "var") {
      ExprNode n;
      n.kind = ExprNode::Kind::Ref;
      n.token = t.text;
      n.line = t.line;
      n.col = t.col;
      next();
      return n;
    }
    throw ParseError("expected an expression, got '" + t.text + "'", t.line, t.col);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Expression value during table compilation: a domain token or a boolean.
struct ExprValue {
  bool is_bool = false;
  bool b = false;
  std::string token;
};

class DeclCompiler {
 public:
  DeclCompiler(CausalModel& model, const Decl& decl, int target)
      : model_(model), decl_(decl), target_(target) {}

  void compile() {
    if (decl_.is_table) {
      compile_table();
    } else {
      compile_expr();
    }
  }

 private:
  const Variable& target_var() const { return model_.var(target_); }

  void compile_table() {
    std::vector<int> parents;
    for (const auto& [key, _] : decl_.rows.front().cells) {
      int p = model_.index_of(key);
      if (p < 0)
        throw ParseError("undeclared parent '" + key + "' in equation for '" + decl_.name + "'",
                         decl_.rows.front().line, decl_.rows.front().col);
      parents.push_back(p);
    }
    std::size_t nrows = 1;
    for (int p : parents) nrows *= model_.var(p).domain.size();
    std::vector<int> table(nrows, -1);

    for (const TableRow& row : decl_.rows) {
      if (row.cells.size() != parents.size())
        throw ParseError("table row for '" + decl_.name + "' lists a different parent set",
                         row.line, row.col);
      int idx = 0;
      std::vector<bool> seen(parents.size(), false);
      for (std::size_t k = 0; k < parents.size(); ++k) {
        // Locate each cell by name so rows may reorder parents.
        int cell = -1;
        for (std::size_t c = 0; c < row.cells.size(); ++c)
          if (model_.index_of(row.cells[c].first) == parents[k]) cell = static_cast<int>(c);
        if (cell < 0)
          throw ParseError("table row for '" + decl_.name + "' misses parent '" +
                               model_.var(parents[k]).name + "'",
                           row.line, row.col);
        const Variable& pv = model_.var(parents[k]);
        auto vi = pv.domain.index_of(row.cells[static_cast<std::size_t>(cell)].second);
        if (!vi)
          throw ParseError("value '" + row.cells[static_cast<std::size_t>(cell)].second +
                               "' not in domain of '" + pv.name + "'",
                           row.line, row.col);
        idx = idx * static_cast<int>(pv.domain.size()) + *vi;
      }
      auto out = target_var().domain.index_of(row.out);
      if (!out)
        throw ParseError("value '" + row.out + "' not in domain of '" + decl_.name + "'", row.line,
                         row.col);
      if (table[static_cast<std::size_t>(idx)] != -1)
        throw ParseError("duplicate table row for '" + decl_.name + "'", row.line, row.col);
      table[static_cast<std::size_t>(idx)] = *out;
    }
    for (std::size_t r = 0; r < table.size(); ++r)
      if (table[r] == -1)
        throw ParseError("non-total table for '" + decl_.name + "': " +
                             std::to_string(table.size() - covered(table)) + " combination(s) missing",
                         decl_.line, decl_.col);
    model_.set_equation(target_, std::move(parents), std::move(table));
  }

  static std::size_t covered(const std::vector<int>& table) {
    return static_cast<std::size_t>(std::count_if(table.begin(), table.end(),
                                                  [](int v) { return v != -1; }));
  }

  void compile_expr() {
    resolve_refs(*decl_.expr, nullptr);
    std::vector<int> parents;
    collect_parents(*decl_.expr, parents);

    std::size_t nrows = 1;
    for (int p : parents) nrows *= model_.var(p).domain.size();
    std::vector<int> table;
    table.reserve(nrows);

    std::vector<int> combo(parents.size(), 0);
    std::vector<int> assignment(model_.size(), -1);
    for (std::size_t r = 0; r < nrows; ++r) {
      for (std::size_t k = 0; k < parents.size(); ++k)
        assignment[static_cast<std::size_t>(parents[k])] = combo[k];
      ExprValue v = eval(*decl_.expr, assignment);
      std::string out = v.is_bool ? (v.b ? "1" : "0") : v.token;
      auto oi = target_var().domain.index_of(out);
      if (!oi)
        throw ParseError("equation for '" + decl_.name + "' produces '" + out +
                             "' outside its domain",
                         decl_.line, decl_.col);
      table.push_back(*oi);
      // Odometer over parent domains, last parent fastest.
      for (int k = static_cast<int>(parents.size()) - 1; k >= 0; --k) {
        if (++combo[static_cast<std::size_t>(k)] <
            static_cast<int>(model_.var(parents[static_cast<std::size_t>(k)]).domain.size()))
          break;
        combo[static_cast<std::size_t>(k)] = 0;
      }
    }
    model_.set_equation(target_, std::move(parents), std::move(table));
  }

  // Decides for every Ref whether it names a variable or a value literal.
  // A bare token is a literal only when it appears opposite a declared
  // variable in == whose domain holds it, or when it lies in the target's
  // own domain; otherwise an alphabetic token must be a declared variable.
  void resolve_refs(const ExprNode& node, const ExprNode* eq_sibling) {
    if (node.kind == ExprNode::Kind::Ref) {
      if (model_.index_of(node.token) >= 0) return;  // variable
      bool literal_ok = false;
      if (eq_sibling && eq_sibling->kind == ExprNode::Kind::Ref) {
        int sv = model_.index_of(eq_sibling->token);
        if (sv >= 0 && model_.var(sv).domain.index_of(node.token)) literal_ok = true;
      }
      if (!literal_ok && target_var().domain.index_of(node.token)) literal_ok = true;
      if (!literal_ok && !is_name_start(node.token[0])) literal_ok = true;  // numeric literal
      if (!literal_ok)
        throw ParseError("undeclared parent '" + node.token + "' in equation for '" + decl_.name +
                             "'",
                         node.line, node.col);
      return;
    }
    if (node.kind == ExprNode::Kind::Eq) {
      resolve_refs(node.kids[0], &node.kids[1]);
      resolve_refs(node.kids[1], &node.kids[0]);
      validate_eq(node);
      return;
    }
    for (const ExprNode& k : node.kids) resolve_refs(k, nullptr);
  }

  void validate_eq(const ExprNode& eq) {
    // When one side is a variable and the other a literal, the literal
    // must lie in that variable's domain.
    const ExprNode& a = eq.kids[0];
    const ExprNode& b = eq.kids[1];
    auto check = [&](const ExprNode& var_side, const ExprNode& lit_side) {
      if (var_side.kind != ExprNode::Kind::Ref || lit_side.kind != ExprNode::Kind::Ref) return;
      int v = model_.index_of(var_side.token);
      if (v < 0 || model_.index_of(lit_side.token) >= 0) return;
      if (!model_.var(v).domain.index_of(lit_side.token))
        throw ParseError("value '" + lit_side.token + "' not in domain of '" + var_side.token + "'",
                         lit_side.line, lit_side.col);
    };
    check(a, b);
    check(b, a);
  }

  void collect_parents(const ExprNode& node, std::vector<int>& parents) {
    if (node.kind == ExprNode::Kind::Ref) {
      int v = model_.index_of(node.token);
      if (v >= 0 && std::find(parents.begin(), parents.end(), v) == parents.end())
        parents.push_back(v);
      return;
    }
    for (const ExprNode& k : node.kids) collect_parents(k, parents);
  }

  ExprValue eval(const ExprNode& node, const std::vector<int>& assignment) {
    switch (node.kind) {
      case ExprNode::Kind::Ref: {
        int v = model_.index_of(node.token);
        if (v >= 0) {
          const Variable& var = model_.var(v);
          return {false, false, var.domain.values[static_cast<std::size_t>(
                                    assignment[static_cast<std::size_t>(v)])]};
        }
        return {false, false, node.token};
      }
      case ExprNode::Kind::Eq: {
        ExprValue a = eval(node.kids[0], assignment);
        ExprValue b = eval(node.kids[1], assignment);
        return {true, as_token(a) == as_token(b), ""};
      }
      case ExprNode::Kind::Not:
        return {true, !truthy(eval(node.kids[0], assignment), node), ""};
      case ExprNode::Kind::And: {
        bool r = true;
        for (const ExprNode& k : node.kids) r = truthy(eval(k, assignment), node) && r;
        return {true, r, ""};
      }
      case ExprNode::Kind::Or: {
        bool r = false;
        for (const ExprNode& k : node.kids) r = truthy(eval(k, assignment), node) || r;
        return {true, r, ""};
      }
    }
    return {};
  }

  static std::string as_token(const ExprValue& v) {
    if (v.is_bool) return v.b ? "1" : "0";
    return v.token;
  }

  bool truthy(const ExprValue& v, const ExprNode& at) {
    if (v.is_bool) return v.b;
    if (v.token == "1") return true;
    if (v.token == "0") return false;
    throw ParseError("value '" + v.token + "' used in boolean context in equation for '" +
                         decl_.name + "'",
                     at.line, at.col);
  }

  CausalModel& model_;
  const Decl& decl_;
  int target_;
};

}  // namespace

CausalModel parse_model(std::string_view text) {
  ModelParser parser(text);
  std::vector<Decl> decls = parser.parse_decls();

  CausalModel model;
  std::vector<int> indices;
  for (const Decl& d : decls) {
    Domain dom = d.domain ? Domain{*d.domain} : Domain::boolean();
    try {
      indices.push_back(model.add_variable(d.name, std::move(dom), d.exogenous));
    } catch (const Error& e) {
      throw ParseError(e.what(), d.line, d.col);
    }
  }
  for (std::size_t i = 0; i < decls.size(); ++i) {
    if (decls[i].exogenous) continue;
    DeclCompiler(model, decls[i], indices[i]).compile();
  }
  model.finalize();  // throws Error on cycles
  return model;
}

std::string print_model(const CausalModel& model) {
  std::ostringstream out;
  for (const Variable& v : model.variables()) {
    if (v.exogenous) {
      out << "exo " << v.name << " : {";
    } else {
      out << "var " << v.name << " : {";
    }
    for (std::size_t i = 0; i < v.domain.size(); ++i) {
      if (i) out << ",";
      out << v.domain.values[i];
    }
    out << "}";
    if (v.exogenous) {
      out << "\n";
      continue;
    }
    out << " = ";
    const StructuralEquation& eq = v.equation;
    if (eq.parents.empty()) {
      out << v.domain.values[static_cast<std::size_t>(eq.table[0])] << "\n";
      continue;
    }
    out << "{ ";
    std::vector<int> combo(eq.parents.size(), 0);
    for (std::size_t r = 0; r < eq.table.size(); ++r) {
      out << "(";
      for (std::size_t k = 0; k < eq.parents.size(); ++k) {
        const Variable& pv = model.var(eq.parents[k]);
        if (k) out << ",";
        out << pv.name << "=" << pv.domain.values[static_cast<std::size_t>(combo[k])];
      }
      out << ") -> " << v.domain.values[static_cast<std::size_t>(eq.table[r])] << "; ";
      for (int k = static_cast<int>(eq.parents.size()) - 1; k >= 0; --k) {
        if (++combo[static_cast<std::size_t>(k)] <
            static_cast<int>(model.var(eq.parents[static_cast<std::size_t>(k)]).domain.size()))
          break;
        combo[static_cast<std::size_t>(k)] = 0;
      }
    }
    out << "}\n";
  }
  return out.str();
}

Context make_context(const CausalModel& model,
                     const std::vector<std::pair<std::string, std::string>>& bindings) {
  const std::vector<int>& exo = model.exogenous_indices();
  std::vector<int> values(exo.size(), -1);
  for (const auto& [name, token] : bindings) {
    int v = model.index_of(name);
    if (v < 0) throw Error("unknown variable '" + name + "'");
    if (!model.var(v).exogenous) throw Error("'" + name + "' is not exogenous");
    auto vi = model.var(v).domain.index_of(token);
    if (!vi) throw Error("value '" + token + "' not in domain of '" + name + "'");
    std::size_t slot = static_cast<std::size_t>(
        std::find(exo.begin(), exo.end(), v) - exo.begin());
    if (values[slot] != -1) throw Error("duplicate context binding for '" + name + "'");
    values[slot] = *vi;
  }
  for (std::size_t k = 0; k < exo.size(); ++k)
    if (values[k] == -1)
      throw Error("context incomplete: missing '" + model.var(exo[k]).name + "'");
  return Context{std::move(values)};
}

Intervention make_intervention(const CausalModel& model,
                               const std::vector<std::pair<std::string, std::string>>& bindings) {
  Intervention iv;
  for (const auto& [name, token] : bindings) {
    int v = model.index_of(name);
    if (v < 0) throw Error("unknown variable '" + name + "'");
    if (model.var(v).exogenous)
      throw Error("cannot intervene on exogenous variable '" + name + "'");
    auto vi = model.var(v).domain.index_of(token);
    if (!vi) throw Error("value '" + token + "' not in domain of '" + name + "'");
    iv.settings.emplace_back(v, *vi);
  }
  std::sort(iv.settings.begin(), iv.settings.end());
  for (std::size_t i = 1; i < iv.settings.size(); ++i)
    if (iv.settings[i].first == iv.settings[i - 1].first)
      throw Error("duplicate intervention on '" + model.var(iv.settings[i].first).name + "'");
  return iv;
}

namespace {

class FormulaParser {
 public:
  FormulaParser(const CausalModel& model, std::string_view text)
      : model_(model), toks_(tokenize(text)) {}

  Formula parse() {
    Formula f = parse_or();
    const Token& t = toks_[pos_];
    if (t.kind != Token::End)
      throw ParseError("unexpected trailing '" + t.text + "' in formula", t.line, t.col);
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  Formula parse_or() {
    std::vector<Formula> kids;
    kids.push_back(parse_and());
    while (peek().kind == Token::Punct && peek().text == "|") {
      next();
      kids.push_back(parse_and());
    }
    if (kids.size() == 1) return std::move(kids[0]);
    return Formula::disjunction(std::move(kids));
  }

  Formula parse_and() {
    std::vector<Formula> kids;
    kids.push_back(parse_unary());
    while (peek().kind == Token::Punct && peek().text == "&") {
      next();
      kids.push_back(parse_unary());
    }
    if (kids.size() == 1) return std::move(kids[0]);
    return Formula::conjunction(std::move(kids));
  }

  Formula parse_unary() {
    if (peek().kind == Token::Punct && peek().text == "!") {
      next();
      return Formula::negation(parse_unary());
    }
    if (peek().kind == Token::Punct && peek().text == "(") {
      next();
      Formula f = parse_or();
      const Token& t = next();
      if (t.kind != Token::Punct || t.text != ")")
        throw ParseError("expected ')', got '" + t.text + "'", t.line, t.col);
      return f;
    }
    return parse_atom();
  }

  Formula parse_atom() {
    const Token& nt = next();
    if (nt.kind != Token::Ident)
      throw ParseError("expected a variable name, got '" + nt.text + "'", nt.line, nt.col);
    int v = model_.index_of(nt.text);
    if (v < 0) throw ParseError("unknown variable '" + nt.text + "'", nt.line, nt.col);
    const Token& op = next();
    if (op.kind != Token::Punct || (op.text != "=" && op.text != "=="))
      throw ParseError("expected '=' after '" + nt.text + "'", op.line, op.col);
    const Token& vt = next();
    if (vt.kind != Token::Ident)
      throw ParseError("expected a value token, got '" + vt.text + "'", vt.line, vt.col);
    auto vi = model_.var(v).domain.index_of(vt.text);
    if (!vi)
      throw ParseError("value '" + vt.text + "' not in domain of '" + nt.text + "'", vt.line,
                       vt.col);
    return Formula::atom(v, *vi);
  }

  const CausalModel& model_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

void evaluate_into(const CausalModel& model, const Context& context,
                   const std::vector<std::pair<int, int>>& forced, std::vector<int>& out) {
  const std::vector<int>& exo = model.exogenous_indices();
  if (context.values.size() != exo.size())
    throw Error("context incomplete: expected " + std::to_string(exo.size()) + " values");
  out.assign(model.size(), -1);
  for (std::size_t k = 0; k < exo.size(); ++k) {
    int v = context.values[k];
    if (v < 0 || v >= static_cast<int>(model.var(exo[k]).domain.size()))
      throw Error("context value out of domain for '" + model.var(exo[k]).name + "'");
    out[static_cast<std::size_t>(exo[k])] = v;
  }
  for (int e : model.evaluation_order()) {
    int pinned = -1;
    for (const auto& [var, val] : forced)
      if (var == e) pinned = val;
    if (pinned >= 0) {
      out[static_cast<std::size_t>(e)] = pinned;
      continue;
    }
    const StructuralEquation& eq = model.var(e).equation;
    out[static_cast<std::size_t>(e)] = eq.table[static_cast<std::size_t>(
        model.table_index(eq, out))];
  }
}

}  // namespace

Formula parse_formula(const CausalModel& model, std::string_view text) {
  return FormulaParser(model, text).parse();
}

std::vector<int> evaluate(const CausalModel& model, const Context& context) {
  std::vector<int> out;
  evaluate_into(model, context, {}, out);
  return out;
}

std::vector<int> evaluate(const CausalModel& model, const Context& context,
                          const Intervention& intervention) {
  for (const auto& [var, val] : intervention.settings) {
    if (var < 0 || var >= static_cast<int>(model.size()) || model.var(var).exogenous)
      throw Error("invalid intervention variable");
    if (val < 0 || val >= static_cast<int>(model.var(var).domain.size()))
      throw Error("intervention value out of domain for '" + model.var(var).name + "'");
  }
  std::vector<int> out;
  evaluate_into(model, context, intervention.settings, out);
  return out;
}

CausalModel intervene(const CausalModel& model, const Intervention& intervention) {
  CausalModel copy = model;
  for (const auto& [var, val] : intervention.settings) {
    if (var < 0 || var >= static_cast<int>(model.size()) || model.var(var).exogenous)
      throw Error("invalid intervention variable");
    if (val < 0 || val >= static_cast<int>(model.var(var).domain.size()))
      throw Error("intervention value out of domain for '" + model.var(var).name + "'");
    copy.set_equation(var, {}, {val});
  }
  copy.finalize();
  return copy;
}

bool satisfies(const CausalModel& model, const Context& context,
               const Intervention& intervention, const Formula& formula) {
  return formula.eval(evaluate(model, context, intervention));
}

}  // namespace causelog
