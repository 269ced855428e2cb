#pragma once

#include <optional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "causelog/error.hpp"

namespace causelog {

/// Finite, ordered set of distinct value tokens.
struct Domain {
  std::vector<std::string> values;

  std::optional<int> index_of(std::string_view token) const;
  std::size_t size() const { return values.size(); }

  static Domain boolean() { return Domain{{"0", "1"}}; }

  bool operator==(const Domain&) const = default;
};

/// Function table for one endogenous variable. `table` holds one output
/// value index per combination of parent values, in mixed-radix order with
/// the first parent most significant.
struct StructuralEquation {
  std::vector<int> parents;
  std::vector<int> table;

  bool operator==(const StructuralEquation&) const = default;
};

struct Variable {
  std::string name;
  Domain domain;
  bool exogenous = false;
  StructuralEquation equation;  // endogenous only
};

/// Finite-domain structural causal model with acyclic dependencies.
/// Variables keep declaration order; all iteration is deterministic.
class CausalModel {
 public:
  /// Adds a variable, returns its index. Throws on duplicate or bad name.
  int add_variable(std::string name, Domain domain, bool exogenous);

  /// Installs the equation of an endogenous variable. Totality and domain
  /// membership are checked; acyclicity is checked by finalize().
  void set_equation(int var, std::vector<int> parents, std::vector<int> table);

  /// Validates the model as a whole and computes the evaluation order.
  /// Throws Error on a missing equation or a dependency cycle.
  void finalize();

  const std::vector<Variable>& variables() const { return vars_; }
  const Variable& var(int i) const { return vars_[static_cast<std::size_t>(i)]; }
  std::size_t size() const { return vars_.size(); }
  int index_of(std::string_view name) const;  // -1 when absent
  const std::vector<int>& exogenous_indices() const { return exo_; }
  const std::vector<int>& endogenous_indices() const { return endo_; }
  const std::vector<int>& evaluation_order() const { return order_; }
  bool finalized() const { return finalized_; }

  /// Row index into `eq.table` for the parent values in `assignment`.
  int table_index(const StructuralEquation& eq, const std::vector<int>& assignment) const;

 private:
  std::vector<Variable> vars_;
  std::map<std::string, int, std::less<>> by_name_;
  std::vector<int> exo_;
  std::vector<int> endo_;
  std::vector<int> order_;
  bool finalized_ = false;
};

/// Total assignment to the exogenous variables, parallel to
/// CausalModel::exogenous_indices().
struct Context {
  std::vector<int> values;

  bool operator==(const Context&) const = default;
};

/// Partial assignment to endogenous variables, sorted by variable index.
struct Intervention {
  std::vector<std::pair<int, int>> settings;

  bool empty() const { return settings.empty(); }
  bool operator==(const Intervention&) const = default;
};

/// Boolean formula over primitive events `Var = value`.
class Formula {
 public:
  enum class Kind { Atom, Not, And, Or };

  static Formula atom(int var, int value);
  static Formula negation(Formula f);
  static Formula conjunction(std::vector<Formula> kids);
  static Formula disjunction(std::vector<Formula> kids);

  Kind kind() const { return kind_; }
  int var() const { return var_; }
  int value() const { return value_; }
  const std::vector<Formula>& children() const { return kids_; }

  bool eval(const std::vector<int>& assignment) const;

 private:
  Kind kind_ = Kind::Atom;
  int var_ = -1;
  int value_ = -1;
  std::vector<Formula> kids_;
};

/// Parses the model DSL. See README for the grammar.
CausalModel parse_model(std::string_view text);

/// Prints a model back to DSL text; parsing the output yields an
/// equivalent model.
std::string print_model(const CausalModel& model);

/// Builds a Context from name/value-token pairs. The pairs must cover
/// exactly the exogenous set.
Context make_context(const CausalModel& model,
                     const std::vector<std::pair<std::string, std::string>>& bindings);

/// Builds an Intervention from name/value-token pairs (endogenous only,
/// may be empty).
Intervention make_intervention(const CausalModel& model,
                               const std::vector<std::pair<std::string, std::string>>& bindings);

/// Parses a formula such as `D=1 & !(A=0 | B=1)` against a model.
Formula parse_formula(const CausalModel& model, std::string_view text);

/// Unique solution of the model under the context; indexed by variable.
std::vector<int> evaluate(const CausalModel& model, const Context& context);

/// Evaluation with intervened variables pinned to their assigned values.
std::vector<int> evaluate(const CausalModel& model, const Context& context,
                          const Intervention& intervention);

/// Surgery: replaces each intervened variable's equation by a constant.
CausalModel intervene(const CausalModel& model, const Intervention& intervention);

/// Decides (M,u) |= [X<-x] phi.
bool satisfies(const CausalModel& model, const Context& context,
               const Intervention& intervention, const Formula& formula);

}  // namespace causelog
