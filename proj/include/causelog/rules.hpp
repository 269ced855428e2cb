#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "causelog/error.hpp"
#include "causelog/log.hpp"

namespace causelog {

/// Matches records by component, event and param equalities. `*` is a
/// wildcard; at least one of comp/event is concrete.
struct EventPattern {
  std::string comp = "*";
  std::string event = "*";
  std::vector<std::pair<std::string, std::string>> param_constraints;

  bool operator==(const EventPattern&) const = default;
};

enum class Modality { Expected, Permitted };

/// Cause ~> effect within a closed time window, in milliseconds. An
/// unbounded upper end is expressed by nullopt.
struct CausalLaw {
  std::string id;
  std::string scope;  // "", "world" or "system"; metadata only
  EventPattern cause;
  EventPattern effect;
  std::int64_t window_lo = 0;
  std::optional<std::int64_t> window_hi;
  Modality modality = Modality::Expected;
};

struct Transition {
  std::string from;
  EventPattern on;
  std::string to;
};

/// Deterministic machine; states are collected from init and transitions.
struct StateMachineSpec {
  std::string id;
  std::vector<std::string> states;
  std::string initial;
  std::vector<Transition> transitions;
};

enum class EntityClass { Agent, Component, Environment };

const char* to_string(EntityClass c);

struct EntityDecl {
  std::string comp;
  std::string entity;
  EntityClass cls = EntityClass::Component;
};

struct RuleSet {
  std::vector<CausalLaw> laws;
  std::vector<StateMachineSpec> machines;
  std::vector<EntityDecl> entities;

  /// Entity mapped to a component; ("unknown", Component) when unmapped.
  EntityDecl entity_for(std::string_view comp) const;

  /// Appends the other set; throws on duplicate law/machine/entity ids.
  void merge(const RuleSet& other);
};

/// Parses the rule DSL. See README for the grammar.
RuleSet parse_rules(std::string_view text);

/// Prints a rule set back to DSL text; parsing the output round-trips.
std::string serialize(const RuleSet& rules);

bool match(const EventPattern& pattern, const LogRecord& record);

struct ConformanceViolation {
  std::int64_t seq;
  std::string state;  // machine state when the record failed to match

  bool operator==(const ConformanceViolation&) const = default;
};

/// Runs the machine over records matching any of its transition patterns.
/// A record in scope with no transition from the current state is a
/// violation; the state is kept and the run continues.
std::vector<ConformanceViolation> check_conformance(const StateMachineSpec& machine,
                                                    const LogFile& file);

}  // namespace causelog
