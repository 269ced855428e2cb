#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "causelog/actual_cause.hpp"
#include "causelog/diagram.hpp"
#include "causelog/log.hpp"
#include "causelog/rules.hpp"
#include "causelog/scm.hpp"

namespace causelog {

/// Backward closure over observed edges. `sources` are the in-degree-zero
/// ancestors (the target itself when it has none); `frontier` are the
/// sources belonging to non-agent components, where the chain ends short
/// of an acting origin.
struct RootCauses {
  std::vector<std::int64_t> sources;
  std::vector<std::int64_t> frontier;

  /// Report form: the source set, plus the frontier as a second set when
  /// it is non-empty.
  std::vector<std::vector<std::int64_t>> sets() const;
};

RootCauses root_causes(const CausalDiagram& diagram, const RuleSet& rules, const LogFile& file,
                       std::int64_t target);

/// Diagram lifted to a structural causal model: one binary variable per
/// fact node, each node the OR of its observed parents. Source nodes get a
/// dedicated exogenous driver (set to 1: the event did occur); nodes with
/// an UnexplainedFact anomaly also get a background exogenous input
/// (set to 0) that counterfactual queries can toggle.
struct LiftedScm {
  CausalModel model;
  Context context;
  std::vector<int> node_var;  // seq -> endogenous variable index
};

LiftedScm to_scm(const CausalDiagram& diagram, const std::vector<Anomaly>& anomalies);

struct Suspect {
  std::string entity;
  std::vector<std::string> evidence;  // "seq:N" record refs and "Kind@seq:N" anomaly refs
};

/// Entities implicated by root causes, anomalies (each anomaly also adds
/// the fixed fallbacks manufacturer-of-<comp> and unknown-attacker) and
/// agent-originated source records. Ranked by evidence count, then name.
std::vector<Suspect> suspects(const CausalDiagram& diagram, const std::vector<Anomaly>& anomalies,
                              const RootCauses& roots, const RuleSet& rules,
                              const LogFile& file);

/// One actual cause over the lifted model, reported as node seqs.
struct HpCause {
  std::vector<std::int64_t> nodes;
  std::vector<std::int64_t> witness;
};

struct Explanation {
  std::int64_t target;
  std::string target_label;
  RootCauses roots;
  std::vector<HpCause> hp_causes;
  std::vector<Anomaly> anomalies;
  std::vector<Suspect> suspects;
};

/// Full pipeline: diagram, anomalies, root causes, lifted-model actual
/// causes (candidates up to max_cause_size variables), suspects.
Explanation explain(const LogFile& file, const RuleSet& rules, std::int64_t target,
                    int max_cause_size = 3);

/// JSON report with stable key order.
std::string explanation_to_json(const Explanation& e, const CausalDiagram& diagram);

/// Human-readable narrative.
std::string explanation_to_text(const Explanation& e, const CausalDiagram& diagram);

}  // namespace causelog
