#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "causelog/log.hpp"
#include "causelog/rules.hpp"

namespace causelog {

/// One node per log record; label is "comp.event@t".
struct FactNode {
  std::int64_t seq;
  std::string label;

  bool operator==(const FactNode&) const = default;
};

enum class EdgeKind { Observed, Expected };

/// Directed edge, src.seq < dst.seq. Origins list the parent link and/or
/// the law ids that produced the edge, deduplicated.
struct DiagramEdge {
  std::int64_t src;
  std::int64_t dst;
  EdgeKind kind = EdgeKind::Observed;
  std::vector<std::string> origins;

  bool operator==(const DiagramEdge&) const = default;
};

struct CausalDiagram {
  std::vector<FactNode> nodes;   // indexed by seq
  std::vector<DiagramEdge> edges;  // sorted by (src, dst)

  std::vector<std::int64_t> parents_of(std::int64_t seq) const;
  bool has_incoming(std::int64_t seq) const;
};

enum class AnomalyKind { MissingEffect, UnexplainedFact, TimingViolation, ConformanceViolation };

const char* to_string(AnomalyKind k);

struct Anomaly {
  AnomalyKind kind;
  std::string rule_id;  // law or machine id; empty for UnexplainedFact
  std::int64_t seq;     // subject record
  std::string detail;
};

/// Builds the causal diagram: one node per record, solid edges from parent
/// links and from law matches pairing each cause with the earliest
/// unconsumed in-window effect. Expected-law edges that coincide with
/// observed ones collapse into a single observed edge recording all
/// origins.
CausalDiagram build_diagram(const LogFile& file, const RuleSet& rules);

/// MissingEffect for expected causes with no effect at all, TimingViolation
/// when the effect happened outside the window, UnexplainedFact for
/// non-agent records with no observed cause, ConformanceViolation from the
/// machines. Sorted by (seq, kind, rule id).
std::vector<Anomaly> detect_anomalies(const LogFile& file, const RuleSet& rules,
                                      const CausalDiagram& diagram);

/// Graphviz text; observed edges solid, expected-only edges dashed,
/// anomalous nodes marked. Byte-stable for identical inputs.
std::string export_dot(const CausalDiagram& diagram, const std::vector<Anomaly>& anomalies);

}  // namespace causelog
