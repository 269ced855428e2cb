#include "causelog/diagram.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace causelog {

namespace {

// Per-law matching. Phase one pairs every cause with the earliest
// unconsumed in-window effect (one-to-one). Phase two lets unmatched
// causes claim the earliest unconsumed pattern match outside the window
// (a timing violation); causes left with nothing are missing effects.
struct LawMatches {
  struct Pair {
    std::int64_t cause;
    std::int64_t effect;
  };
  std::vector<Pair> in_window;
  std::vector<Pair> out_of_window;
  std::vector<std::int64_t> missing;  // cause seqs
};

LawMatches match_law(const CausalLaw& law, const LogFile& file) {
  LawMatches out;
  const auto& records = file.records;
  std::vector<bool> consumed(records.size(), false);
  std::vector<std::int64_t> causes;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (match(law.cause, records[i])) causes.push_back(static_cast<std::int64_t>(i));

  std::vector<std::int64_t> unmatched;
  for (std::int64_t c : causes) {
    std::int64_t hit = -1;
    for (std::size_t j = static_cast<std::size_t>(c) + 1; j < records.size(); ++j) {
      if (consumed[j] || !match(law.effect, records[j])) continue;
      std::int64_t delta = records[j].t - records[static_cast<std::size_t>(c)].t;
      if (delta < law.window_lo) continue;
      if (law.window_hi && delta > *law.window_hi) break;  // records are time-ordered
      hit = static_cast<std::int64_t>(j);
      break;
    }
    if (hit >= 0) {
      consumed[static_cast<std::size_t>(hit)] = true;
      out.in_window.push_back({c, hit});
    } else {
      unmatched.push_back(c);
    }
  }
  for (std::int64_t c : unmatched) {
    std::int64_t hit = -1;
    for (std::size_t j = static_cast<std::size_t>(c) + 1; j < records.size(); ++j) {
      if (consumed[j] || !match(law.effect, records[j])) continue;
      hit = static_cast<std::int64_t>(j);
      break;
    }
    if (hit >= 0) {
      consumed[static_cast<std::size_t>(hit)] = true;
      out.out_of_window.push_back({c, hit});
    } else {
      out.missing.push_back(c);
    }
  }
  return out;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

int kind_rank(AnomalyKind k) { return static_cast<int>(k); }

}  // namespace

const char* to_string(AnomalyKind k) {
  switch (k) {
    case AnomalyKind::MissingEffect: return "MissingEffect";
    case AnomalyKind::UnexplainedFact: return "UnexplainedFact";
    case AnomalyKind::TimingViolation: return "TimingViolation";
    case AnomalyKind::ConformanceViolation: return "ConformanceViolation";
  }
  return "?";
}

std::vector<std::int64_t> CausalDiagram::parents_of(std::int64_t seq) const {
  std::vector<std::int64_t> out;
  for (const DiagramEdge& e : edges)
    if (e.dst == seq && e.kind == EdgeKind::Observed) out.push_back(e.src);
  return out;
}

bool CausalDiagram::has_incoming(std::int64_t seq) const {
  return std::any_of(edges.begin(), edges.end(), [&](const DiagramEdge& e) {
    return e.dst == seq && e.kind == EdgeKind::Observed;
  });
}

CausalDiagram build_diagram(const LogFile& file, const RuleSet& rules) {
  CausalDiagram d;
  const auto& records = file.records;
  for (std::size_t i = 0; i < records.size(); ++i) {
    d.nodes.push_back({static_cast<std::int64_t>(i),
                       records[i].comp + "." + records[i].event + "@" + std::to_string(records[i].t)});
  }

  // (src, dst) -> origins in insertion order.
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::string>> edges;
  auto add_edge = [&](std::int64_t src, std::int64_t dst, const std::string& origin) {
    auto& origins = edges[{src, dst}];
    if (std::find(origins.begin(), origins.end(), origin) == origins.end())
      origins.push_back(origin);
  };

  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].parent) continue;
    for (std::size_t j = i; j-- > 0;) {
      if (records[j].comp == *records[i].parent) {
        add_edge(static_cast<std::int64_t>(j), static_cast<std::int64_t>(i), "parent");
        break;
      }
    }
  }
  for (const CausalLaw& law : rules.laws) {
    LawMatches m = match_law(law, file);
    for (const auto& p : m.in_window) add_edge(p.cause, p.effect, law.id);
  }

  for (const auto& [key, origins] : edges)
    d.edges.push_back({key.first, key.second, EdgeKind::Observed, origins});
  return d;
}

std::vector<Anomaly> detect_anomalies(const LogFile& file, const RuleSet& rules,
                                      const CausalDiagram& diagram) {
  std::vector<Anomaly> out;
  const auto& records = file.records;

  for (const CausalLaw& law : rules.laws) {
    if (law.modality != Modality::Expected) continue;
    LawMatches m = match_law(law, file);
    for (std::int64_t c : m.missing) {
      const LogRecord& r = records[static_cast<std::size_t>(c)];
      out.push_back({AnomalyKind::MissingEffect, law.id, c,
                     "expected effect of " + r.comp + "." + r.event + "@" + std::to_string(r.t) +
                         " never occurred"});
    }
    for (const auto& p : m.out_of_window) {
      const LogRecord& cause = records[static_cast<std::size_t>(p.cause)];
      const LogRecord& effect = records[static_cast<std::size_t>(p.effect)];
      out.push_back({AnomalyKind::TimingViolation, law.id, p.effect,
                     effect.comp + "." + effect.event + "@" + std::to_string(effect.t) +
                         " follows " + cause.comp + "." + cause.event + "@" +
                         std::to_string(cause.t) + " outside window [" +
                         std::to_string(law.window_lo) + "," +
                         (law.window_hi ? std::to_string(*law.window_hi) : std::string("inf")) +
                         "]"});
    }
  }

  for (std::size_t i = 0; i < records.size(); ++i) {
    std::int64_t seq = static_cast<std::int64_t>(i);
    if (diagram.has_incoming(seq)) continue;
    if (rules.entity_for(records[i].comp).cls == EntityClass::Agent) continue;
    out.push_back({AnomalyKind::UnexplainedFact, "", seq,
                   records[i].comp + "." + records[i].event + "@" + std::to_string(records[i].t) +
                       " has no observed cause"});
  }

  for (const StateMachineSpec& m : rules.machines) {
    for (const ConformanceViolation& v : check_conformance(m, file)) {
      const LogRecord& r = records[static_cast<std::size_t>(v.seq)];
      out.push_back({AnomalyKind::ConformanceViolation, m.id, v.seq,
                     r.comp + "." + r.event + "@" + std::to_string(r.t) +
                         " not allowed in state " + v.state});
    }
  }

  std::stable_sort(out.begin(), out.end(), [](const Anomaly& a, const Anomaly& b) {
    if (a.seq != b.seq) return a.seq < b.seq;
    if (kind_rank(a.kind) != kind_rank(b.kind)) return kind_rank(a.kind) < kind_rank(b.kind);
    return a.rule_id < b.rule_id;
  });
  return out;
}

std::string export_dot(const CausalDiagram& diagram, const std::vector<Anomaly>& anomalies) {
  std::set<std::int64_t> marked;
  for (const Anomaly& a : anomalies) marked.insert(a.seq);

  std::ostringstream out;
  out << "digraph G {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=box];\n";
  for (const FactNode& n : diagram.nodes) {
    out << "  n" << n.seq << " [label=\"" << dot_escape(n.label) << "\"";
    if (marked.contains(n.seq)) out << ", color=red, peripheries=2";
    out << "];\n";
  }
  for (const DiagramEdge& e : diagram.edges) {
    out << "  n" << e.src << " -> n" << e.dst << " [style="
        << (e.kind == EdgeKind::Observed ? "solid" : "dashed");
    if (!e.origins.empty()) {
      out << ", label=\"";
      for (std::size_t i = 0; i < e.origins.size(); ++i) {
        if (i) out << ",";
        out << dot_escape(e.origins[i]);
      }
      out << "\"";
    }
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace causelog
