#include "causelog/explain.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace causelog {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string sanitize_var_name(const std::string& label) {
  std::string out;
  for (char c : label) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
      out.push_back(c);
    } else if (c == '@') {
      out.push_back('.');
    } else {
      out.push_back('_');
    }
  }
  if (out.empty() || !(std::isalpha(static_cast<unsigned char>(out[0])) || out[0] == '_'))
    out.insert(out.begin(), 'n');
  return out;
}

struct EvidenceRef {
  bool is_anomaly = false;
  std::int64_t seq = 0;
  AnomalyKind kind = AnomalyKind::MissingEffect;

  auto operator<=>(const EvidenceRef&) const = default;

  std::string text() const {
    if (is_anomaly) return std::string(to_string(kind)) + "@seq:" + std::to_string(seq);
    return "seq:" + std::to_string(seq);
  }
};

}  // namespace

std::vector<std::vector<std::int64_t>> RootCauses::sets() const {
  std::vector<std::vector<std::int64_t>> out;
  out.push_back(sources);
  if (!frontier.empty()) out.push_back(frontier);
  return out;
}

RootCauses root_causes(const CausalDiagram& diagram, const RuleSet& rules, const LogFile& file,
                       std::int64_t target) {
  if (target < 0 || target >= static_cast<std::int64_t>(diagram.nodes.size()))
    throw Error("unknown target seq " + std::to_string(target));

  std::set<std::int64_t> closure;
  std::vector<std::int64_t> queue{target};
  while (!queue.empty()) {
    std::int64_t n = queue.back();
    queue.pop_back();
    if (!closure.insert(n).second) continue;
    for (std::int64_t p : diagram.parents_of(n)) queue.push_back(p);
  }

  RootCauses out;
  for (std::int64_t n : closure)
    if (!diagram.has_incoming(n)) out.sources.push_back(n);
  std::sort(out.sources.begin(), out.sources.end());
  if (out.sources.empty()) out.sources.push_back(target);

  for (std::int64_t n : out.sources) {
    const std::string& comp = file.records[static_cast<std::size_t>(n)].comp;
    if (rules.entity_for(comp).cls != EntityClass::Agent) out.frontier.push_back(n);
  }
  return out;
}

LiftedScm to_scm(const CausalDiagram& diagram, const std::vector<Anomaly>& anomalies) {
  if (diagram.nodes.empty()) throw Error("cannot lift an empty diagram");

  std::set<std::int64_t> unexplained;
  for (const Anomaly& a : anomalies)
    if (a.kind == AnomalyKind::UnexplainedFact) unexplained.insert(a.seq);

  LiftedScm lifted;
  std::vector<std::string> names;
  std::set<std::string> used;
  for (const FactNode& n : diagram.nodes) {
    std::string name = sanitize_var_name(n.label);
    if (used.contains(name)) name += ".s" + std::to_string(n.seq);
    used.insert(name);
    names.push_back(std::move(name));
  }

  std::vector<std::pair<std::string, std::string>> context_bindings;
  lifted.node_var.assign(diagram.nodes.size(), -1);

  // Declare exogenous drivers next to their node so iteration stays local.
  for (const FactNode& n : diagram.nodes) {
    std::size_t i = static_cast<std::size_t>(n.seq);
    bool source = !diagram.has_incoming(n.seq);
    if (source) {
      lifted.model.add_variable("u." + names[i], Domain::boolean(), true);
      context_bindings.emplace_back("u." + names[i], "1");
    }
    if (unexplained.contains(n.seq)) {
      lifted.model.add_variable("bg." + names[i], Domain::boolean(), true);
      context_bindings.emplace_back("bg." + names[i], "0");
    }
    lifted.node_var[i] = lifted.model.add_variable(names[i], Domain::boolean(), false);
  }

  for (const FactNode& n : diagram.nodes) {
    std::size_t i = static_cast<std::size_t>(n.seq);
    std::vector<int> parents;
    for (std::int64_t p : diagram.parents_of(n.seq))
      parents.push_back(lifted.node_var[static_cast<std::size_t>(p)]);
    if (parents.empty()) parents.push_back(lifted.model.index_of("u." + names[i]));
    if (unexplained.contains(n.seq)) parents.push_back(lifted.model.index_of("bg." + names[i]));

    std::size_t rows = std::size_t{1} << parents.size();
    std::vector<int> table(rows, 1);
    table[0] = 0;  // OR: only the all-zero row yields 0
    lifted.model.set_equation(lifted.node_var[i], std::move(parents), std::move(table));
  }
  lifted.model.finalize();
  lifted.context = make_context(lifted.model, context_bindings);
  return lifted;
}

std::vector<Suspect> suspects(const CausalDiagram& diagram, const std::vector<Anomaly>& anomalies,
                              const RootCauses& roots, const RuleSet& rules,
                              const LogFile& file) {
  std::map<std::string, std::set<EvidenceRef>> tally;

  auto comp_of = [&](std::int64_t seq) { return file.records[static_cast<std::size_t>(seq)].comp; };

  for (std::int64_t seq : roots.sources)
    tally[rules.entity_for(comp_of(seq)).entity].insert({false, seq, {}});

  for (const Anomaly& a : anomalies) {
    std::string comp = comp_of(a.seq);
    EvidenceRef ref{true, a.seq, a.kind};
    tally[rules.entity_for(comp).entity].insert(ref);
    tally["manufacturer-of-" + comp].insert(ref);
    tally["unknown-attacker"].insert(ref);
  }

  // Agents originate actions: every agent-class source record is evidence
  // for its entity even when it lies outside the target's closure.
  for (const FactNode& n : diagram.nodes) {
    if (diagram.has_incoming(n.seq)) continue;
    EntityDecl e = rules.entity_for(comp_of(n.seq));
    if (e.cls == EntityClass::Agent) tally[e.entity].insert({false, n.seq, {}});
  }

  std::vector<Suspect> out;
  for (const auto& [entity, refs] : tally) {
    Suspect s;
    s.entity = entity;
    for (const EvidenceRef& r : refs) s.evidence.push_back(r.text());
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const Suspect& a, const Suspect& b) {
    if (a.evidence.size() != b.evidence.size()) return a.evidence.size() > b.evidence.size();
    return a.entity < b.entity;
  });
  return out;
}

Explanation explain(const LogFile& file, const RuleSet& rules, std::int64_t target,
                    int max_cause_size) {
  CausalDiagram diagram = build_diagram(file, rules);
  if (target < 0 || target >= static_cast<std::int64_t>(diagram.nodes.size()))
    throw Error("unknown target seq " + std::to_string(target));

  Explanation e;
  e.target = target;
  e.target_label = diagram.nodes[static_cast<std::size_t>(target)].label;
  e.anomalies = detect_anomalies(file, rules, diagram);
  e.roots = root_causes(diagram, rules, file, target);

  LiftedScm lifted = to_scm(diagram, e.anomalies);
  Formula goal = Formula::atom(lifted.node_var[static_cast<std::size_t>(target)], 1);
  CauseSearchResult found = find_actual_causes(lifted.model, lifted.context, goal, max_cause_size);

  std::map<int, std::int64_t> seq_of_var;
  for (std::size_t i = 0; i < lifted.node_var.size(); ++i)
    seq_of_var[lifted.node_var[i]] = static_cast<std::int64_t>(i);
  for (const FoundCause& fc : found.causes) {
    HpCause hc;
    for (const auto& [var, _] : fc.candidate.assignment) hc.nodes.push_back(seq_of_var.at(var));
    for (int w : fc.verdict.witness) hc.witness.push_back(seq_of_var.at(w));
    e.hp_causes.push_back(std::move(hc));
  }

  e.suspects = suspects(diagram, e.anomalies, e.roots, rules, file);
  return e;
}

std::string explanation_to_json(const Explanation& e, const CausalDiagram& diagram) {
  auto label = [&](std::int64_t seq) {
    return diagram.nodes[static_cast<std::size_t>(seq)].label;
  };

  ordered_json j = ordered_json::object();
  j["target"] = {{"seq", e.target}, {"label", e.target_label}};

  ordered_json root_sets = ordered_json::array();
  for (const auto& set : e.roots.sets()) {
    ordered_json s = ordered_json::array();
    for (std::int64_t seq : set) s.push_back({{"seq", seq}, {"label", label(seq)}});
    root_sets.push_back(std::move(s));
  }
  j["root_causes"] = std::move(root_sets);

  ordered_json hp = ordered_json::array();
  for (const HpCause& c : e.hp_causes) {
    ordered_json one = ordered_json::object();
    one["nodes"] = c.nodes;
    one["witness"] = c.witness;
    hp.push_back(std::move(one));
  }
  j["hp_causes"] = std::move(hp);

  ordered_json an = ordered_json::array();
  for (const Anomaly& a : e.anomalies) {
    ordered_json one = ordered_json::object();
    one["kind"] = to_string(a.kind);
    one["rule"] = a.rule_id;
    one["seq"] = a.seq;
    one["detail"] = a.detail;
    an.push_back(std::move(one));
  }
  j["anomalies"] = std::move(an);

  ordered_json su = ordered_json::array();
  for (const Suspect& s : e.suspects) {
    ordered_json one = ordered_json::object();
    one["entity"] = s.entity;
    one["evidence"] = s.evidence;
    su.push_back(std::move(one));
  }
  j["suspects"] = std::move(su);

  return j.dump(2) + "\n";
}

std::string explanation_to_text(const Explanation& e, const CausalDiagram& diagram) {
  auto label = [&](std::int64_t seq) {
    return diagram.nodes[static_cast<std::size_t>(seq)].label + " (seq " + std::to_string(seq) +
           ")";
  };

  std::ostringstream out;
  out << "target: " << label(e.target) << "\n";

  out << "root causes:";
  for (std::int64_t seq : e.roots.sources) out << " " << label(seq);
  out << "\n";
  if (!e.roots.frontier.empty()) {
    out << "chain ends at (no acting origin):";
    for (std::int64_t seq : e.roots.frontier) out << " " << label(seq);
    out << "\n";
  }

  out << "anomalies: " << e.anomalies.size() << "\n";
  for (const Anomaly& a : e.anomalies) {
    out << "  [" << to_string(a.kind) << "]";
    if (!a.rule_id.empty()) out << " " << a.rule_id;
    out << " seq " << a.seq << ": " << a.detail << "\n";
  }

  out << "actual causes (lifted model):\n";
  for (const HpCause& c : e.hp_causes) {
    out << "  {";
    for (std::size_t i = 0; i < c.nodes.size(); ++i) {
      if (i) out << ", ";
      out << diagram.nodes[static_cast<std::size_t>(c.nodes[i])].label;
    }
    out << "}";
    if (!c.witness.size()) {
      out << "\n";
      continue;
    }
    out << " witness {";
    for (std::size_t i = 0; i < c.witness.size(); ++i) {
      if (i) out << ", ";
      out << diagram.nodes[static_cast<std::size_t>(c.witness[i])].label;
    }
    out << "}\n";
  }

  out << "suspects:\n";
  for (std::size_t i = 0; i < e.suspects.size(); ++i) {
    const Suspect& s = e.suspects[i];
    out << "  " << (i + 1) << ". " << s.entity << " evidence:";
    for (const std::string& ev : s.evidence) out << " " << ev;
    out << "\n";
  }
  return out.str();
}

}  // namespace causelog
