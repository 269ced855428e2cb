#include "causelog/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "causelog/actual_cause.hpp"
#include "causelog/diagram.hpp"
#include "causelog/explain.hpp"
#include "causelog/log.hpp"
#include "causelog/rules.hpp"
#include "causelog/scm.hpp"

namespace causelog::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitTampered = 2;
constexpr int kExitAnomalies = 3;
constexpr int kExitNegative = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// "U=1,V=high" or repeated flags; both forms combine.
std::vector<std::pair<std::string, std::string>> parse_bindings(
    const std::vector<std::string>& raw) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const std::string& item : raw) {
    std::size_t start = 0;
    while (start <= item.size()) {
      std::size_t comma = item.find(',', start);
      std::string part = item.substr(start, comma == std::string::npos ? comma : comma - start);
      if (!part.empty()) {
        std::size_t eq = part.find('=');
        if (eq == std::string::npos || eq == 0 || eq == part.size() - 1)
          throw Error("expected name=value, got '" + part + "'");
        out.emplace_back(part.substr(0, eq), part.substr(eq + 1));
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return out;
}

RuleSet load_rules(const std::vector<std::string>& paths) {
  RuleSet merged;
  for (const std::string& path : paths) merged.merge(parse_rules(read_file(path)));
  return merged;
}

int max_cause_size_from_env() {
  const char* env = std::getenv("CAUSELOG_MAX_CAUSE_SIZE");
  if (!env) return 3;
  try {
    int v = std::stoi(env);
    if (v < 1) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw Error("CAUSELOG_MAX_CAUSE_SIZE must be a positive integer");
  }
}

ordered_json anomalies_to_json(const std::vector<Anomaly>& anomalies) {
  ordered_json arr = ordered_json::array();
  for (const Anomaly& a : anomalies) {
    ordered_json one = ordered_json::object();
    one["kind"] = to_string(a.kind);
    one["rule"] = a.rule_id;
    one["seq"] = a.seq;
    one["detail"] = a.detail;
    arr.push_back(std::move(one));
  }
  return arr;
}

int cmd_verify(const std::string& log_path, std::ostream& out) {
  LogFile file = parse_log(read_file(log_path));
  if (!file.chained) throw Error("log is not chained; nothing to verify");
  ChainReport report = verify_chain(file);
  if (!report.ok) {
    out << "tampered at seq " << report.first_bad_seq << "\n";
    return kExitTampered;
  }
  out << "ok: " << file.records.size() << " record(s), chain verified\n";
  return kExitOk;
}

int cmd_diagram(const std::string& log_path, const std::vector<std::string>& rules_paths,
                std::ostream& out) {
  LogFile file = parse_log(read_file(log_path));
  RuleSet rules = load_rules(rules_paths);
  CausalDiagram diagram = build_diagram(file, rules);
  out << export_dot(diagram, detect_anomalies(file, rules, diagram));
  return kExitOk;
}

int cmd_anomalies(const std::string& log_path, const std::vector<std::string>& rules_paths,
                  bool fail_on_anomaly, std::ostream& out) {
  LogFile file = parse_log(read_file(log_path));
  RuleSet rules = load_rules(rules_paths);
  CausalDiagram diagram = build_diagram(file, rules);
  std::vector<Anomaly> anomalies = detect_anomalies(file, rules, diagram);
  out << anomalies_to_json(anomalies).dump(2) << "\n";
  return (fail_on_anomaly && !anomalies.empty()) ? kExitAnomalies : kExitOk;
}

int cmd_counterfactual(const std::string& model_path, const std::vector<std::string>& context_raw,
                       const std::vector<std::string>& set_raw, const std::string& query,
                       std::ostream& out) {
  CausalModel model = parse_model(read_file(model_path));
  Context context = make_context(model, parse_bindings(context_raw));
  Intervention intervention = make_intervention(model, parse_bindings(set_raw));
  Formula formula = parse_formula(model, query);
  bool verdict = satisfies(model, context, intervention, formula);
  out << (verdict ? "true" : "false") << "\n";
  return verdict ? kExitOk : kExitNegative;
}

int cmd_actual_cause(const std::string& model_path, const std::vector<std::string>& context_raw,
                     const std::vector<std::string>& candidate_raw, const std::string& query,
                     std::ostream& out) {
  CausalModel model = parse_model(read_file(model_path));
  Context context = make_context(model, parse_bindings(context_raw));
  CandidateCause candidate = make_candidate(model, parse_bindings(candidate_raw));
  Formula formula = parse_formula(model, query);
  CauseVerdict verdict = is_actual_cause(model, context, candidate, formula);

  ordered_json j = ordered_json::object();
  ordered_json cand = ordered_json::object();
  for (const auto& [var, val] : candidate.assignment)
    cand[model.var(var).name] = model.var(var).domain.values[static_cast<std::size_t>(val)];
  j["candidate"] = std::move(cand);
  j["is_cause"] = verdict.is_cause;
  if (verdict.is_cause) {
    ordered_json witness = ordered_json::array();
    for (int w : verdict.witness) witness.push_back(model.var(w).name);
    j["witness"] = std::move(witness);
    ordered_json alt = ordered_json::object();
    for (const auto& [var, val] : verdict.alt_assignment)
      alt[model.var(var).name] = model.var(var).domain.values[static_cast<std::size_t>(val)];
    j["alt"] = std::move(alt);
  } else {
    j["failed_condition"] = to_string(*verdict.failed_condition);
  }
  out << j.dump(2) << "\n";
  return verdict.is_cause ? kExitOk : kExitNegative;
}

int cmd_causes(const std::string& log_path, const std::vector<std::string>& rules_paths,
               std::int64_t target, const std::string& format, std::ostream& out) {
  LogFile file = parse_log(read_file(log_path));
  RuleSet rules = load_rules(rules_paths);
  CausalDiagram diagram = build_diagram(file, rules);
  RootCauses roots = root_causes(diagram, rules, file, target);

  auto label = [&](std::int64_t seq) {
    return diagram.nodes[static_cast<std::size_t>(seq)].label;
  };
  if (format == "json") {
    ordered_json j = ordered_json::object();
    j["target"] = {{"seq", target}, {"label", label(target)}};
    ordered_json sets = ordered_json::array();
    for (const auto& set : roots.sets()) {
      ordered_json s = ordered_json::array();
      for (std::int64_t seq : set) s.push_back({{"seq", seq}, {"label", label(seq)}});
      sets.push_back(std::move(s));
    }
    j["root_causes"] = std::move(sets);
    out << j.dump(2) << "\n";
  } else {
    out << "target: " << label(target) << " (seq " << target << ")\n";
    out << "root causes:";
    for (std::int64_t seq : roots.sources) out << " " << label(seq) << " (seq " << seq << ")";
    out << "\n";
    if (!roots.frontier.empty()) {
      out << "chain ends at (no acting origin):";
      for (std::int64_t seq : roots.frontier) out << " " << label(seq) << " (seq " << seq << ")";
      out << "\n";
    }
  }
  return kExitOk;
}

int cmd_explain(const std::string& log_path, const std::vector<std::string>& rules_paths,
                std::int64_t target, const std::string& format, std::ostream& out) {
  LogFile file = parse_log(read_file(log_path));
  RuleSet rules = load_rules(rules_paths);
  CausalDiagram diagram = build_diagram(file, rules);
  Explanation e = explain(file, rules, target, max_cause_size_from_env());
  if (format == "json") {
    out << explanation_to_json(e, diagram);
  } else {
    out << explanation_to_text(e, diagram);
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"causelog: causal accountability over tamper-evident event logs"};
  app.require_subcommand(1);

  std::string log_path, model_path, query, format = "text";
  std::vector<std::string> rules_paths, context_raw, set_raw, candidate_raw;
  std::int64_t target = -1;
  bool fail_on_anomaly = false;
  bool dot = false;

  CLI::App* verify = app.add_subcommand("verify", "Check the tamper-evidence hash chain");
  verify->add_option("log", log_path, "JSON-lines log file")->required();

  CLI::App* diagram = app.add_subcommand("diagram", "Build the causal diagram");
  diagram->add_option("log", log_path, "JSON-lines log file")->required();
  diagram->add_option("--rules", rules_paths, "rule file, repeatable; merged in order")
      ->required();
  diagram->add_flag("--dot", dot, "emit Graphviz DOT (the default output)");

  CLI::App* anomalies = app.add_subcommand("anomalies", "List rule/log mismatches");
  anomalies->add_option("log", log_path, "JSON-lines log file")->required();
  anomalies->add_option("--rules", rules_paths, "rule file, repeatable; merged in order")
      ->required();
  anomalies->add_flag("--fail-on-anomaly", fail_on_anomaly, "exit 3 when anomalies exist");

  CLI::App* counterfactual =
      app.add_subcommand("counterfactual", "Decide (M,u) |= [X<-x] phi on a model");
  counterfactual->add_option("model", model_path, "model DSL file")->required();
  counterfactual->add_option("--context", context_raw, "exogenous binding U=v, repeatable")
      ->required();
  counterfactual->add_option("--set", set_raw, "intervention X=v, repeatable");
  counterfactual->add_option("--query", query, "formula, e.g. \"D=1\"")->required();

  CLI::App* actual_cause =
      app.add_subcommand("actual-cause", "Modified Halpern-Pearl cause test");
  actual_cause->add_option("model", model_path, "model DSL file")->required();
  actual_cause->add_option("--context", context_raw, "exogenous binding U=v, repeatable")
      ->required();
  actual_cause->add_option("--candidate", candidate_raw, "candidate X=v[,Y=w]")->required();
  actual_cause->add_option("--query", query, "formula, e.g. \"D=1\"")->required();

  CLI::App* causes = app.add_subcommand("causes", "Root causes of a log event");
  causes->add_option("log", log_path, "JSON-lines log file")->required();
  causes->add_option("--rules", rules_paths, "rule file, repeatable; merged in order")->required();
  causes->add_option("--target", target, "seq of the event under investigation")->required();
  causes->add_option("--format", format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));

  CLI::App* explain_cmd = app.add_subcommand("explain", "Full explanation report");
  explain_cmd->add_option("log", log_path, "JSON-lines log file")->required();
  explain_cmd->add_option("--rules", rules_paths, "rule file, repeatable; merged in order")
      ->required();
  explain_cmd->add_option("--target", target, "seq of the event under investigation")->required();
  explain_cmd->add_option("--format", format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));

  std::vector<const char*> argv;
  argv.push_back("causelog");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitError;
  }

  try {
    if (verify->parsed()) return cmd_verify(log_path, out);
    if (diagram->parsed()) return cmd_diagram(log_path, rules_paths, out);
    if (anomalies->parsed()) return cmd_anomalies(log_path, rules_paths, fail_on_anomaly, out);
    if (counterfactual->parsed())
      return cmd_counterfactual(model_path, context_raw, set_raw, query, out);
    if (actual_cause->parsed())
      return cmd_actual_cause(model_path, context_raw, candidate_raw, query, out);
    if (causes->parsed()) return cmd_causes(log_path, rules_paths, target, format, out);
    if (explain_cmd->parsed()) return cmd_explain(log_path, rules_paths, target, format, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  err << "error: no subcommand\n";
  return kExitError;
}

}  // namespace causelog::cli
