// Acceptance suite. Runs every criterion end to end against the shipped
// fixtures and prints one PASS/FAIL line each; the exit code is the number
// of failures.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "causelog/actual_cause.hpp"
#include "causelog/cli.hpp"
#include "causelog/diagram.hpp"
#include "causelog/explain.hpp"
#include "causelog/log.hpp"
#include "causelog/rules.hpp"
#include "causelog/scm.hpp"

#include "hp_oracle.hpp"
#include "model_family.hpp"
#include "test_util.hpp"

using namespace causelog;

namespace {

int failures = 0;

void report(int n, const std::string& desc, bool pass, const std::string& note = "") {
  std::printf("[%s] criterion %d: %s%s\n", pass ? "PASS" : "FAIL", n, desc.c_str(),
              note.empty() ? "" : (" (" + note + ")").c_str());
  if (!pass) ++failures;
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fx(const std::string& name) { return test_util::fixture_path(name); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// 1. Firing-squad counterfactual through the CLI.
void criterion1() {
  auto start = std::chrono::steady_clock::now();
  CliResult one = run_cli({"counterfactual", fx("firing_squad.scm"), "--context", "U=1", "--set",
                           "A=0", "--query", "D=1"});
  CliResult two = run_cli({"counterfactual", fx("firing_squad.scm"), "--context", "U=1", "--set",
                           "A=0,B=0", "--query", "D=1"});
  double elapsed = seconds_since(start);
  bool pass = one.code == 0 && one.out == "true\n" && two.code == 4 && two.out == "false\n" &&
              elapsed < 1.0;
  report(1, "firing-squad counterfactual ([A<-0]D=1 true, [A<-0,B<-0]D=1 false)", pass,
         std::to_string(elapsed) + "s");
}

// 2. Modified-HP verdicts on the firing squad, against the oracle.
void criterion2() {
  auto start = std::chrono::steady_clock::now();
  CausalModel m = parse_model(test_util::read_file(fx("firing_squad.scm")));
  Context u = make_context(m, {{"U", "1"}});
  Formula dead = parse_formula(m, "D=1");

  CauseSearchResult r = find_actual_causes(m, u, dead, 2);
  auto names = [&](const FoundCause& fc) {
    std::vector<std::string> out;
    for (const auto& [var, _] : fc.candidate.assignment) out.push_back(m.var(var).name);
    return out;
  };
  bool sets_ok = r.causes.size() == 3 && names(r.causes[0]) == std::vector<std::string>{"C"} &&
                 names(r.causes[1]) == std::vector<std::string>{"D"} &&
                 names(r.causes[2]) == std::vector<std::string>{"A", "B"};

  CauseVerdict lone = is_actual_cause(m, u, make_candidate(m, {{"A", "1"}}), dead);
  bool a_fails_ac2 = !lone.is_cause && lone.failed_condition == HpCondition::AC2;
  CauseVerdict padded =
      is_actual_cause(m, u, make_candidate(m, {{"A", "1"}, {"B", "1"}, {"C", "1"}}), dead);
  bool abc_fails_ac3 = !padded.is_cause && padded.failed_condition == HpCondition::AC3;

  // Cross-check every verdict above against the naive oracle.
  bool oracle_ok =
      hp_oracle::actual_cause(m, u, make_candidate(m, {{"C", "1"}}), dead) &&
      hp_oracle::actual_cause(m, u, make_candidate(m, {{"D", "1"}}), dead) &&
      hp_oracle::actual_cause(m, u, make_candidate(m, {{"A", "1"}, {"B", "1"}}), dead) &&
      !hp_oracle::actual_cause(m, u, make_candidate(m, {{"A", "1"}}), dead) &&
      !hp_oracle::actual_cause(m, u, make_candidate(m, {{"A", "1"}, {"B", "1"}, {"C", "1"}}),
                               dead);
  double elapsed = seconds_since(start);
  report(2, "modified-HP verdicts on the firing squad match the brute-force oracle",
         sets_ok && a_fails_ac2 && abc_fails_ac3 && oracle_ok && elapsed < 1.0,
         std::to_string(elapsed) + "s");
}

// 3. Exhaustive oracle-equivalence sweep over the generated family with up
// to 4 endogenous variables.
void criterion3() {
  auto start = std::chrono::steady_clock::now();
  long long checked = 0;
  long long disagreements = 0;
  for (int n = 1; n <= 4; ++n) {
    std::vector<int> choices(static_cast<std::size_t>(n), 0);
    do {
      CausalModel m = model_family::build(choices);
      const std::vector<int>& endo = m.endogenous_indices();
      for (const Context& u : test_util::all_contexts(m)) {
        std::vector<int> actual = evaluate(m, u);
        for (int target : endo) {
          Formula goal = Formula::atom(target, 1);
          for (std::size_t i = 0; i < endo.size(); ++i) {
            CandidateCause c1{{{endo[i], actual[static_cast<std::size_t>(endo[i])]}}};
            if (is_actual_cause(m, u, c1, goal).is_cause !=
                hp_oracle::actual_cause(m, u, c1, goal))
              ++disagreements;
            ++checked;
            for (std::size_t j = i + 1; j < endo.size(); ++j) {
              CandidateCause c2{{{endo[i], actual[static_cast<std::size_t>(endo[i])]},
                                 {endo[j], actual[static_cast<std::size_t>(endo[j])]}}};
              if (is_actual_cause(m, u, c2, goal).is_cause !=
                  hp_oracle::actual_cause(m, u, c2, goal))
                ++disagreements;
              ++checked;
            }
          }
        }
      }
    } while (model_family::next_model(choices));
  }
  double elapsed = seconds_since(start);
  report(3, "oracle equivalence over all models with <= 4 endogenous variables",
         disagreements == 0 && elapsed < 60.0,
         std::to_string(checked) + " verdicts, " + std::to_string(disagreements) +
             " disagreements, " + std::to_string(elapsed) + "s");
}

// 4. Scenario discrimination between the steered and the rogue UAV runs.
void criterion4() {
  CliResult pilot = run_cli({"explain", fx("uav_pilot.log"), "--rules", fx("uav.rules"),
                             "--target", "11", "--format", "json"});
  CliResult rogue = run_cli({"explain", fx("uav_rogue.log"), "--rules", fx("uav.rules"),
                             "--target", "7", "--format", "json"});
  bool golden_ok =
      pilot.code == 0 && rogue.code == 0 &&
      pilot.out == test_util::read_file(test_util::golden_path("uav_pilot_explain.json")) &&
      rogue.out == test_util::read_file(test_util::golden_path("uav_rogue_explain.json"));

  Explanation pe = explain(parse_log(test_util::read_file(fx("uav_pilot.log"))),
                           parse_rules(test_util::read_file(fx("uav.rules"))), 11);
  Explanation re = explain(parse_log(test_util::read_file(fx("uav_rogue.log"))),
                           parse_rules(test_util::read_file(fx("uav.rules"))), 7);

  bool pilot_top = !pe.suspects.empty() && pe.suspects[0].entity == "pilot";
  bool pilot_evidence = pilot_top &&
                        std::find(pe.suspects[0].evidence.begin(), pe.suspects[0].evidence.end(),
                                  "seq:5") != pe.suspects[0].evidence.end() &&
                        std::find(pe.suspects[0].evidence.begin(), pe.suspects[0].evidence.end(),
                                  "seq:8") != pe.suspects[0].evidence.end();
  bool rogue_top_not_pilot = !re.suspects.empty() && re.suspects[0].entity != "pilot";
  bool rogue_anomalous = false;
  for (const Anomaly& a : re.anomalies)
    if ((a.kind == AnomalyKind::UnexplainedFact || a.kind == AnomalyKind::ConformanceViolation) &&
        (a.seq == 5 || a.seq == 6))
      rogue_anomalous = true;
  bool frontier_ok = re.roots.frontier == std::vector<std::int64_t>{5, 6};

  report(4, "uav_pilot blames the pilot, uav_rogue blames the flight controller",
         golden_ok && pilot_top && pilot_evidence && rogue_top_not_pilot && rogue_anomalous &&
             frontier_ok);
}

// 5. The roomba's 15-second bump is a timing violation; in-window bumps
// are not.
void criterion5() {
  CliResult late = run_cli({"anomalies", fx("roomba.log"), "--rules", fx("roomba.rules")});
  bool late_ok = late.code == 0;
  // Exactly one anomaly, a TimingViolation at the third-lane bump.
  late_ok = late_ok && late.out.find("\"kind\": \"TimingViolation\"") != std::string::npos;
  late_ok = late_ok && late.out.find("\"seq\": 6") != std::string::npos;
  std::size_t count = 0;
  for (std::size_t pos = 0; (pos = late.out.find("\"kind\"", pos)) != std::string::npos; ++pos)
    ++count;
  late_ok = late_ok && count == 1;

  CliResult clean = run_cli({"anomalies", fx("roomba_clean.log"), "--rules", fx("roomba.rules")});
  bool clean_ok = clean.code == 0 && clean.out == "[]\n";
  report(5, "roomba bump at 15s is the only anomaly; in-window bumps are silent",
         late_ok && clean_ok);
}

// 6. Tamper evidence under random single-byte edits.
void criterion6() {
  std::string pristine = test_util::read_file(fx("uav_pilot.log"));
  std::vector<std::string> lines;
  std::stringstream ss(pristine);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);

  std::mt19937 rng(20260809);
  const std::string alnum = "abcdefghijklmnopqrstuvwxyz0123456789";
  const std::string hexd = "0123456789abcdef";
  int trials = 0, detected = 0;
  std::filesystem::path tmp = std::filesystem::temp_directory_path() / "causelog_tamper.log";

  while (trials < 120) {
    std::size_t k = rng() % lines.size();
    std::string mutated_line = lines[k];
    // Pick a byte inside a record body field whose mutation keeps the
    // line valid JSON: the event string, a param value, or the hash.
    std::string anchor;
    const char* cls = nullptr;
    switch (rng() % 3) {
      case 0: anchor = "\"event\":\""; cls = alnum.c_str(); break;
      case 1: anchor = "\"h\":\""; cls = hexd.c_str(); break;
      default: anchor = "\"dir\":\""; cls = alnum.c_str(); break;
    }
    std::size_t field = mutated_line.find(anchor);
    if (field == std::string::npos) continue;
    std::size_t begin = field + anchor.size();
    std::size_t end = mutated_line.find('"', begin);
    if (end == std::string::npos || end == begin) continue;
    std::size_t at = begin + rng() % (end - begin);
    std::string classes(cls);
    char replacement = classes[rng() % classes.size()];
    if (replacement == mutated_line[at]) continue;
    mutated_line[at] = replacement;

    std::string mutated;
    for (std::size_t i = 0; i < lines.size(); ++i)
      mutated += (i == k ? mutated_line : lines[i]) + "\n";
    test_util::write_file(tmp.string(), mutated);

    ++trials;
    CliResult r = run_cli({"verify", tmp.string()});
    if (r.code != 2) continue;
    std::size_t pos = r.out.find("tampered at seq ");
    if (pos == std::string::npos) continue;
    long reported = std::stol(r.out.substr(pos + 16));
    if (reported <= static_cast<long>(k)) ++detected;
  }
  report(6, "every random single-byte edit is detected at or before its record",
         trials >= 100 && detected == trials,
         std::to_string(detected) + "/" + std::to_string(trials));
}

// 7. Byte-determinism of diagram and explain across runs, every fixture.
void criterion7() {
  struct Case {
    std::string log, rules, target;
  };
  const std::vector<Case> cases = {
      {"firing_squad.log", "world.rules", "4"}, {"uav_pilot.log", "uav.rules", "11"},
      {"uav_rogue.log", "uav.rules", "7"},      {"roomba.log", "roomba.rules", "6"},
      {"roomba_clean.log", "roomba.rules", "4"},
  };
  bool pass = true;
  for (const Case& c : cases) {
    CliResult d1 = run_cli({"diagram", fx(c.log), "--rules", fx(c.rules)});
    CliResult d2 = run_cli({"diagram", fx(c.log), "--rules", fx(c.rules)});
    CliResult e1 = run_cli({"explain", fx(c.log), "--rules", fx(c.rules), "--target", c.target,
                            "--format", "json"});
    CliResult e2 = run_cli({"explain", fx(c.log), "--rules", fx(c.rules), "--target", c.target,
                            "--format", "json"});
    pass = pass && d1.code == 0 && d1.out == d2.out && !d1.out.empty();
    pass = pass && e1.code == 0 && e1.out == e2.out && !e1.out.empty();
  }
  report(7, "diagram --dot and explain --format json are byte-identical across runs", pass);
}

// 8. Desk-scale bound: HP checks over a 12-variable lifted model.
void criterion8() {
  LogFile file = parse_log(test_util::read_file(fx("uav_pilot.log")));
  RuleSet rules = parse_rules(test_util::read_file(fx("uav.rules")));
  CausalDiagram d = build_diagram(file, rules);
  LiftedScm lifted = to_scm(d, detect_anomalies(file, rules, d));
  bool twelve = lifted.model.endogenous_indices().size() == 12;

  auto start = std::chrono::steady_clock::now();
  // Single-candidate check through the CLI's model surface.
  std::filesystem::path tmp = std::filesystem::temp_directory_path() / "causelog_lifted.scm";
  test_util::write_file(tmp.string(), print_model(lifted.model));
  std::vector<std::string> args = {"actual-cause", tmp.string()};
  const std::vector<int>& exo = lifted.model.exogenous_indices();
  for (std::size_t i = 0; i < exo.size(); ++i) {
    args.push_back("--context");
    args.push_back(lifted.model.var(exo[i]).name + "=" +
                   lifted.model.var(exo[i])
                       .domain.values[static_cast<std::size_t>(lifted.context.values[i])]);
  }
  args.push_back("--candidate");
  args.push_back("pilot.cmd_left.10000=1,pilot.cmd_left.13000=1");
  args.push_back("--query");
  args.push_back("uav.telemetry.16000=1");
  CliResult single = run_cli(args);

  // Full minimal-cause search with the default cap.
  Formula goal = Formula::atom(lifted.node_var[11], 1);
  CauseSearchResult all = find_actual_causes(lifted.model, lifted.context, goal, 3);
  double elapsed = seconds_since(start);

  bool pass = twelve && single.code == 0 &&
              single.out.find("\"is_cause\": true") != std::string::npos && !all.causes.empty() &&
              elapsed < 10.0;
  report(8, "actual-cause on a 12-variable lifted model finishes under 10s", pass,
         std::to_string(elapsed) + "s");
}

}  // namespace

int main() {
  try {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected exception: %s\n", e.what());
    return 99;
  }
  return failures;
}
