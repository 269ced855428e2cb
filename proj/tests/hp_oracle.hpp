#pragma once

// Naive reference oracle for the Halpern-Pearl checks. Deliberately
// independent of the engine: evaluation runs repeated sweeps to a fixed
// point instead of a topological pass, and the AC2/AC3 searches enumerate
// every witness bitmask and every alternative assignment with no pruning
// or ordering tricks.

#include <utility>
#include <vector>

#include "causelog/actual_cause.hpp"
#include "causelog/scm.hpp"

namespace hp_oracle {

inline std::vector<int> eval(const causelog::CausalModel& m, const causelog::Context& u,
                             const std::vector<std::pair<int, int>>& forced) {
  std::vector<int> a(m.size(), 0);
  const std::vector<int>& exo = m.exogenous_indices();
  for (std::size_t k = 0; k < exo.size(); ++k)
    a[static_cast<std::size_t>(exo[k])] = u.values[k];
  std::size_t sweeps = m.endogenous_indices().size() + 1;
  for (std::size_t s = 0; s < sweeps; ++s) {
    for (int e : m.endogenous_indices()) {
      int pinned = -1;
      for (const auto& [var, val] : forced)
        if (var == e) pinned = val;
      if (pinned >= 0) {
        a[static_cast<std::size_t>(e)] = pinned;
        continue;
      }
      const causelog::StructuralEquation& eq = m.var(e).equation;
      int idx = 0;
      for (int p : eq.parents)
        idx = idx * static_cast<int>(m.var(p).domain.size()) + a[static_cast<std::size_t>(p)];
      a[static_cast<std::size_t>(e)] = eq.table[static_cast<std::size_t>(idx)];
    }
  }
  return a;
}

inline bool formula_holds(const causelog::Formula& f, const std::vector<int>& a) {
  using K = causelog::Formula::Kind;
  switch (f.kind()) {
    case K::Atom:
      return a[static_cast<std::size_t>(f.var())] == f.value();
    case K::Not:
      return !formula_holds(f.children()[0], a);
    case K::And:
      for (const auto& k : f.children())
        if (!formula_holds(k, a)) return false;
      return true;
    case K::Or:
      for (const auto& k : f.children())
        if (formula_holds(k, a)) return true;
      return false;
  }
  return false;
}

// All joint assignments to `vars`, including the current one.
inline std::vector<std::vector<int>> all_assignments(const causelog::CausalModel& m,
                                                     const std::vector<int>& vars) {
  std::vector<std::vector<int>> out;
  std::vector<int> combo(vars.size(), 0);
  for (;;) {
    out.push_back(combo);
    int k = static_cast<int>(vars.size()) - 1;
    for (; k >= 0; --k) {
      std::size_t kk = static_cast<std::size_t>(k);
      if (++combo[kk] < static_cast<int>(m.var(vars[kk]).domain.size())) break;
      combo[kk] = 0;
    }
    if (k < 0) break;
  }
  return out;
}

inline bool ac2(const causelog::CausalModel& m, const causelog::Context& u,
                const std::vector<std::pair<int, int>>& candidate, const std::vector<int>& actual,
                const causelog::Formula& formula) {
  std::vector<int> rest;
  for (int e : m.endogenous_indices()) {
    bool in_candidate = false;
    for (const auto& [var, _] : candidate)
      if (var == e) in_candidate = true;
    if (!in_candidate) rest.push_back(e);
  }
  std::vector<int> cand_vars;
  for (const auto& [var, _] : candidate) cand_vars.push_back(var);

  for (unsigned long wmask = 0; wmask < (1ul << rest.size()); ++wmask) {
    for (const std::vector<int>& alt : all_assignments(m, cand_vars)) {
      std::vector<std::pair<int, int>> forced;
      for (std::size_t i = 0; i < rest.size(); ++i)
        if (wmask & (1ul << i))
          forced.emplace_back(rest[i], actual[static_cast<std::size_t>(rest[i])]);
      for (std::size_t k = 0; k < cand_vars.size(); ++k)
        forced.emplace_back(cand_vars[k], alt[k]);
      if (!formula_holds(formula, eval(m, u, forced))) return true;
    }
  }
  return false;
}

inline bool ac1(const causelog::CausalModel& m, const causelog::Context& u,
                const std::vector<std::pair<int, int>>& candidate,
                const causelog::Formula& formula) {
  std::vector<int> actual = eval(m, u, {});
  for (const auto& [var, val] : candidate)
    if (actual[static_cast<std::size_t>(var)] != val) return false;
  return formula_holds(formula, actual);
}

inline bool but_for(const causelog::CausalModel& m, const causelog::Context& u,
                    const causelog::CandidateCause& c, const causelog::Formula& formula) {
  if (!ac1(m, u, c.assignment, formula)) return false;
  std::vector<int> actual = eval(m, u, {});
  std::vector<int> cand_vars;
  for (const auto& [var, _] : c.assignment) cand_vars.push_back(var);
  for (const std::vector<int>& alt : all_assignments(m, cand_vars)) {
    std::vector<std::pair<int, int>> forced;
    for (std::size_t k = 0; k < cand_vars.size(); ++k) forced.emplace_back(cand_vars[k], alt[k]);
    if (!formula_holds(formula, eval(m, u, forced))) return true;
  }
  return false;
}

inline bool actual_cause(const causelog::CausalModel& m, const causelog::Context& u,
                         const causelog::CandidateCause& c, const causelog::Formula& formula) {
  if (!ac1(m, u, c.assignment, formula)) return false;
  std::vector<int> actual = eval(m, u, {});
  if (!ac2(m, u, c.assignment, actual, formula)) return false;
  // AC3: every strict nonempty sub-assignment must fail AC1 or AC2.
  std::size_t n = c.assignment.size();
  for (unsigned long mask = 1; mask + 1 < (1ul << n); ++mask) {
    std::vector<std::pair<int, int>> sub;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1ul << i)) sub.push_back(c.assignment[i]);
    if (ac1(m, u, sub, formula) && ac2(m, u, sub, actual, formula)) return false;
  }
  return true;
}

}  // namespace hp_oracle
