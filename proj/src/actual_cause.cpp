#include "causelog/actual_cause.hpp"

#include <algorithm>

namespace causelog {

const char* to_string(HpCondition c) {
  switch (c) {
    case HpCondition::AC1: return "AC1";
    case HpCondition::AC2: return "AC2";
    case HpCondition::AC3: return "AC3";
  }
  return "?";
}

CandidateCause make_candidate(const CausalModel& model,
                              const std::vector<std::pair<std::string, std::string>>& bindings) {
  if (bindings.empty()) throw Error("candidate cause must name at least one variable");
  CandidateCause c;
  for (const auto& [name, token] : bindings) {
    int v = model.index_of(name);
    if (v < 0) throw Error("unknown variable '" + name + "'");
    if (model.var(v).exogenous)
      throw Error("candidate variable '" + name + "' must be endogenous");
    auto vi = model.var(v).domain.index_of(token);
    if (!vi) throw Error("value '" + token + "' not in domain of '" + name + "'");
    c.assignment.emplace_back(v, *vi);
  }
  std::sort(c.assignment.begin(), c.assignment.end());
  for (std::size_t i = 1; i < c.assignment.size(); ++i)
    if (c.assignment[i].first == c.assignment[i - 1].first)
      throw Error("duplicate candidate variable '" + model.var(c.assignment[i].first).name + "'");
  return c;
}

namespace {

void validate_candidate(const CausalModel& model, const CandidateCause& c) {
  if (c.assignment.empty()) throw Error("candidate cause must name at least one variable");
  for (const auto& [var, val] : c.assignment) {
    if (var < 0 || var >= static_cast<int>(model.size()) || model.var(var).exogenous)
      throw Error("candidate variables must be endogenous");
    if (val < 0 || val >= static_cast<int>(model.var(var).domain.size()))
      throw Error("candidate value out of domain for '" + model.var(var).name + "'");
  }
}

// Advances `alt` through all joint value assignments of the candidate
// variables (odometer, last variable fastest). Returns false after the
// last combination.
bool next_alt(const CausalModel& model, const std::vector<std::pair<int, int>>& vars,
              std::vector<int>& alt) {
  for (int k = static_cast<int>(alt.size()) - 1; k >= 0; --k) {
    std::size_t kk = static_cast<std::size_t>(k);
    if (++alt[kk] < static_cast<int>(model.var(vars[kk].first).domain.size())) return true;
    alt[kk] = 0;
  }
  return false;
}

// First combination of `k` items out of `m`, then lexicographic successors.
bool next_combination(std::vector<int>& c, int m) {
  int k = static_cast<int>(c.size());
  for (int i = k - 1; i >= 0; --i) {
    if (c[static_cast<std::size_t>(i)] < m - (k - i)) {
      ++c[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j)
        c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

// Solution of the model with `forced` variables pinned. No validation;
// callers establish context validity via evaluate() first.
void eval_forced(const CausalModel& model, const Context& context,
                 const std::vector<std::pair<int, int>>& forced, std::vector<int>& out) {
  const std::vector<int>& exo = model.exogenous_indices();
  out.assign(model.size(), -1);
  for (std::size_t k = 0; k < exo.size(); ++k)
    out[static_cast<std::size_t>(exo[k])] = context.values[k];
  for (int e : model.evaluation_order()) {
    int pinned = -1;
    for (const auto& [var, val] : forced) {
      if (var == e) {
        pinned = val;
        break;
      }
    }
    if (pinned >= 0) {
      out[static_cast<std::size_t>(e)] = pinned;
      continue;
    }
    const StructuralEquation& eq = model.var(e).equation;
    out[static_cast<std::size_t>(e)] =
        eq.table[static_cast<std::size_t>(model.table_index(eq, out))];
  }
}

struct Ac2Hit {
  std::vector<int> witness;                         // var indices, ascending
  std::vector<std::pair<int, int>> alt_assignment;  // candidate vars with alternative values
};

// Searches witness sets by increasing size, then declaration order, and
// alternative assignments in odometer order. Returns the first hit.
std::optional<Ac2Hit> search_ac2(const CausalModel& model, const Context& context,
                                 const std::vector<std::pair<int, int>>& candidate,
                                 const std::vector<int>& actual, const Formula& formula) {
  std::vector<int> pool;  // endogenous vars outside the candidate, declaration order
  for (int e : model.endogenous_indices()) {
    bool in_candidate = std::any_of(candidate.begin(), candidate.end(),
                                    [&](const auto& s) { return s.first == e; });
    if (!in_candidate) pool.push_back(e);
  }

  std::vector<std::pair<int, int>> forced;
  std::vector<int> scratch;
  for (int wsize = 0; wsize <= static_cast<int>(pool.size()); ++wsize) {
    std::vector<int> combo(static_cast<std::size_t>(wsize));
    for (int i = 0; i < wsize; ++i) combo[static_cast<std::size_t>(i)] = i;
    for (;;) {
      forced.clear();
      for (int i : combo) {
        int w = pool[static_cast<std::size_t>(i)];
        forced.emplace_back(w, actual[static_cast<std::size_t>(w)]);
      }
      std::size_t base = forced.size();
      for (const auto& s : candidate) forced.emplace_back(s);

      std::vector<int> alt(candidate.size(), 0);
      do {
        bool same = true;
        for (std::size_t k = 0; k < candidate.size(); ++k)
          if (alt[k] != candidate[k].second) same = false;
        if (same) continue;
        for (std::size_t k = 0; k < candidate.size(); ++k) forced[base + k].second = alt[k];
        eval_forced(model, context, forced, scratch);
        if (!formula.eval(scratch)) {
          Ac2Hit hit;
          for (int i : combo) hit.witness.push_back(pool[static_cast<std::size_t>(i)]);
          for (std::size_t k = 0; k < candidate.size(); ++k)
            hit.alt_assignment.emplace_back(candidate[k].first, alt[k]);
          return hit;
        }
      } while (next_alt(model, candidate, alt));

      if (wsize == 0 || !next_combination(combo, static_cast<int>(pool.size()))) break;
    }
  }
  return std::nullopt;
}

}  // namespace

bool is_but_for_cause(const CausalModel& model, const Context& context,
                      const CandidateCause& candidate, const Formula& formula) {
  validate_candidate(model, candidate);
  std::vector<int> actual = evaluate(model, context);
  for (const auto& [var, val] : candidate.assignment)
    if (actual[static_cast<std::size_t>(var)] != val) return false;
  if (!formula.eval(actual)) return false;

  std::vector<int> alt(candidate.assignment.size(), 0);
  do {
    bool same = true;
    for (std::size_t k = 0; k < candidate.assignment.size(); ++k)
      if (alt[k] != candidate.assignment[k].second) same = false;
    if (same) continue;
    Intervention iv;
    for (std::size_t k = 0; k < candidate.assignment.size(); ++k)
      iv.settings.emplace_back(candidate.assignment[k].first, alt[k]);
    if (!formula.eval(evaluate(model, context, iv))) return true;
  } while (next_alt(model, candidate.assignment, alt));
  return false;
}

CauseVerdict is_actual_cause(const CausalModel& model, const Context& context,
                             const CandidateCause& candidate, const Formula& formula) {
  validate_candidate(model, candidate);
  CauseVerdict verdict;

  std::vector<int> actual = evaluate(model, context);
  bool ac1 = formula.eval(actual);
  for (const auto& [var, val] : candidate.assignment)
    if (actual[static_cast<std::size_t>(var)] != val) ac1 = false;
  if (!ac1) {
    verdict.failed_condition = HpCondition::AC1;
    return verdict;
  }

  auto hit = search_ac2(model, context, candidate.assignment, actual, formula);
  if (!hit) {
    verdict.failed_condition = HpCondition::AC2;
    return verdict;
  }

  // AC3: a strict sub-assignment passing AC1 (automatic here) and AC2
  // disqualifies the candidate. Subsets by increasing size.
  std::size_t n = candidate.assignment.size();
  for (std::size_t size = 1; size < n; ++size) {
    std::vector<int> combo(size);
    for (std::size_t i = 0; i < size; ++i) combo[i] = static_cast<int>(i);
    bool more = true;
    while (more) {
      std::vector<std::pair<int, int>> sub;
      for (int i : combo) sub.push_back(candidate.assignment[static_cast<std::size_t>(i)]);
      if (search_ac2(model, context, sub, actual, formula)) {
        verdict.failed_condition = HpCondition::AC3;
        return verdict;
      }
      more = next_combination(combo, static_cast<int>(n));
    }
  }

  verdict.is_cause = true;
  verdict.witness = std::move(hit->witness);
  verdict.alt_assignment = std::move(hit->alt_assignment);
  return verdict;
}

CauseSearchResult find_actual_causes(const CausalModel& model, const Context& context,
                                     const Formula& formula, int max_size) {
  if (max_size < 1) throw Error("max_size must be positive");
  CauseSearchResult result;
  std::vector<int> actual = evaluate(model, context);
  result.formula_satisfied = formula.eval(actual);
  if (!result.formula_satisfied) return result;

  const std::vector<int>& endo = model.endogenous_indices();
  int n = static_cast<int>(endo.size());
  for (int size = 1; size <= std::min(max_size, n); ++size) {
    std::vector<int> combo(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) combo[static_cast<std::size_t>(i)] = i;
    bool more = true;
    while (more) {
      CandidateCause cand;
      for (int i : combo) {
        int v = endo[static_cast<std::size_t>(i)];
        cand.assignment.emplace_back(v, actual[static_cast<std::size_t>(v)]);
      }
      CauseVerdict v = is_actual_cause(model, context, cand, formula);
      if (v.is_cause) result.causes.push_back({std::move(cand), std::move(v)});
      more = next_combination(combo, n);
    }
  }
  return result;
}

}  // namespace causelog
