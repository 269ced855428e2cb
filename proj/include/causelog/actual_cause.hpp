#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "causelog/scm.hpp"

namespace causelog {

/// The conjunct X = x under test, sorted by variable index. All variables
/// endogenous, at least one entry.
struct CandidateCause {
  std::vector<std::pair<int, int>> assignment;

  bool operator==(const CandidateCause&) const = default;
};

enum class HpCondition { AC1, AC2, AC3 };

const char* to_string(HpCondition c);

/// Outcome of the modified Halpern-Pearl test. On success carries the
/// first witness found (smallest W, then declaration order) and the
/// alternative assignment that falsifies the formula.
struct CauseVerdict {
  bool is_cause = false;
  std::vector<int> witness;                        // ascending var indices
  std::vector<std::pair<int, int>> alt_assignment; // parallel to the candidate
  std::optional<HpCondition> failed_condition;

  bool operator==(const CauseVerdict&) const = default;
};

/// Builds a candidate from name/value-token pairs; validates variables are
/// endogenous and values in-domain.
CandidateCause make_candidate(const CausalModel& model,
                              const std::vector<std::pair<std::string, std::string>>& bindings);

/// True iff the candidate and formula hold actually and some alternative
/// setting of the candidate variables alone falsifies the formula.
bool is_but_for_cause(const CausalModel& model, const Context& context,
                      const CandidateCause& candidate, const Formula& formula);

/// Modified HP definition by exhaustive search:
///   AC1  (M,u) |= X=x and phi
///   AC2  some W (frozen at actual values) and x' give [X<-x', W<-w*] !phi
///   AC3  no strict sub-assignment of X=x passes AC1 and AC2
CauseVerdict is_actual_cause(const CausalModel& model, const Context& context,
                             const CandidateCause& candidate, const Formula& formula);

struct FoundCause {
  CandidateCause candidate;
  CauseVerdict verdict;
};

struct CauseSearchResult {
  bool formula_satisfied = false;
  std::vector<FoundCause> causes;  // ordered by (size, declaration order)
};

/// Enumerates every minimal actual cause of the formula with up to
/// max_size variables, each at its actual value.
CauseSearchResult find_actual_causes(const CausalModel& model, const Context& context,
                                     const Formula& formula, int max_size);

}  // namespace causelog
