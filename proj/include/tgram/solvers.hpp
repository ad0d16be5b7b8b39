#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tgram/grammar.hpp"
#include "tgram/term.hpp"

namespace tgram {

struct SolverStats {
  std::uint64_t iterations = 0;
  std::uint64_t occurrence_queries = 0;
  std::uint64_t rule_applications = 0;
  std::uint64_t branches = 0;
  std::size_t rules_before = 0;  // non-terminals with rules
  std::size_t rules_after = 0;
  std::size_t bound = 0;  // the growth limit asserted for this run
};

/// Outcome of first-order unification or matching. On success every
/// variable of the problem is a non-terminal of `grammar` generating its image.
struct FirstOrderResult {
  bool solvable = false;
  std::string reason;  // "clash", "occurs", "no-match" when not solvable
  Grammar grammar;
  std::vector<Id> variables;  // problem variables, in id order
  SolverStats stats;
};

FirstOrderResult unify_stg(const Grammar& g, Id as, Id at);
FirstOrderResult match_stg(const Grammar& g, Id as, Id at);

/// Images of the given variables, decompressed; unbound ones are left out.
Substitution read_substitution(const Grammar& g, const std::vector<Id>& variables,
                               count_t max_size = default_max_size);

/// F in Contexts(A, A'): sigma(F) w_{A'} = w_A.
struct ContextConstraint {
  Id variable = no_id;
  Id whole = no_id;
  Id part = no_id;
};

struct SolvedForm {
  Grammar grammar;
  std::vector<ContextConstraint> gamma;
  std::vector<Id> variables;
};

struct KcmdProblem {
  Grammar grammar;
  std::vector<std::pair<Id, Id>> equations;  // pattern = target
};

struct KcmdResult {
  std::vector<SolvedForm> forms;
  SolverStats stats;
};

/// All solved forms of a k-context matching problem with a dag grammar.
KcmdResult kcmd_solve(const KcmdProblem& problem, std::size_t k_max);

/// Up to `limit` substitutions of one solved form, keyed by its own table.
std::vector<Substitution> enumerate_solutions(const SolvedForm& sf, std::size_t limit,
                                              count_t max_size = default_max_size);
/// Deduplicated union over every solved form, translated to `table` by name.
std::vector<Substitution> all_solutions(const KcmdResult& r, const SymbolTable& table, std::size_t limit,
                                        count_t max_size = default_max_size);

/// Extension of g where every variable of w_As is a non-terminal generating
/// its image under sigma; asserts the size bound.
Grammar build_certificate(const Grammar& g, Id as, Id at, const Substitution& sigma,
                          count_t max_size = default_max_size);
/// n(depth+1) + m(2 depth^2 + 4 depth + 1) new non-terminals.
std::size_t certificate_bound(std::size_t first_order, std::size_t context, std::size_t depth);

/// True iff the extension makes both sides equal. Throws invalid_extension if
/// it changes a rule of `original`.
bool verify_certificate(const Grammar& original, const Grammar& extension, const std::string& as,
                        const std::string& at);

/// Problem file: `grammar <path>` or `grammar {` ... `}`, `kind`, `eq A = B`.
struct ProblemFile {
  Grammar grammar;
  std::string kind;
  std::vector<std::pair<Id, Id>> equations;
};

ProblemFile parse_problem(std::string_view text, const std::string& base_dir = ".");
ProblemFile load_problem(const std::string& path);

}  // namespace tgram
