// tgram: command-line front end.
//
// Exit status: 0 success / true / solvable, 1 false / unsolvable, 2 usage or
// input error.

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tgram/compare.hpp"
#include "tgram/error.hpp"
#include "tgram/generate.hpp"
#include "tgram/ops.hpp"
#include "tgram/solvers.hpp"

using namespace tgram;
using json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

struct Options {
  bool json = false;
  unsigned threads = 1;
  std::uint64_t max_size = 1'000'000;
  std::string output;
};

/// What one run reports, as text or as a single JSON object.
struct Report {
  std::string command;
  std::string outcome;
  int status = 0;
  double millis = 0;
  std::size_t size_before = 0, size_after = 0;  // non-terminals with rules
  SolverStats counters;
  json data = json::object();
  std::vector<std::string> lines;

  void say(const std::string& s) { lines.push_back(s); }
};

std::string count_text(count_t v) { return to_string(v); }

/// Numbers past 2^53 go out as strings so no JSON reader rounds them.
json count_json(count_t v) {
  if (v <= (count_t{1} << 53)) return static_cast<std::uint64_t>(v);
  return to_string(v);
}

Id lookup(const Grammar& g, const std::string& name) { return g.symbols().at(name); }

/// Every command but `validate` refuses improper grammars up front.
Grammar load_valid(const std::string& file) {
  Grammar g = load_grammar(file);
  ValidationReport v = validate(g);
  if (!v.ok) fail(ErrorCode::invalid_argument, file + ": not a grammar: " + v.message);
  return g;
}

std::string term_text(const Grammar& g, Id n, const Options& o) {
  return to_string(derive_term(g, n, o.max_size), g.symbols());
}

/// Decompressed if it fits the guard, else a size note.
std::string term_or_size(const Grammar& g, Id n, const Options& o) {
  count_t s = g.word_size(n);
  if (s > o.max_size) return "<" + count_text(s) + " nodes>";
  if (g.kind(n) == SymbolKind::word_nt) {
    std::string w;
    for (Id x : derive_word(g, n, o.max_size)) w += (w.empty() ? "" : " ") + g.name(x);
    return w;
  }
  return term_text(g, n, o);
}

void write_grammar(const Grammar& g, const Options& o, Report& r) {
  if (o.output.empty()) return;
  std::ofstream out(o.output);
  if (!out) fail(ErrorCode::invalid_argument, "cannot write '" + o.output + "'");
  out << to_string(g);
  r.data["written"] = o.output;
}

json substitution_json(const Grammar& g, const std::vector<Id>& vars, const Options& o) {
  json j = json::object();
  for (Id v : vars) {
    if (!g.has_rule(v)) continue;
    j[g.name(v)] = term_or_size(g, v, o);
  }
  return j;
}

// ---- commands

void cmd_validate(const std::string& file, Report& r) {
  Grammar g = load_grammar(file);
  ValidationReport v = validate(g);
  r.size_before = r.size_after = g.rule_count();
  r.outcome = v.ok ? "valid" : "invalid";
  r.status = v.ok ? 0 : 1;
  r.say(v.ok ? "ok" : "invalid: " + v.message);
  if (!v.ok) r.data["message"] = v.message;
}

void cmd_stats(const std::string& file, const std::vector<std::string>& names, Report& r) {
  Grammar g = load_valid(file);
  ValidationReport v = validate(g);
  if (!v.ok) fail(ErrorCode::invalid_argument, "not a grammar: " + v.message);
  r.size_before = r.size_after = g.rule_count();
  r.outcome = "ok";
  r.data["rules"] = g.rule_count();
  r.data["size"] = count_json(g.size());
  r.data["depth"] = g.depth();
  r.data["dag"] = is_dag(g);
  r.say("rules " + std::to_string(g.rule_count()) + ", size " + count_text(g.size()) + ", depth " +
        std::to_string(g.depth()) + (is_dag(g) ? ", dag" : ""));
  std::vector<Id> ids;
  for (auto& n : names) ids.push_back(lookup(g, n));
  if (names.empty()) ids = g.nonterminals();
  json per = json::array();
  for (Id n : ids) {
    if (!g.has_rule(n)) fail(ErrorCode::invalid_argument, "'" + g.name(n) + "' has no rule");
    json e{{"name", g.name(n)}, {"kind", to_string(g.kind(n))}, {"size", count_json(g.word_size(n))},
           {"depth", g.depth(n)}};
    std::string line = g.name(n) + " " + to_string(g.kind(n)) + " |w| " + count_text(g.word_size(n));
    if (g.kind(n) != SymbolKind::word_nt) {
      e["height"] = count_json(g.height(n));
      line += " height " + count_text(g.height(n));
    }
    if (g.kind(n) == SymbolKind::context_nt) {
      e["hole_depth"] = count_json(g.hole_depth(n));
      line += " |hp| " + count_text(g.hole_depth(n));
    }
    line += " depth " + std::to_string(g.depth(n));
    per.push_back(e);
    r.say(line);
  }
  r.data["nonterminals"] = per;
}

void cmd_decompress(const std::string& file, const std::string& name, const Options& o, Report& r) {
  Grammar g = load_valid(file);
  Id n = lookup(g, name);
  r.size_before = r.size_after = g.rule_count();
  std::string text;
  if (g.kind(n) == SymbolKind::word_nt) {
    for (Id x : derive_word(g, n, o.max_size)) text += (text.empty() ? "" : " ") + g.name(x);
  } else {
    text = term_text(g, n, o);
  }
  r.outcome = "ok";
  r.data["term"] = text;
  r.say(text);
}

/// Equality for two non-terminals of the same kind.
bool equal_nts(const Grammar& g, Id a, Id b, Report& r) {
  if (g.kind(a) != g.kind(b)) return false;
  if (g.kind(a) == SymbolKind::word_nt) {
    OccurrenceIndex ix(g);
    bool eq = ix.equal(a, b);
    r.counters.occurrence_queries = ix.queries();
    return eq;
  }
  PreGrammar pre = build_pre(g);
  OccurrenceIndex ix(pre.grammar);
  bool eq;
  if (g.kind(a) == SymbolKind::term_nt) {
    eq = ix.equal(pre.P[a], pre.P[b]);
  } else {
    eq = g.hole_depth(a) == g.hole_depth(b) && ix.equal(pre.L[a], pre.L[b]) && ix.equal(pre.R[a], pre.R[b]);
  }
  r.counters.occurrence_queries = ix.queries();
  return eq;
}

void cmd_eq(const std::string& file, const std::string& a, const std::string& b, Report& r) {
  Grammar g = load_valid(file);
  r.size_before = r.size_after = g.rule_count();
  bool eq = equal_nts(g, lookup(g, a), lookup(g, b), r);
  r.outcome = eq ? "equal" : "different";
  r.status = eq ? 0 : 1;
  r.say(r.outcome);
}

void cmd_diff(const std::string& file, const std::string& a, const std::string& b, Report& r) {
  Grammar g = load_valid(file);
  r.size_before = r.size_after = g.rule_count();
  Id x = lookup(g, a), y = lookup(g, b);
  Diff d;
  std::uint64_t queries = 0;
  if (g.kind(x) == SymbolKind::word_nt && g.kind(y) == SymbolKind::word_nt) {
    OccurrenceIndex ix(g);
    d = ix.first_diff(x, y);
    queries = ix.queries();
  } else if (g.kind(x) == SymbolKind::term_nt && g.kind(y) == SymbolKind::term_nt) {
    PreGrammar pre = build_pre(g);
    OccurrenceIndex ix(pre.grammar);
    d = ix.first_diff(pre.P[x], pre.P[y]);
    queries = ix.queries();
  } else {
    fail(ErrorCode::invalid_argument, "diff needs two words or two terms");
  }
  r.counters.occurrence_queries = queries;
  switch (d.kind) {
    case Diff::Kind::equal:
      r.outcome = "equal";
      r.say("equal");
      break;
    case Diff::Kind::index:
      r.outcome = "index";
      r.data["index"] = count_json(d.index);
      r.say("first difference at " + count_text(d.index));
      break;
    case Diff::Kind::proper_prefix:
      r.outcome = "prefix";
      r.data["index"] = count_json(d.index);
      r.data["first_shorter"] = d.first_shorter;
      r.say(std::string(d.first_shorter ? a : b) + " is a proper prefix; first difference at " + count_text(d.index));
      break;
  }
}

void report_extension(const Extension& e, const Grammar& before, const Options& o, Report& r) {
  r.size_before = before.rule_count();
  r.size_after = e.grammar.rule_count();
  r.outcome = "ok";
  r.data["result"] = e.grammar.name(e.result);
  r.data["added"] = e.added;
  r.data["size"] = count_json(e.grammar.word_size(e.result));
  std::string text = term_or_size(e.grammar, e.result, o);
  r.data["term"] = text;
  r.say(e.grammar.name(e.result) + " = " + text + "  (" + std::to_string(e.added) + " added)");
  write_grammar(e.grammar, o, r);
}

void print_first_order(const FirstOrderResult& res, const std::string& what, const Options& o, Report& r) {
  r.counters = res.stats;
  r.size_before = res.stats.rules_before;
  r.size_after = res.stats.rules_after;
  r.data["bound"] = res.stats.bound;
  if (!res.solvable) {
    r.outcome = "unsolvable";
    r.status = 1;
    r.data["reason"] = res.reason;
    r.say("not " + what + ": " + res.reason);
    return;
  }
  r.outcome = "solvable";
  json sub = substitution_json(res.grammar, res.variables, o);
  r.data["substitution"] = sub;
  r.say(what);
  for (auto& [k, v] : sub.items()) r.say("  " + k + " -> " + v.get<std::string>());
  r.say("rules " + std::to_string(res.stats.rules_before) + " -> " + std::to_string(res.stats.rules_after) +
        " (bound " + std::to_string(res.stats.bound) + ")");
  write_grammar(res.grammar, o, r);
}

/// `FILE A B` names a grammar and two roots; a lone FILE is a problem file.
ProblemFile load_input(const std::string& file, const std::vector<std::string>& roots, const std::string& kind) {
  if (roots.empty()) {
    ProblemFile p = load_problem(file);
    ValidationReport v = validate(p.grammar);
    if (!v.ok) fail(ErrorCode::invalid_argument, file + ": not a grammar: " + v.message);
    if (p.kind != kind) fail(ErrorCode::invalid_argument, "problem kind is '" + p.kind + "', expected '" + kind + "'");
    return p;
  }
  if (roots.size() % 2 != 0) fail(ErrorCode::invalid_argument, "roots come in pattern/target pairs");
  ProblemFile p;
  p.grammar = load_valid(file);
  p.kind = kind;
  for (std::size_t i = 0; i < roots.size(); i += 2) {
    p.equations.emplace_back(lookup(p.grammar, roots[i]), lookup(p.grammar, roots[i + 1]));
  }
  if (kind != "cmatch" && p.equations.size() != 1) fail(ErrorCode::invalid_argument, kind + " takes one equation");
  return p;
}

void cmd_cmatch(const std::string& file, const std::vector<std::string>& roots, std::size_t k, std::size_t limit,
                const Options& o, Report& r) {
  ProblemFile p = load_input(file, roots, "cmatch");
  KcmdResult res = kcmd_solve(KcmdProblem{p.grammar, p.equations}, k);
  r.counters = res.stats;
  r.size_before = p.grammar.rule_count();
  for (auto& f : res.forms) r.size_after = std::max(r.size_after, f.grammar.rule_count());
  std::vector<Substitution> sols = all_solutions(res, p.grammar.symbols(), limit, o.max_size);
  r.outcome = res.forms.empty() ? "unsolvable" : "solvable";
  r.status = res.forms.empty() ? 1 : 0;
  r.data["solved_forms"] = res.forms.size();
  json arr = json::array();
  for (auto& s : sols) arr.push_back(to_string(s, p.grammar.symbols()));
  r.data["solutions"] = arr;
  r.say(std::to_string(res.forms.size()) + (res.forms.size() == 1 ? " solved form, " : " solved forms, ") + std::to_string(sols.size()) + " solutions" +
        (sols.size() == limit ? " (limit reached)" : ""));
  for (auto& s : sols) r.say("  " + to_string(s, p.grammar.symbols()));
}

void cmd_verify(const std::string& original, const std::string& extension, const std::string& a, const std::string& b,
                Report& r) {
  Grammar g = load_valid(original);
  Grammar e = load_grammar(extension);
  r.size_before = g.rule_count();
  r.size_after = e.rule_count();
  try {
    bool ok = verify_certificate(g, e, a, b);
    r.outcome = ok ? "verified" : "rejected";
    r.status = ok ? 0 : 1;
    r.say(ok ? "verified" : "rejected: sides differ");
  } catch (const Error& err) {
    if (err.code() != ErrorCode::invalid_extension) throw;
    r.outcome = "rejected";
    r.status = 1;
    r.data["reason"] = err.what();
    r.say(std::string("rejected: ") + err.what());
  }
}

struct GenOptions {
  std::string profile;
  std::uint64_t seed = 1;
  std::size_t rules = 30;
  std::uint64_t max_len = 10'000;
  std::size_t letters = 2;
  std::size_t vars = 2;
  std::size_t ctx_vars = 1;
  std::size_t equations = 1;
  std::size_t depth = 4;
};

std::string generate(const GenOptions& go, Report& r) {
  Rng rng(go.seed);
  if (go.profile == "word") {
    Grammar g = random_word_grammar(rng, go.letters, go.rules, go.max_len);
    r.size_after = g.rule_count();
    return to_string(g);
  }
  if (go.profile == "term" || go.profile == "dag") {
    StgShape sh;
    sh.rules = go.rules;
    sh.max_size = go.max_len;
    sh.dag = go.profile == "dag";
    sh.variable = go.vars ? 0.1 : 0.0;
    Grammar g = random_stg(rng, sh, go.profile == "dag" ? 0 : go.vars);
    if (sh.dag) g = canonical_dag(g).grammar;
    r.size_after = g.rule_count();
    return to_string(g);
  }
  if (go.profile == "cmatch-instance") {
    InstanceShape sh;
    sh.variables = go.vars;
    sh.context_variables = go.ctx_vars;
    sh.equations = go.equations;
    sh.max_depth = go.depth;
    sh.dag = true;
    Instance inst = cmatch_instance(rng, sh);
    const SymbolTable& t = inst.grammar.symbols();
    std::string out = "# planted: " + (inst.has_planted ? to_string(inst.planted, t) : std::string("none")) + "\n";
    out += "grammar {\n" + to_string(inst.grammar) + "}\nkind cmatch\n";
    for (auto [a, b] : inst.equations) out += "eq " + t.name(a) + " = " + t.name(b) + "\n";
    r.size_after = inst.grammar.rule_count();
    r.data["planted"] = inst.has_planted ? json(to_string(inst.planted, t)) : json(nullptr);
    return out;
  }
  fail(ErrorCode::invalid_argument, "unknown profile '" + go.profile + "'");
}

// ---- bench

double ms_since(Clock::time_point t0) { return std::chrono::duration<double, std::milli>(Clock::now() - t0).count(); }

/// Runs `jobs` on up to `threads` workers; rows stay in job order.
void run_jobs(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& job) {
  threads = std::max(1u, threads);
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::size_t next = 0;
  std::mutex m;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      while (true) {
        std::size_t i;
        {
          std::lock_guard<std::mutex> lock(m);
          if (next >= count) return;
          i = next++;
        }
        job(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

void bench_unify(std::size_t from, std::size_t to, const Options& o, Report& r) {
  std::vector<json> rows(to - from + 1);
  bool within = true;
  std::mutex m;
  run_jobs(rows.size(), o.threads, [&](std::size_t i) {
    std::size_t n = from + i;
    ChainProblem p = unify_chain(n);
    auto t0 = Clock::now();
    FirstOrderResult res = unify_stg(p.grammar, p.s, p.t);
    double ms = ms_since(t0);
    json row{{"n", n},
             {"rules_before", res.stats.rules_before},
             {"rules_after", res.stats.rules_after},
             {"bound", res.stats.bound},
             {"ms", ms},
             {"occurrence_queries", res.stats.occurrence_queries},
             {"image_size", count_json(res.grammar.word_size(lookup(res.grammar, "x" + std::to_string(n))))}};
    std::lock_guard<std::mutex> lock(m);
    within = within && res.solvable && res.stats.rules_after <= res.stats.bound;
    rows[i] = row;
  });
  r.say("n\trules\tafter\tbound\tms\tqueries\t|x_n|");
  for (auto& row : rows) {
    r.say(std::to_string(row["n"].get<std::size_t>()) + "\t" + std::to_string(row["rules_before"].get<std::size_t>()) +
          "\t" + std::to_string(row["rules_after"].get<std::size_t>()) + "\t" +
          std::to_string(row["bound"].get<std::size_t>()) + "\t" + std::to_string(row["ms"].get<double>()) + "\t" +
          std::to_string(row["occurrence_queries"].get<std::uint64_t>()) + "\t" + row["image_size"].dump());
  }
  r.data["rows"] = rows;
  r.data["within_bound"] = within;
  r.outcome = within ? "ok" : "bound-violated";
  r.status = within ? 0 : 1;
}

void bench_eq(std::size_t from, std::size_t to, Report& r) {
  std::vector<json> rows;
  r.say("n\t|G|\t|w|\tbuild_ms\teq_ms\tqueries");
  for (std::size_t n = from; n <= to; ++n) {
    Grammar g = doubling_terms(n);
    // a second copy of A1 under other names
    Id f = lookup(g, "f");
    Id prev = lookup(g, "A" + std::to_string(n));
    for (std::size_t i = n; i-- > 1;) prev = g.add_rule("B", SymbolKind::term_nt, Rule::apply(f, {prev, lookup(g, "A" + std::to_string(i + 1))}));
    auto t0 = Clock::now();
    PreGrammar pre = build_pre(g);
    OccurrenceIndex ix(pre.grammar);
    double build = ms_since(t0);
    t0 = Clock::now();
    bool eq = ix.equal(pre.P[lookup(g, n >= 1 ? "A1" : "A0")], pre.P[prev]);
    double cmp = ms_since(t0);
    json row{{"n", n}, {"grammar_size", count_json(g.size())}, {"word_size", count_json(g.word_size(prev))},
             {"build_ms", build}, {"eq_ms", cmp}, {"queries", ix.queries()}, {"equal", eq}};
    r.say(std::to_string(n) + "\t" + count_text(g.size()) + "\t" + count_text(g.word_size(prev)) + "\t" +
          std::to_string(build) + "\t" + std::to_string(cmp) + "\t" + std::to_string(ix.queries()));
    rows.push_back(row);
  }
  r.data["rows"] = rows;
  r.outcome = "ok";
}

void bench_cmatch(std::size_t instances, std::uint64_t seed, const Options& o, Report& r) {
  std::vector<json> rows;
  r.say("k\tinstances\tsolvable\tmax_branches\tmax_envelope\twithin\tms");
  bool all_within = true;
  for (std::size_t k = 1; k <= 2; ++k) {
    std::vector<std::uint64_t> branches(instances), envelope(instances);
    std::vector<char> solvable(instances);
    auto t0 = Clock::now();
    run_jobs(instances, o.threads, [&](std::size_t i) {
      Rng rng(seed + 7919 * i + k);
      InstanceShape sh;
      sh.variables = 1;
      sh.context_variables = k;
      sh.equations = k;
      sh.max_depth = 4;
      sh.dag = true;
      Instance inst = cmatch_instance(rng, sh);
      KcmdResult res = kcmd_solve(KcmdProblem{inst.grammar, inst.equations}, k);
      // guess range: hole-path lengths up to the target height, plus the hole
      std::uint64_t range = 1;
      for (auto [a, b] : inst.equations) range = std::max<std::uint64_t>(range, inst.grammar.height(b) + 1);
      std::uint64_t env = 1;
      for (std::size_t j = 0; j < k; ++j) env *= inst.grammar.depth() * range;
      branches[i] = res.stats.branches;
      envelope[i] = env;
      solvable[i] = !res.forms.empty();
    });
    double ms = ms_since(t0);
    bool within = true;
    std::size_t n_solvable = 0;
    for (std::size_t i = 0; i < instances; ++i) {
      within = within && branches[i] <= envelope[i];
      n_solvable += solvable[i];
    }
    all_within = all_within && within;
    std::uint64_t mb = instances ? *std::max_element(branches.begin(), branches.end()) : 0;
    std::uint64_t me = instances ? *std::max_element(envelope.begin(), envelope.end()) : 0;
    rows.push_back(json{{"k", k}, {"instances", instances}, {"solvable", n_solvable}, {"max_branches", mb},
                        {"max_envelope", me}, {"within", within}, {"ms", ms}});
    r.say(std::to_string(k) + "\t" + std::to_string(instances) + "\t" + std::to_string(n_solvable) + "\t" +
          std::to_string(mb) + "\t" + std::to_string(me) + "\t" + (within ? "yes" : "no") + "\t" + std::to_string(ms));
  }
  r.data["rows"] = rows;
  r.outcome = all_within ? "ok" : "envelope-exceeded";
}

void emit(const Report& r, const Options& o) {
  if (o.json) {
    json j;
    j["command"] = r.command;
    j["outcome"] = r.outcome;
    j["exit"] = r.status;
    j["timing_ms"] = r.millis;
    j["size_before"] = r.size_before;
    j["size_after"] = r.size_after;
    j["counters"] = json{{"iterations", r.counters.iterations},
                         {"occurrence_queries", r.counters.occurrence_queries},
                         {"rule_applications", r.counters.rule_applications},
                         {"branches", r.counters.branches}};
    for (auto& [k, v] : r.data.items()) j[k] = v;
    std::cout << j.dump() << "\n";
  } else {
    for (auto& l : r.lines) std::cout << l << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressed terms: grammars, comparison, unification and matching"};
  app.require_subcommand(1);
  Options o;
  app.add_flag("--json", o.json, "One JSON object per run on stdout");
  app.add_option("--threads", o.threads, "Worker threads for bench (default 1)")->check(CLI::Range(1u, 256u));
  app.add_option("--max-size", o.max_size, "Decompression guard in nodes");

  std::string file, file2, a, b, arg;
  std::vector<std::string> names;
  Report r;
  std::function<void()> action;

  auto sub = [&](const char* name, const char* help) {
    return app.add_subcommand(name, help);
  };

  auto* validate_cmd = sub("validate", "Check that a file is a proper grammar");
  validate_cmd->add_option("grammar", file)->required();
  validate_cmd->final_callback([&] { action = [&] { cmd_validate(file, r); }; });

  auto* stats_cmd = sub("stats", "Sizes, heights and depths");
  stats_cmd->add_option("grammar", file)->required();
  stats_cmd->add_option("names", names, "Non-terminals (default: all)");
  stats_cmd->final_callback([&] { action = [&] { cmd_stats(file, names, r); }; });

  auto* dec = sub("decompress", "Print the term, context or word of a non-terminal");
  dec->add_option("grammar", file)->required();
  dec->add_option("name", a)->required();
  dec->add_option("--max-size", o.max_size, "Decompression guard in nodes");
  dec->final_callback([&] { action = [&] { cmd_decompress(file, a, o, r); }; });

  auto* eq = sub("eq", "Are two non-terminals equal?");
  eq->add_option("grammar", file)->required();
  eq->add_option("a", a)->required();
  eq->add_option("b", b)->required();
  eq->final_callback([&] { action = [&] { cmd_eq(file, a, b, r); }; });

  auto* diff = sub("diff", "First difference of two words or term preorders");
  diff->add_option("grammar", file)->required();
  diff->add_option("a", a)->required();
  diff->add_option("b", b)->required();
  diff->final_callback([&] { action = [&] { cmd_diff(file, a, b, r); }; });

  auto add_extension = [&](const char* name, const char* help, const char* what,
                           std::function<Extension(const Grammar&, Id, const std::string&)> op) {
    auto* s = sub(name, help);
    s->add_option("grammar", file)->required();
    s->add_option("name", a)->required();
    s->add_option(what, arg)->required();
    s->add_option("-o,--output", o.output, "Write the extended grammar here");
    s->add_option("--max-size", o.max_size, "Decompression guard in nodes");
    s->final_callback([&, op] {
      action = [&, op] {
        Grammar g = load_valid(file);
        report_extension(op(g, lookup(g, a), arg), g, o, r);
      };
    });
  };
  add_extension("subterm", "Subterm at a preorder index (1-based)", "index",
                [](const Grammar& g, Id n, const std::string& k) { return kext(g, n, parse_count(k)); });
  add_extension("prefix", "Prefix of a context with the given hole-path length", "length",
                [](const Grammar& g, Id n, const std::string& l) { return pref(g, n, parse_count(l)); });
  add_extension("suffix", "Suffix of a context after the given hole-path length", "length",
                [](const Grammar& g, Id n, const std::string& l) { return suff(g, n, parse_count(l)); });
  add_extension("pcon", "Prefix context at a position such as 1.2.1", "position",
                [](const Grammar& g, Id n, const std::string& p) { return pcon(g, n, parse_position(p)); });

  auto add_first_order = [&](const char* name, const char* help, const char* what, bool matching) {
    auto* s = sub(name, help);
    s->add_option("input", file, "Problem file, or grammar followed by two roots")->required();
    s->add_option("roots", names);
    s->add_option("-o,--output", o.output, "Write the final grammar here");
    s->add_option("--max-size", o.max_size, "Decompression guard in nodes");
    s->final_callback([&, name, what, matching] {
      action = [&, name, what, matching] {
        ProblemFile p = load_input(file, names, name);
        auto [x, y] = p.equations.front();
        FirstOrderResult res = matching ? match_stg(p.grammar, x, y) : unify_stg(p.grammar, x, y);
        print_first_order(res, what, o, r);
      };
    });
  };
  add_first_order("unify", "First-order unification", "unifiable", false);
  add_first_order("match", "First-order matching (right side ground)", "matches", true);

  std::size_t k_max = 2, limit = 10;
  auto* cm = sub("cmatch", "Context matching with at most k context variables");
  cm->add_option("input", file, "Problem file, or grammar followed by pattern/target pairs")->required();
  cm->add_option("roots", names);
  cm->add_option("--max-vars", k_max, "Largest k accepted");
  cm->add_option("--enumerate", limit, "Print up to this many solutions");
  cm->add_option("--max-size", o.max_size, "Decompression guard in nodes");
  cm->final_callback([&] { action = [&] { cmd_cmatch(file, names, k_max, limit, o, r); }; });

  auto* ver = sub("verify", "Check a certificate grammar against the original");
  ver->add_option("original", file)->required();
  ver->add_option("extension", file2)->required();
  ver->add_option("a", a)->required();
  ver->add_option("b", b)->required();
  ver->final_callback([&] { action = [&] { cmd_verify(file, file2, a, b, r); }; });

  GenOptions go;
  auto* gen = sub("gen", "Random grammars and instances");
  gen->add_option("profile", go.profile)->required()->check(CLI::IsMember({"word", "term", "dag", "cmatch-instance"}));
  gen->add_option("--seed", go.seed);
  gen->add_option("--rules", go.rules);
  gen->add_option("--max-len", go.max_len, "Bound on every word or term size");
  gen->add_option("--letters", go.letters);
  gen->add_option("--vars", go.vars);
  gen->add_option("--ctx-vars", go.ctx_vars);
  gen->add_option("--equations", go.equations);
  gen->add_option("--depth", go.depth);
  gen->add_option("-o,--output", o.output);
  gen->final_callback([&] {
    action = [&] {
      std::string text = generate(go, r);
      r.outcome = "ok";
      if (o.output.empty()) {
        if (!o.json) std::cout << text;
        r.data["text"] = text;
      } else {
        std::ofstream out(o.output);
        if (!out) fail(ErrorCode::invalid_argument, "cannot write '" + o.output + "'");
        out << text;
        r.data["written"] = o.output;
      }
    };
  });

  std::string suite;
  std::size_t from = 10, to = 30, instances = 50;
  std::uint64_t seed = 1;
  auto* bench = sub("bench", "Timing and size tables");
  bench->add_option("suite", suite)->required()->check(CLI::IsMember({"unify", "eq", "cmatch"}));
  bench->add_option("--from", from);
  bench->add_option("--to", to);
  bench->add_option("--instances", instances);
  bench->add_option("--seed", seed);
  bench->final_callback([&] {
    action = [&] {
      if (from > to) fail(ErrorCode::invalid_argument, "--from exceeds --to");
      if (suite == "unify") bench_unify(std::max<std::size_t>(from, 1), to, o, r);
      if (suite == "eq") bench_eq(from, to, r);
      if (suite == "cmatch") bench_cmatch(instances, seed, o, r);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  r.command = app.get_subcommands().front()->get_name();
  auto t0 = Clock::now();
  try {
    action();
  } catch (const SizeLimitExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (o.json) {
      std::cout << json{{"command", r.command}, {"outcome", "error"}, {"exit", 2}, {"error", e.what()},
                        {"true_size", count_json(e.true_size())}}
                       .dump()
                << "\n";
    }
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (o.json) {
      std::cout << json{{"command", r.command}, {"outcome", "error"}, {"exit", 2}, {"error", e.what()}}.dump() << "\n";
    }
    return 2;
  }
  r.millis = ms_since(t0);
  emit(r, o);
  return r.status;
}
