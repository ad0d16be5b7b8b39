#include "tgram/term.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>

#include "tgram/error.hpp"

namespace tgram {

std::string to_string(const Position& p) {
  if (p.empty()) return "";
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(p[i]);
  }
  return out;
}

Position parse_position(std::string_view text) {
  Position p;
  if (text.empty() || text == "." || text == "root") return p;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t j = i;
    std::uint64_t v = 0;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
      v = v * 10 + static_cast<std::uint64_t>(text[j] - '0');
      if (v > 0xffffffffULL) fail(ErrorCode::parse, "position component too large");
      ++j;
    }
    if (j == i || v == 0) fail(ErrorCode::parse, "bad position '" + std::string(text) + "'");
    p.push_back(static_cast<std::uint32_t>(v));
    if (j < text.size()) {
      if (text[j] != '.' && text[j] != ',') fail(ErrorCode::parse, "bad position '" + std::string(text) + "'");
      ++j;
      if (j == text.size()) fail(ErrorCode::parse, "bad position '" + std::string(text) + "'");
    }
    i = j;
  }
  return p;
}

// ---- ExplicitTerm

ExplicitTerm::ExplicitTerm(std::vector<Node> preorder) : nodes_(std::move(preorder)) {
  if (nodes_.empty()) fail(ErrorCode::invalid_argument, "empty term");
  ends_.assign(nodes_.size(), 0);
  std::vector<std::size_t> st;  // subtree ends of already scanned suffix, first child on top
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    std::uint32_t a = nodes_[i].arity;
    if (st.size() < a) fail(ErrorCode::invalid_argument, "arity mismatch in term");
    std::size_t e = i + 1;
    for (std::uint32_t c = 0; c < a; ++c) {
      e = st.back();
      st.pop_back();
    }
    ends_[i] = e;
    st.push_back(e);
  }
  if (st.size() != 1) fail(ErrorCode::invalid_argument, "node list is not a single term");
}

ExplicitTerm ExplicitTerm::constant(Id symbol) { return ExplicitTerm({Node{symbol, 0}}); }

ExplicitTerm ExplicitTerm::apply(Id symbol, const std::vector<ExplicitTerm>& children) {
  std::vector<Node> n;
  n.push_back(Node{symbol, static_cast<std::uint32_t>(children.size())});
  for (const auto& c : children) n.insert(n.end(), c.nodes_.begin(), c.nodes_.end());
  return ExplicitTerm(std::move(n));
}

std::size_t ExplicitTerm::child(std::size_t i, std::uint32_t j) const {
  if (j < 1 || j > nodes_[i].arity) fail(ErrorCode::invalid_position, "no child " + std::to_string(j));
  std::size_t c = i + 1;
  for (std::uint32_t r = 1; r < j; ++r) c = ends_[c];
  return c;
}

ExplicitTerm ExplicitTerm::subtree(std::size_t i) const {
  ExplicitTerm t;
  t.nodes_.assign(nodes_.begin() + static_cast<std::ptrdiff_t>(i),
                  nodes_.begin() + static_cast<std::ptrdiff_t>(ends_[i]));
  t.ends_.reserve(t.nodes_.size());
  for (std::size_t k = i; k < ends_[i]; ++k) t.ends_.push_back(ends_[k] - i);
  return t;
}

ExplicitTerm ExplicitTerm::replace(std::size_t i, const ExplicitTerm& by) const {
  std::vector<Node> n;
  n.reserve(nodes_.size() - (ends_[i] - i) + by.size());
  n.insert(n.end(), nodes_.begin(), nodes_.begin() + static_cast<std::ptrdiff_t>(i));
  n.insert(n.end(), by.nodes_.begin(), by.nodes_.end());
  n.insert(n.end(), nodes_.begin() + static_cast<std::ptrdiff_t>(ends_[i]), nodes_.end());
  return ExplicitTerm(std::move(n));
}

std::size_t ExplicitTerm::height() const {
  std::vector<std::size_t> st;
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    std::size_t h = 0;
    for (std::uint32_t c = 0; c < nodes_[i].arity; ++c) {
      h = std::max(h, st.back() + 1);
      st.pop_back();
    }
    st.push_back(h);
  }
  return st.empty() ? 0 : st.back();
}

std::size_t ExplicitTerm::count(Id symbol) const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [&](const Node& n) { return n.symbol == symbol; }));
}

// ---- positions

std::vector<Id> preorder(const ExplicitTerm& t) {
  std::vector<Id> w;
  w.reserve(t.size());
  for (const auto& n : t.nodes()) w.push_back(n.symbol);
  return w;
}

std::size_t node_at(const ExplicitTerm& t, const Position& p) {
  std::size_t cur = 0;
  for (auto idx : p) {
    if (idx < 1 || idx > t.arity(cur)) fail(ErrorCode::invalid_position, "position " + to_string(p) + " not in term");
    cur = t.child(cur, idx);
  }
  return cur;
}

Position position_of(const ExplicitTerm& t, std::size_t node) {
  if (node >= t.size()) fail(ErrorCode::index_out_of_range, "node index out of range");
  Position p;
  std::size_t cur = 0;
  while (cur != node) {
    std::size_t c = cur + 1;
    std::uint32_t j = 1;
    while (t.end(c) <= node) {
      c = t.end(c);
      ++j;
    }
    p.push_back(j);
    cur = c;
  }
  return p;
}

count_t pindex(const ExplicitTerm& t, const Position& p) { return static_cast<count_t>(node_at(t, p)) + 1; }

Position ipos(const ExplicitTerm& t, count_t k) {
  if (k < 1 || k > t.size()) fail(ErrorCode::index_out_of_range, "index " + to_string(k) + " out of range");
  return position_of(t, static_cast<std::size_t>(k - 1));
}

bool is_position(const ExplicitTerm& t, const Position& p) {
  std::size_t cur = 0;
  for (auto idx : p) {
    if (idx < 1 || idx > t.arity(cur)) return false;
    cur = t.child(cur, idx);
  }
  return true;
}

ExplicitTerm subterm(const ExplicitTerm& t, const Position& p) { return t.subtree(node_at(t, p)); }

bool is_context(const ExplicitTerm& t) { return !t.empty() && t.count(hole_id) == 1; }

Position hole_path(const ExplicitTerm& t) {
  if (!is_context(t)) fail(ErrorCode::invalid_argument, "not a context");
  const auto& n = t.nodes();
  auto it = std::find_if(n.begin(), n.end(), [](const auto& x) { return x.symbol == hole_id; });
  return position_of(t, static_cast<std::size_t>(it - n.begin()));
}

ExplicitTerm fill(const ExplicitTerm& context, const ExplicitTerm& s) {
  const auto& n = context.nodes();
  auto it = std::find_if(n.begin(), n.end(), [](const auto& x) { return x.symbol == hole_id; });
  if (it == n.end()) fail(ErrorCode::invalid_argument, "not a context");
  return context.replace(static_cast<std::size_t>(it - n.begin()), s);
}

ExplicitTerm prefix_context(const ExplicitTerm& t, const Position& p) {
  return t.replace(node_at(t, p), ExplicitTerm::hole());
}

std::optional<ExplicitTerm> joint_con(const ExplicitTerm& u, const ExplicitTerm& v, std::size_t l) {
  if (u == v) fail(ErrorCode::invalid_argument, "joint context of equal terms");
  // walk down l levels, remembering where the hole goes
  std::size_t iu = 0, iv = 0;
  for (std::size_t step = 0; step < l; ++step) {
    if (u.symbol(iu) != v.symbol(iv) || u.arity(iu) != v.arity(iv)) return std::nullopt;
    std::uint32_t m = u.arity(iu);
    std::uint32_t diff = 0;
    std::size_t cu = iu + 1, cv = iv + 1, du = 0, dv = 0;
    for (std::uint32_t j = 1; j <= m; ++j) {
      bool same = (u.end(cu) - cu == v.end(cv) - cv) &&
                  std::equal(u.nodes().begin() + static_cast<std::ptrdiff_t>(cu),
                             u.nodes().begin() + static_cast<std::ptrdiff_t>(u.end(cu)),
                             v.nodes().begin() + static_cast<std::ptrdiff_t>(cv));
      if (!same) {
        if (diff) return std::nullopt;
        diff = j;
        du = cu;
        dv = cv;
      }
      cu = u.end(cu);
      cv = v.end(cv);
    }
    if (!diff) return std::nullopt;
    iu = du;
    iv = dv;
  }
  return u.replace(iu, ExplicitTerm::hole());
}

// ---- substitutions

ExplicitTerm apply(const Substitution& sigma, const ExplicitTerm& t) {
  if (sigma.empty()) return t;
  std::vector<std::vector<ExplicitTerm::Node>> st;
  const auto& n = t.nodes();
  for (std::size_t i = n.size(); i-- > 0;) {
    auto it = sigma.find(n[i].symbol);
    std::vector<ExplicitTerm::Node> frag;
    if (it != sigma.end() && n[i].arity == 0) {
      frag = it->second.nodes();
    } else if (it != sigma.end() && n[i].arity == 1) {
      const auto& c = it->second.nodes();
      auto h = std::find_if(c.begin(), c.end(), [](const auto& x) { return x.symbol == hole_id; });
      if (h == c.end()) fail(ErrorCode::invalid_argument, "context variable bound to a non-context");
      frag.assign(c.begin(), h);
      frag.insert(frag.end(), st.back().begin(), st.back().end());
      frag.insert(frag.end(), h + 1, c.end());
      st.pop_back();
    } else {
      frag.push_back(n[i]);
      for (std::uint32_t c = 0; c < n[i].arity; ++c) {
        frag.insert(frag.end(), st.back().begin(), st.back().end());
        st.pop_back();
      }
    }
    st.push_back(std::move(frag));
  }
  return ExplicitTerm(std::move(st.back()));
}

std::vector<Id> variables_of(const ExplicitTerm& t, const SymbolTable& table) {
  std::vector<Id> out;
  for (const auto& n : t.nodes()) {
    if (table.is_free_variable(n.symbol) && std::find(out.begin(), out.end(), n.symbol) == out.end()) {
      out.push_back(n.symbol);
    }
  }
  return out;
}

bool is_ground(const ExplicitTerm& t, const SymbolTable& table) {
  return std::none_of(t.nodes().begin(), t.nodes().end(),
                      [&](const auto& n) { return table.is_free_variable(n.symbol); });
}

namespace {

void require_no_context_vars(const ExplicitTerm& t, const SymbolTable& table) {
  for (const auto& n : t.nodes()) {
    if (table.is_context_variable(n.symbol)) {
      fail(ErrorCode::invalid_argument, "context variable '" + table.name(n.symbol) + "' in first-order problem");
    }
  }
}

// Extends sigma so that sigma(s) = t for ground t. Only first-order variables
// of s may be unbound; context variables must already be applied.
bool match_into(const ExplicitTerm& s, const ExplicitTerm& t, Substitution& sigma, const SymbolTable& table) {
  std::vector<std::pair<std::size_t, std::size_t>> work{{0, 0}};
  while (!work.empty()) {
    auto [i, j] = work.back();
    work.pop_back();
    Id sym = s.symbol(i);
    if (table.is_first_order_variable(sym)) {
      ExplicitTerm image = t.subtree(j);
      auto it = sigma.find(sym);
      if (it == sigma.end()) {
        sigma.emplace(sym, std::move(image));
      } else if (!(it->second == image)) {
        return false;
      }
      continue;
    }
    if (table.is_context_variable(sym)) fail(ErrorCode::internal, "unapplied context variable in match");
    if (sym != t.symbol(j) || s.arity(i) != t.arity(j)) return false;
    std::size_t ci = i + 1, cj = j + 1;
    for (std::uint32_t c = 0; c < s.arity(i); ++c) {
      work.emplace_back(ci, cj);
      ci = s.end(ci);
      cj = t.end(cj);
    }
  }
  return true;
}

}  // namespace

std::optional<Substitution> naive_unify(const ExplicitTerm& s, const ExplicitTerm& t, const SymbolTable& table) {
  require_no_context_vars(s, table);
  require_no_context_vars(t, table);
  Substitution sigma;
  std::vector<std::pair<ExplicitTerm, ExplicitTerm>> work{{s, t}};
  while (!work.empty()) {
    auto [a, b] = std::move(work.back());
    work.pop_back();
    a = tgram::apply(sigma, a);
    b = tgram::apply(sigma, b);
    if (a == b) continue;
    bool av = table.is_first_order_variable(a.root());
    bool bv = table.is_first_order_variable(b.root());
    if (av || bv) {
      Id x = av ? a.root() : b.root();
      const ExplicitTerm& u = av ? b : a;
      if (u.contains(x)) return std::nullopt;
      Substitution single{{x, u}};
      for (auto& [k, v] : sigma) v = tgram::apply(single, v);
      sigma.emplace(x, u);
      continue;
    }
    if (a.root() != b.root() || a.arity(0) != b.arity(0)) return std::nullopt;
    std::size_t ca = 1, cb = 1;
    for (std::uint32_t c = 0; c < a.arity(0); ++c) {
      work.emplace_back(a.subtree(ca), b.subtree(cb));
      ca = a.end(ca);
      cb = b.end(cb);
    }
  }
  return sigma;
}

std::optional<Substitution> naive_match(const ExplicitTerm& s, const ExplicitTerm& t, const SymbolTable& table) {
  require_no_context_vars(s, table);
  if (!is_ground(t, table)) fail(ErrorCode::invalid_argument, "matching target is not ground");
  Substitution sigma;
  if (!match_into(s, t, sigma, table)) return std::nullopt;
  return sigma;
}

namespace {

std::vector<std::uint64_t> node_key(const ExplicitTerm& t) {
  std::vector<std::uint64_t> k;
  k.reserve(t.size());
  for (const auto& n : t.nodes()) k.push_back((std::uint64_t{n.symbol} << 32) | n.arity);
  return k;
}

}  // namespace

std::vector<Substitution> brute_context_match(const std::vector<ExplicitEquation>& equations,
                                              const SymbolTable& table) {
  std::vector<Id> ctx_vars;
  for (const auto& [lhs, rhs] : equations) {
    if (!is_ground(rhs, table)) fail(ErrorCode::invalid_argument, "right-hand side is not ground");
    for (Id v : variables_of(lhs, table)) {
      if (table.is_context_variable(v) && std::find(ctx_vars.begin(), ctx_vars.end(), v) == ctx_vars.end()) {
        ctx_vars.push_back(v);
      }
    }
  }

  std::vector<ExplicitTerm> candidates;
  if (!ctx_vars.empty()) {
    std::set<std::vector<std::uint64_t>> seen;
    for (const auto& eq : equations) {
      const ExplicitTerm& t = eq.second;
      for (std::size_t i = 0; i < t.size(); ++i) {
        ExplicitTerm sub = t.subtree(i);
        for (std::size_t j = 0; j < sub.size(); ++j) {
          ExplicitTerm c = sub.replace(j, ExplicitTerm::hole());
          if (seen.insert(node_key(c)).second) candidates.push_back(std::move(c));
        }
      }
    }
  }

  std::vector<Substitution> out;
  std::set<std::string> keys;
  std::vector<std::size_t> choice(ctx_vars.size(), 0);
  while (true) {
    Substitution sigma;
    for (std::size_t v = 0; v < ctx_vars.size(); ++v) sigma.emplace(ctx_vars[v], candidates[choice[v]]);
    bool ok = true;
    for (const auto& [lhs, rhs] : equations) {
      ExplicitTerm s = ctx_vars.empty() ? lhs : tgram::apply(sigma, lhs);
      if (s.size() > rhs.size() || !match_into(s, rhs, sigma, table)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      std::string key = to_string(sigma, table);
      if (keys.insert(key).second) out.push_back(std::move(sigma));
    }
    // next assignment
    std::size_t v = 0;
    while (v < choice.size() && ++choice[v] == candidates.size()) choice[v++] = 0;
    if (v == choice.size()) break;
  }
  return out;
}

std::string canonical_key(const std::vector<ExplicitTerm>& terms, const SymbolTable& table) {
  std::unordered_map<Id, std::size_t> rename;
  std::string out;
  for (const auto& t : terms) {
    for (const auto& n : t.nodes()) {
      if (table.is_free_variable(n.symbol)) {
        auto [it, fresh] = rename.emplace(n.symbol, rename.size());
        out += "?" + std::to_string(it->second);
      } else {
        out += table.name(n.symbol);
      }
      out += '/';
      out += std::to_string(n.arity);
      out += ' ';
    }
    out += '|';
  }
  return out;
}

// ---- text

std::string to_string(const ExplicitTerm& t, const SymbolTable& table) {
  struct Open {
    std::uint32_t arity;
    std::uint32_t printed;
  };
  std::string out;
  std::vector<Open> st;
  for (const auto& n : t.nodes()) {
    if (!st.empty() && st.back().printed > 0) out += ',';
    out += table.name(n.symbol);
    if (n.arity > 0) {
      out += '(';
      st.push_back({n.arity, 0});
      continue;
    }
    while (!st.empty()) {
      if (++st.back().printed < st.back().arity) break;
      out += ')';
      st.pop_back();
    }
  }
  return out;
}

std::string to_string(const Substitution& sigma, const SymbolTable& table) {
  std::vector<std::pair<std::string, std::string>> items;
  for (const auto& [v, t] : sigma) items.emplace_back(table.name(v), to_string(t, table));
  std::sort(items.begin(), items.end());
  std::string out = "{";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += items[i].first + " -> " + items[i].second;
  }
  return out + "}";
}

namespace {

class TermParser {
 public:
  TermParser(std::string_view text, const SymbolTable& table) : s_(text), table_(table) {}

  ExplicitTerm parse() {
    std::vector<ExplicitTerm::Node> nodes;
    term(nodes, 0);
    skip();
    if (pos_ != s_.size()) error("trailing input");
    return ExplicitTerm(std::move(nodes));
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  [[noreturn]] void error(const std::string& what) {
    fail(ErrorCode::parse, what + " at offset " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
  }

  void term(std::vector<ExplicitTerm::Node>& nodes, int depth) {
    if (depth > 100000) error("term nested too deeply");
    skip();
    if (s_.compare(pos_, 2, "[]") == 0) {
      pos_ += 2;
      nodes.push_back({hole_id, 0});
      return;
    }
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '\'')) {
      ++pos_;
    }
    if (start == pos_) error("expected a symbol");
    std::string_view name = s_.substr(start, pos_ - start);
    Id id = table_.find(name);
    if (id == no_id) error("unknown symbol '" + std::string(name) + "'");
    if (!table_.is_terminal(id)) error("'" + std::string(name) + "' is not a terminal");
    std::size_t slot = nodes.size();
    nodes.push_back({id, 0});
    skip();
    std::uint32_t n = 0;
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      while (true) {
        term(nodes, depth + 1);
        ++n;
        skip();
        if (pos_ < s_.size() && s_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (pos_ < s_.size() && s_[pos_] == ')') {
          ++pos_;
          break;
        }
        error("expected ',' or ')'");
      }
    }
    if (n != table_.arity(id)) {
      error("'" + std::string(name) + "' has arity " + std::to_string(table_.arity(id)) + ", got " +
            std::to_string(n) + " arguments");
    }
    nodes[slot].arity = n;
  }

  std::string_view s_;
  const SymbolTable& table_;
  std::size_t pos_ = 0;
};

}  // namespace

ExplicitTerm parse_term(std::string_view text, const SymbolTable& table) { return TermParser(text, table).parse(); }

ExplicitTerm translate(const ExplicitTerm& t, const SymbolTable& from, const SymbolTable& to) {
  std::vector<ExplicitTerm::Node> n = t.nodes();
  for (auto& x : n) x.symbol = to.at(from.name(x.symbol));
  return ExplicitTerm(std::move(n));
}

Substitution translate(const Substitution& s, const SymbolTable& from, const SymbolTable& to) {
  Substitution out;
  for (const auto& [v, t] : s) out.emplace(to.at(from.name(v)), translate(t, from, to));
  return out;
}

}  // namespace tgram
