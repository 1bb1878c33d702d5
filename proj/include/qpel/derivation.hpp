#pragma once
// Proof checking. A script is checked top-down against its goal: the root rule
// is matched against the goal, its premises are computed from the goal and the
// explicit arguments, and each premise script is checked against its premise.
//
// Premises that are equalities or inequalities are script children. Typing and
// effect-formation premises of the non-formation rules are discharged by the
// typechecker. A formation goal is proved by formation rules whose premises
// are all script children.
//
// An equivalence premise takes one script, checked in both directions.

#include "qpel/printer.hpp"
#include "qpel/proof_script.hpp"
#include "qpel/syntax.hpp"
#include "qpel/typecheck.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpel {

class ProofError : public std::runtime_error {
 public:
  ProofError(std::string rule, std::string path, const std::string& message)
      : std::runtime_error("at node " + path + " (" + rule + "): " + message),
        rule_(std::move(rule)),
        path_(std::move(path)),
        message_(message) {}
  const std::string& rule() const { return rule_; }
  const std::string& path() const { return path_; }
  const std::string& message() const { return message_; }

 private:
  std::string rule_, path_, message_;
};

struct DerivationNode {
  std::string rule;
  Judgement conclusion;
  std::vector<DerivationNode> premises;

  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& p : premises) n += p.size();
    return n;
  }
};

inline void collect_rules(const DerivationNode& n, std::vector<std::string>& out) {
  if (std::find(out.begin(), out.end(), n.rule) == out.end()) out.push_back(n.rule);
  for (const auto& p : n.premises) collect_rules(p, out);
}

struct CheckedLemma {
  Judgement goal;  // elaborated
  std::vector<DerivationNode> trees;  // one per direction for an equivalence
  std::vector<std::string> rules_used;  // sorted
};

struct DerivationConfig {
  bool qubit = true;      // the core pack is always enabled
  bool beta_iso = false;
  int auto_depth = 6;
};

namespace detail {

struct RuleFailure {
  std::string message;
};

[[noreturn]] inline void fail(const std::string& m) { throw RuleFailure{m}; }

// Closed effects built from scalar literals, 0, bot, o+ and . have an exact
// value. nullopt when the expression is not such a literal or is undefined.
inline std::optional<Rational> literal_value(const EffectPtr& e, bool& has_scalar) {
  using K = Effect::Kind;
  switch (e->kind) {
    case K::Zero:
      return Rational(0);
    case K::Scalar:
      has_scalar = true;
      return e->value;
    case K::Bot: {
      auto v = literal_value(e->a, has_scalar);
      if (!v) return std::nullopt;
      return Rational(1) - *v;
    }
    case K::Ovee: {
      auto a = literal_value(e->a, has_scalar);
      auto b = literal_value(e->b, has_scalar);
      if (!a || !b || *a + *b > 1) return std::nullopt;
      return *a + *b;
    }
    case K::Mult: {
      auto a = literal_value(e->a, has_scalar);
      auto b = literal_value(e->b, has_scalar);
      if (!a || !b) return std::nullopt;
      return *a * *b;
    }
    default:
      return std::nullopt;
  }
}

inline std::optional<Rational> literal_value(const EffectPtr& e) {
  bool has_scalar = false;
  return literal_value(e, has_scalar);
}

/// Replaces each maximal literal subexpression mentioning a scalar by its value.
inline EffectPtr normalise_literals(const EffectPtr& e) {
  bool has_scalar = false;
  if (auto v = literal_value(e, has_scalar); v && has_scalar) {
    if (*v == 0) return mk::zero();
    if (*v == 1) return mk::one();
    return mk::scalar(*v);
  }
  if (!e->a && !e->b) return e;
  Effect c = *e;
  if (c.a) c.a = normalise_literals(c.a);
  if (c.b) c.b = normalise_literals(c.b);
  return std::make_shared<const Effect>(std::move(c));
}

inline bool same(const TermPtr& a, const TermPtr& b) { return alpha_eq(a, b); }
inline bool same(const EffectPtr& a, const EffectPtr& b) {
  return alpha_eq(a, b) || alpha_eq(normalise_literals(a), normalise_literals(b));
}

std::pair<std::string, std::string> first_difference(const TermPtr& a, const TermPtr& b);
std::pair<std::string, std::string> first_difference(const EffectPtr& a, const EffectPtr& b);

inline std::pair<std::string, std::string> first_difference(const TermPtr& a, const TermPtr& b) {
  using K = Term::Kind;
  std::pair<std::string, std::string> here{print(a), print(b)};
  if (a->kind != b->kind || a->name != b->name || a->x != b->x || a->y != b->y ||
      a->branches.size() != b->branches.size())
    return here;
  for (auto [l, r] : {std::pair{a->a, b->a}, std::pair{a->b, b->b}, std::pair{a->c, b->c}})
    if (l && r && !alpha_eq(l, r)) return first_difference(l, r);
  if (a->kind == K::Measure)
    for (std::size_t i = 0; i < a->branches.size(); ++i) {
      if (!same(a->branches[i].effect, b->branches[i].effect))
        return first_difference(a->branches[i].effect, b->branches[i].effect);
      if (!alpha_eq(a->branches[i].term, b->branches[i].term))
        return first_difference(a->branches[i].term, b->branches[i].term);
    }
  return here;
}

inline std::pair<std::string, std::string> first_difference(const EffectPtr& a, const EffectPtr& b) {
  std::pair<std::string, std::string> here{print(a), print(b)};
  if (a->kind != b->kind || a->x != b->x || a->y != b->y || !(a->angle == b->angle) || a->value != b->value)
    return here;
  if (a->term && b->term && !alpha_eq(a->term, b->term)) return first_difference(a->term, b->term);
  for (auto [l, r] : {std::pair{a->a, b->a}, std::pair{a->b, b->b}})
    if (l && r && !same(l, r)) return first_difference(l, r);
  return here;
}

template <class T>
void match(const T& expected, const T& found) {
  if (same(expected, found)) return;
  auto [e, f] = first_difference(expected, found);
  fail("schema mismatch: expected " + e + ", found " + f);
}

inline const Term& shape(const TermPtr& t, Term::Kind k, const char* expected) {
  if (!t || t->kind != k) fail(std::string("schema mismatch: expected ") + expected + ", found " + print(t));
  return *t;
}

inline const Effect& shape(const EffectPtr& e, Effect::Kind k, const char* expected) {
  if (!e || e->kind != k) fail(std::string("schema mismatch: expected ") + expected + ", found " + print(e));
  return *e;
}

inline const Type& type_shape(const TypePtr& t, Type::Kind k, const char* expected) {
  if (!t || t->kind != k) fail(std::string("schema mismatch: expected type ") + expected + ", found " + print(t));
  return *t;
}

inline bool is(const EffectPtr& e, Effect::Kind k) { return e && e->kind == k; }
inline bool is(const TermPtr& t, Term::Kind k) { return t && t->kind == k; }

inline void require(bool ok, const std::string& message) {
  if (!ok) fail("side condition failed: " + message);
}

inline NameSet free_of(const std::vector<TermPtr>& ts) {
  NameSet out;
  for (const auto& t : ts) collect_free(t, out);
  return out;
}

inline NameSet free_of(const std::vector<EffectPtr>& es) {
  NameSet out;
  for (const auto& e : es) collect_free(e, out);
  return out;
}

inline NameSet free_under(const TermPtr& t, std::initializer_list<std::string> binders) {
  return minus(free_vars(t), binders);
}

inline NameSet free_under(const EffectPtr& e, std::initializer_list<std::string> binders) {
  return minus(free_vars(e), binders);
}

inline std::vector<Context> split(const Context& ctx, const std::vector<NameSet>& parts) {
  try {
    return split_context(ctx, parts);
  } catch (const TypeError& e) {
    fail(e.message());
  }
}

template <class T>
T rename(const T& body, const std::string& from, const std::string& to) {
  if (from == to) return body;
  return substitute(body, Substitution{{from, mk::var(to)}});
}

/// Brings two abstractions x1.b1 and x2.b2 to a common binder.
template <class T>
std::tuple<std::string, T, T> align(const std::string& x1, const T& b1, const std::string& x2, const T& b2) {
  if (x1 == x2) return {x1, b1, b2};
  if (!free_vars(b2).count(x1)) return {x1, b1, rename(b2, x2, x1)};
  NameSet avoid = unite(free_vars(b1), free_vars(b2));
  avoid.insert(x1);
  avoid.insert(x2);
  std::string z = fresh_name(x1, avoid);
  return {z, rename(b1, x1, z), rename(b2, x2, z)};
}

/// Brings two double abstractions (x1,y1).b1 and (x2,y2).b2 to common binders.
inline std::tuple<std::string, std::string, TermPtr, TermPtr> align2(const std::string& x1, const std::string& y1,
                                                                     const TermPtr& b1, const std::string& x2,
                                                                     const std::string& y2, const TermPtr& b2) {
  if (x1 == x2 && y1 == y2) return {x1, y1, b1, b2};
  NameSet avoid = unite(free_vars(b1), free_vars(b2));
  for (const auto& n : {x1, y1, x2, y2}) avoid.insert(n);
  std::string z = fresh_name(x1, avoid);
  avoid.insert(z);
  std::string w = fresh_name(y1, avoid);
  auto to = [&](const TermPtr& b, const std::string& x, const std::string& y) {
    return substitute(b, Substitution{{x, mk::var(z)}, {y, mk::var(w)}});
  };
  return {z, w, to(b1, x1, y1), to(b2, x2, y2)};
}

inline std::vector<EffectPtr> branch_effects(const Term& m) {
  std::vector<EffectPtr> out;
  for (const auto& br : m.branches) out.push_back(br.effect);
  return out;
}

inline std::vector<TermPtr> branch_terms(const Term& m) {
  std::vector<TermPtr> out;
  for (const auto& br : m.branches) out.push_back(br.term);
  return out;
}

inline NameSet judgement_free(const Judgement& j) {
  NameSet out;
  for (const auto& t : {j.lhs, j.rhs})
    if (t) collect_free(t, out);
  for (const auto& e : {j.elhs, j.erhs})
    if (e) collect_free(e, out);
  return out;
}

}  // namespace detail

class DerivationChecker {
 public:
  explicit DerivationChecker(DerivationConfig cfg = {}) : cfg_(cfg) {}

  const DerivationConfig& config() const { return cfg_; }

  bool enabled(std::string_view rule) const {
    auto p = rule_pack(rule);
    if (!p) return false;
    if (*p == RulePack::Qubit) return cfg_.qubit;
    if (*p == RulePack::BetaIso) return cfg_.beta_iso;
    return true;
  }

  /// Typechecker options whose <= obligations go through this checker.
  CheckOptions options(std::vector<Script> scripts = {}) {
    CheckOptions o;
    o.resolver = resolver();
    o.scripts = std::move(scripts);
    o.qubits = cfg_.qubit;
    return o;
  }

  /// Explicit scripts are checked; otherwise bounded search.
  ObligationResolver resolver() {
    return [this](const Judgement& goal, const Script* given) -> ObligationOutcome {
      try {
        if (given && !given->is_auto()) {
          prove(*given, goal, "1");
          return {true, *given, ""};
        }
        int depth = given && given->args.depth ? *given->args.depth : cfg_.auto_depth;
        if (auto s = auto_search_leq(goal.ctx, goal.elhs, goal.erhs, depth)) return {true, *s, ""};
        return {false, {}, "no derivation found within depth " + std::to_string(depth)};
      } catch (const std::exception& e) {
        return {false, {}, e.what()};
      }
    };
  }

  /// Checks a goal. An equivalence takes one script (used for both
  /// directions) or two. Throws TypeError when the goal is ill-formed and
  /// ProofError when a script is rejected.
  CheckedLemma check(const std::vector<Script>& proofs, const Judgement& raw_goal) {
    Judgement goal = elaborate(raw_goal);
    CheckedLemma out;
    out.goal = goal;
    if (goal.kind == Judgement::Kind::EffEquiv) {
      if (proofs.empty() || proofs.size() > 2)
        throw ProofError("equiv", "1", "an equivalence takes one or two scripts, got " + std::to_string(proofs.size()));
      out.trees.push_back(prove(proofs[0], Judgement::leq(goal.ctx, goal.elhs, goal.erhs), "1"));
      out.trees.push_back(prove(proofs.back(), Judgement::leq(goal.ctx, goal.erhs, goal.elhs), "2"));
    } else {
      if (proofs.size() != 1)
        throw ProofError(proofs.empty() ? "none" : proofs[1].rule, "1",
                         "expected one script, got " + std::to_string(proofs.size()));
      out.trees.push_back(prove(proofs[0], goal, "1"));
    }
    for (const auto& t : out.trees) collect_rules(t, out.rules_used);
    std::sort(out.rules_used.begin(), out.rules_used.end());
    return out;
  }

  CheckedLemma check(const Script& proof, const Judgement& goal) { return check(std::vector<Script>{proof}, goal); }

  /// Deterministic bounded search for Gamma |- phi <= psi: iterative deepening
  /// over a fixed rule order, premises solved left to right. The result is
  /// re-checked before it is returned.
  std::optional<Script> auto_search_leq(const Context& ctx, const EffectPtr& phi, const EffectPtr& psi, int depth) {
    Judgement g = Judgement::leq(ctx, phi, psi);
    std::string key = print(g);
    // Searches nest through the formation checks of new premises.
    if (nesting_ >= kMaxNesting) {
      ++cutoffs_;
      return std::nullopt;
    }
    struct Nest {
      int& n;
      explicit Nest(int& k) : n(++k) {}
      ~Nest() { --n; }
    } nest(nesting_);
    if (auto it = found_.find(key); it != found_.end() && script_depth(it->second) <= depth) return it->second;
    for (int d = 1; d <= depth; ++d) {
      auto s = dfs(g, d);
      if (!s) continue;
      try {
        prove(*s, g, "1");
      } catch (const std::exception&) {
        continue;
      }
      found_.emplace(key, *s);
      return s;
    }
    return std::nullopt;
  }

  /// Checks one script against one (already elaborated) judgement.
  DerivationNode prove(const Script& s, const Judgement& g, const std::string& path) {
    if (s.is_auto()) return prove_auto(s, g, path);
    if (!is_rule_name(s.rule)) throw ProofError(s.rule, path, "unknown rule '" + s.rule + "'");
    if (!enabled(s.rule))
      throw ProofError(s.rule, path,
                       "rule '" + s.rule + "' belongs to the disabled pack '" +
                           std::string(pack_name(*rule_pack(s.rule))) + "'");
    std::vector<Judgement> premises;
    try {
      in_scope(g);
      if (g.kind == Judgement::Kind::TermEq) {
        well_typed(g.ctx, g.lhs, g.type);
        well_typed(g.ctx, g.rhs, g.type);
      }
      premises = premises_of(s, g);
    } catch (const detail::RuleFailure& f) {
      throw ProofError(s.rule, path, f.message);
    } catch (const TypeError& e) {
      throw ProofError(s.rule, path, e.what());
    }
    if (premises.size() != s.premises.size())
      throw ProofError(s.rule, path,
                       "wrong premise count: rule '" + s.rule + "' has " + std::to_string(premises.size()) +
                           " premises, the script gives " + std::to_string(s.premises.size()));
    DerivationNode node{s.rule, g, {}};
    for (std::size_t i = 0; i < premises.size(); ++i) {
      std::string sub = path + "." + std::to_string(i + 1);
      const Judgement& p = premises[i];
      if (p.kind == Judgement::Kind::EffEquiv) {
        node.premises.push_back(prove(s.premises[i], Judgement::leq(p.ctx, p.elhs, p.erhs), sub));
        node.premises.push_back(prove(s.premises[i], Judgement::leq(p.ctx, p.erhs, p.elhs), sub));
      } else {
        node.premises.push_back(prove(s.premises[i], p, sub));
      }
    }
    return node;
  }

  /// Annotates the goal's terms and checks that its components are well formed.
  Judgement elaborate(const Judgement& g) {
    CheckOptions trusting;
    trusting.resolver = trusting_resolver();
    trusting.qubits = cfg_.qubit;
    auto term = [&](const TermPtr& m, const TypePtr& a) {
      auto r = check_term(g.ctx, m, a, trusting);
      if (!r.ok()) throw *r.error;
      return r.term;
    };
    auto effect = [&](const EffectPtr& e) {
      auto r = check_effect(g.ctx, e, trusting);
      if (!r.ok()) throw *r.error;
      return r.effect;
    };
    Judgement out = g;
    switch (g.kind) {
      case Judgement::Kind::Typing:
        out.lhs = term(g.lhs, g.type);
        break;
      case Judgement::Kind::TermEq:
        out.lhs = term(g.lhs, g.type);
        out.rhs = term(g.rhs, g.type);
        for (const auto& m : {out.lhs, out.rhs}) {
          auto r = check_term(g.ctx, m, g.type, options());
          if (!r.ok()) throw *r.error;
        }
        break;
      case Judgement::Kind::EffFormation:
        out.elhs = effect(g.elhs);
        break;
      case Judgement::Kind::EffLeq:
      case Judgement::Kind::EffEquiv:
        out.elhs = effect(g.elhs);
        out.erhs = effect(g.erhs);
        for (const auto& e : {out.elhs, out.erhs}) {
          auto r = check_effect(g.ctx, e, options());
          if (!r.ok()) throw *r.error;
        }
        break;
    }
    return out;
  }

 private:
  using J = Judgement;
  using TK = Term::Kind;
  using EK = Effect::Kind;
  using YK = Type::Kind;

  static int script_depth(const Script& s) {
    int d = 0;
    for (const auto& p : s.premises) d = std::max(d, script_depth(p));
    return d + 1;
  }

  // ---- auto ---------------------------------------------------------------

  DerivationNode prove_auto(const Script& s, const Judgement& g, const std::string& path) {
    switch (g.kind) {
      case J::Kind::EffLeq: {
        int depth = s.args.depth.value_or(cfg_.auto_depth);
        auto found = auto_search_leq(g.ctx, g.elhs, g.erhs, depth);
        if (!found)
          throw ProofError("auto", path,
                           "no derivation of " + print(g) + " found within depth " + std::to_string(depth));
        return prove(*found, g, path);
      }
      case J::Kind::Typing:
      case J::Kind::EffFormation: {
        auto r = g.kind == J::Kind::Typing ? check_term(g.ctx, g.lhs, g.type, options())
                                           : check_effect(g.ctx, g.elhs, options());
        if (!r.ok()) throw ProofError("auto", path, r.error->what());
        return convert(r.derivation, path);
      }
      case J::Kind::TermEq:
        if (detail::same(g.lhs, g.rhs)) return DerivationNode{"ref", g, {}};
        throw ProofError("auto", path, "auto does not search term equalities");
      default:
        throw ProofError("auto", path, "auto cannot prove " + print(g));
    }
  }

  DerivationNode convert(const FormationNode& f, const std::string& path) {
    if (f.proof) return prove(*f.proof, f.conclusion, path);
    DerivationNode n{f.rule, f.conclusion, {}};
    for (std::size_t i = 0; i < f.premises.size(); ++i)
      n.premises.push_back(convert(f.premises[i], path + "." + std::to_string(i + 1)));
    return n;
  }

  std::optional<Script> dfs(const Judgement& g, int depth) {
    std::string key = print(g);
    if (auto it = failed_.find(key); it != failed_.end() && it->second >= depth) return std::nullopt;
    int before = cutoffs_;
    for (auto& cand : candidates(g)) {
      std::vector<Judgement> premises;
      try {
        in_scope(g);
        premises = instantiate(cand, g);
      } catch (const detail::RuleFailure&) {
        continue;
      } catch (const std::exception&) {
        continue;
      }
      if (!premises.empty() && depth <= 1) continue;
      bool ok = true;
      for (const auto& p : premises) {
        std::optional<Script> sub;
        if (p.kind == J::Kind::EffLeq) {
          sub = dfs(p, depth - 1);
        } else if (p.kind == J::Kind::TermEq) {
          if (detail::same(p.lhs, p.rhs)) sub = Script{"ref", {}, {}};
        } else if (p.kind == J::Kind::Typing || p.kind == J::Kind::EffFormation) {
          sub = make_auto();
        }
        if (!sub) {
          ok = false;
          break;
        }
        cand.premises.push_back(std::move(*sub));
      }
      if (ok) return cand;
    }
    // A failure caused by a nesting cutoff may succeed from a shallower call.
    if (cutoffs_ == before) failed_[key] = std::max(failed_[key], depth);
    return std::nullopt;
  }

  std::vector<Script> candidates(const Judgement& g) {
    static const char* order[] = {
        "leq-ref",        "zero-leq",        "ortho-2",         "bot-bot",       "ovee-0",      "unit-l",
        "unit-r",         "comm",            "assoc",           "case-bot",      "case-times",  "beta-plus-1-eff",
        "beta-plus-2-eff", "qbit-x-proj",    "qbit-z-proj",     "qbit-xz-zx",    "eta-plus-eff", "leq-ovee",
        "bot-antitone",   "ovee-comm",       "ovee-assoc",      "perp-rotate",   "ortho-1",     "ovee-mono",
        "dist-l",         "dist-r",          "case-ovee",       "case-mono",     "case-leq",    "case-cong"};
    std::vector<Script> out;
    for (const char* r : order)
      if (enabled(r)) out.push_back(Script{r, {}, {}});
    for (const auto& m : middles(g)) {
      Script s{"leq-trans", {}, {}};
      s.args.effect = m;
      out.push_back(std::move(s));
    }
    return out;
  }

  /// Middle effects tried by leq-trans, in order.
  static std::vector<EffectPtr> middles(const Judgement& g) {
    using detail::is;
    const EffectPtr& L = g.elhs;
    const EffectPtr& R = g.erhs;
    std::vector<EffectPtr> out{mk::bot(mk::bot(L))};
    if (is(R, EK::Ovee)) {
      out.push_back(mk::ovee(R->b, R->a));
      out.push_back(R->a);
    }
    if (is(L, EK::Ovee) && is(L->b, EK::Zero)) out.push_back(L->a);
    // caseE M of (a o+ a') | (b o+ b'), merging a sum of two case splits on M
    if (is(R, EK::Ovee) && is(R->a, EK::Case) && is(R->b, EK::Case) && alpha_eq(R->a->term, R->b->term)) {
      const Effect& c1 = *R->a;
      const Effect& c2 = *R->b;
      auto [x, a1, a2] = detail::align(c1.x, c1.a, c2.x, c2.a);
      auto [y, b1, b2] = detail::align(c1.y, c1.b, c2.y, c2.b);
      out.push_back(mk::case_eff(c1.term, x, mk::ovee(a1, a2), y, mk::ovee(b1, b2)));
    }
    // a closed effect split over a sum variable
    if (is(R, EK::Case) && is(R->term, TK::Var) && free_vars(L).empty())
      out.push_back(mk::case_eff(R->term, R->x, L, R->y, L));
    if (is(R, EK::Bot) && is(R->a, EK::Case)) {
      const Effect& c = *R->a;
      out.push_back(mk::case_eff(c.term, c.x, mk::bot(c.a), c.y, mk::bot(c.b)));
    }
    return out;
  }

  // ---- well-formedness ----------------------------------------------------

  static void effect_subterms(const EffectPtr& e, std::vector<EffectPtr>& out) {
    out.push_back(e);
    if (e->a) effect_subterms(e->a, out);
    if (e->b) effect_subterms(e->b, out);
  }

  /// Effects whose formation follows from that of the goal: subterms of its
  /// sides under any number of bot, and swapped subterm sums.
  static bool known_formed(const EffectPtr& e, const Judgement& g) {
    EffectPtr core = e;
    while (core->kind == EK::Bot) core = core->a;
    std::vector<EffectPtr> subs;
    for (const auto& side : {g.elhs, g.erhs})
      if (side) effect_subterms(side, subs);
    for (const auto& t : subs) {
      if (alpha_eq(core, t)) return true;
      if (t->kind == EK::Ovee && alpha_eq(core, mk::ovee(t->b, t->a))) return true;
    }
    return detail::literal_value(core).has_value();
  }

  /// The premises of a node, each inequality checked for well-formedness.
  std::vector<Judgement> premises_of(const Script& s, const Judgement& g) {
    auto ps = instantiate(s, g);
    if (g.kind == J::Kind::EffLeq)
      for (const auto& p : ps)
        if (p.kind == J::Kind::EffLeq || p.kind == J::Kind::EffEquiv)
          for (const auto& side : {p.elhs, p.erhs})
            if (!known_formed(side, g)) well_formed(p.ctx, side);
    return ps;
  }

  static void in_scope(const Judgement& g) {
    if (!has_distinct_names(g.ctx)) detail::fail("context " + print(g.ctx) + " binds a name twice");
    for (const auto& n : detail::judgement_free(g))
      if (!lookup(g.ctx, n)) detail::fail("ill-scoped judgement " + print(g) + ": '" + n + "' is not in the context");
  }

  void well_typed(const Context& ctx, const TermPtr& m, const TypePtr& a) {
    std::string key = print(ctx) + " |- " + print(m) + " : " + (a ? print(a) : std::string("?"));
    auto it = typed_.find(key);
    if (it == typed_.end()) {
      typed_[key] = kCircular;
      int before = cutoffs_;
      auto r = check_term(ctx, m, a, options());
      if (!r.ok() && cutoffs_ != before) {
        typed_.erase(key);
        detail::fail(key + " is not derivable: " + r.error->what());
      }
      it = typed_.insert_or_assign(key, r.ok() ? "" : std::string(r.error->what())).first;
    }
    if (it->second == kCircular) ++cutoffs_;
    if (!it->second.empty()) detail::fail(key + " is not derivable: " + it->second);
  }

  void well_formed(const Context& ctx, const EffectPtr& e) {
    std::string key = print(J::eff(ctx, e));
    auto it = typed_.find(key);
    if (it == typed_.end()) {
      typed_[key] = kCircular;
      int before = cutoffs_;
      auto r = check_effect(ctx, e, options());
      if (!r.ok() && cutoffs_ != before) {
        typed_.erase(key);
        detail::fail(key + " is not derivable: " + r.error->what());
      }
      it = typed_.insert_or_assign(key, r.ok() ? "" : std::string(r.error->what())).first;
    }
    if (it->second == kCircular) ++cutoffs_;
    if (!it->second.empty()) detail::fail(key + " is not derivable: " + it->second);
  }

  TypePtr type_in(const Context& ctx, const TermPtr& m) {
    for (const auto& n : free_vars(m))
      if (!lookup(ctx, n)) detail::fail("'" + n + "' is not available to " + print(m));
    well_typed(ctx, m, nullptr);
    return type_of(ctx, m);
  }

  TermPtr elab_term(const Context& ctx, const TermPtr& m, const TypePtr& a) {
    auto r = check_term(ctx, m, a, options());
    if (!r.ok()) detail::fail("argument " + print(m) + ": " + r.error->what());
    return r.term;
  }

  EffectPtr elab_effect(const Context& ctx, const EffectPtr& e, bool annotate_only = false) {
    CheckOptions o = options();
    if (annotate_only) o.resolver = trusting_resolver();
    auto r = check_effect(ctx, e, o);
    if (!r.ok()) detail::fail("argument " + print(e) + ": " + r.error->what());
    return r.effect;
  }

  static bool closed(const EffectPtr& e) { return free_vars(e).empty(); }

  // ---- rules --------------------------------------------------------------

  std::vector<Judgement> instantiate(const Script& s, const Judgement& g) {
    if (s.rule == "exch") return exch(s, g);
    switch (g.kind) {
      case J::Kind::Typing:
        return typing_rule(s, g);
      case J::Kind::EffFormation:
        return formation_rule(s, g);
      case J::Kind::TermEq:
        return term_eq_rule(s, g);
      case J::Kind::EffLeq:
        return leq_rule(s, g);
      default:
        detail::fail("an equivalence is proved one direction at a time");
    }
  }

  static std::vector<Judgement> exch(const Script& s, const Judgement& g) {
    int pos = s.args.pos.value_or(1);
    if (pos < 1 || static_cast<std::size_t>(pos) >= g.ctx.size())
      detail::fail("side condition failed: exch position " + std::to_string(pos) + " out of range for " +
                   print(g.ctx));
    Judgement p = g;
    std::swap(p.ctx[static_cast<std::size_t>(pos) - 1], p.ctx[static_cast<std::size_t>(pos)]);
    return {p};
  }

  [[noreturn]] static void wrong_kind(const std::string& rule, const char* kind) {
    detail::fail("rule '" + rule + "' does not conclude " + kind);
  }

  std::vector<Judgement> typing_rule(const Script& s, const Judgement& g) {
    using namespace detail;
    const std::string& r = s.rule;
    const Context& G = g.ctx;
    const TermPtr& M = g.lhs;
    const TypePtr& A = g.type;
    if (r == "var") {
      const Term& v = shape(M, TK::Var, "a variable");
      const Binding* b = lookup(G, v.name);
      require(b && type_equal(b->type, A), "'" + v.name + " : " + print(A) + "' is not in " + print(G));
      return {};
    }
    if (r == "unit") {
      shape(M, TK::Unit, "unit");
      type_shape(A, YK::Unit, "I");
      return {};
    }
    if (r == "qbit-new") {
      shape(M, TK::NewPlus, "new");
      type_shape(A, YK::Qbit, "qbit");
      return {};
    }
    if (r == "inl" || r == "inr") {
      const Term& t = shape(M, r == "inl" ? TK::Inl : TK::Inr, r.c_str());
      const Type& s2 = type_shape(A, YK::Sum, "A + B");
      return {J::typing(G, t.a, r == "inl" ? s2.left : s2.right)};
    }
    if (r == "tensor") {
      const Term& t = shape(M, TK::Pair, "a pair");
      const Type& ab = type_shape(A, YK::Tensor, "A * B");
      auto parts = split(G, {free_vars(t.a), free_vars(t.b)});
      return {J::typing(parts[0], t.a, ab.left), J::typing(parts[1], t.b, ab.right)};
    }
    if (r == "qbit-cz") {
      const Term& t = shape(M, TK::CZ, "E M N");
      require(type_equal(A, tensor_type(qbit_type(), qbit_type())), "E M N has type qbit * qbit");
      auto parts = split(G, {free_vars(t.a), free_vars(t.b)});
      return {J::typing(parts[0], t.a, qbit_type()), J::typing(parts[1], t.b, qbit_type())};
    }
    if (r == "qbit-x" || r == "qbit-z") {
      const Term& t = shape(M, r == "qbit-x" ? TK::PauliX : TK::PauliZ, r == "qbit-x" ? "X M" : "Z M");
      type_shape(A, YK::Qbit, "qbit");
      return {J::typing(G, t.a, qbit_type())};
    }
    if (r == "let") {
      const Term& t = shape(M, TK::LetPair, "a let");
      auto parts = split(G, {free_vars(t.a), free_under(t.b, {t.x, t.y})});
      TypePtr ab = type_in(parts[0], t.a);
      type_shape(ab, YK::Tensor, "A * B");
      return {J::typing(parts[0], t.a, ab), J::typing(extend(extend(parts[1], t.x, ab->left), t.y, ab->right), t.b, A)};
    }
    if (r == "case") {
      const Term& t = shape(M, TK::Case, "a case");
      auto parts = split(G, {free_vars(t.a), unite(free_under(t.b, {t.x}), free_under(t.c, {t.y}))});
      TypePtr ab = type_in(parts[0], t.a);
      type_shape(ab, YK::Sum, "A + B");
      return {J::typing(parts[0], t.a, ab), J::typing(extend(parts[1], t.x, ab->left), t.b, A),
              J::typing(extend(parts[1], t.y, ab->right), t.c, A)};
    }
    if (r == "measure") {
      const Term& t = shape(M, TK::Measure, "a measure");
      auto phis = branch_effects(t);
      auto parts = split(G, {free_of(phis), free_of(branch_terms(t))});
      for (const auto& phi : phis) well_formed(parts[0], phi);
      std::vector<Judgement> out{J::leq(parts[0], mk::one(), mk::ovee_n(phis))};
      for (const auto& br : t.branches) out.push_back(J::typing(parts[1], br.term, A));
      return out;
    }
    wrong_kind(r, "a typing judgement");
  }

  std::vector<Judgement> formation_rule(const Script& s, const Judgement& g) {
    using namespace detail;
    const std::string& r = s.rule;
    const Context& G = g.ctx;
    const EffectPtr& e = g.elhs;
    if (r == "eff-0") {
      shape(e, EK::Zero, "0");
      return {};
    }
    if (r == "eff-bot") return {J::eff(G, shape(e, EK::Bot, "bot(phi)").a)};
    if (r == "eff-ovee") {
      const Effect& o = shape(e, EK::Ovee, "phi o+ psi");
      return {J::perp(G, o.a, o.b)};
    }
    if (r == "eff-mult") {
      const Effect& m = shape(e, EK::Mult, "phi . psi");
      return {J::eff({}, m.a), J::eff(G, m.b)};
    }
    if (r == "eff-case") {
      const Effect& c = shape(e, EK::Case, "caseE");
      auto parts = split(G, {unite(free_under(c.a, {c.x}), free_under(c.b, {c.y})), free_vars(c.term)});
      TypePtr ab = type_in(parts[1], c.term);
      type_shape(ab, YK::Sum, "A + B");
      return {J::eff(extend(parts[0], c.x, ab->left), c.a), J::eff(extend(parts[0], c.y, ab->right), c.b),
              J::typing(parts[1], c.term, ab)};
    }
    if (r == "qbit-proj") return {J::typing(G, shape(e, EK::ProjPlus, "M = |+a>").term, qbit_type())};
    wrong_kind(r, "an effect formation judgement");
  }

  std::vector<Judgement> term_eq_rule(const Script& s, const Judgement& g) {
    using namespace detail;
    const std::string& r = s.rule;
    const Context& G = g.ctx;
    const TermPtr& L = g.lhs;
    const TermPtr& R = g.rhs;
    const TypePtr& A = g.type;

    auto measure_split = [&](const Term& l, const Term& rr) {
      NameSet effs = unite(free_of(branch_effects(l)), free_of(branch_effects(rr)));
      NameSet terms = unite(free_of(branch_terms(l)), free_of(branch_terms(rr)));
      return split(G, {effs, terms});
    };

    if (r == "ref") {
      match(L, R);
      return {};
    }
    if (r == "sym") return {J::term_eq(G, R, L, A)};
    if (r == "trans") {
      if (!s.args.term) fail("trans needs the middle term as an explicit argument");
      TermPtr n = elab_term(G, s.args.term, A);
      return {J::term_eq(G, L, n, A), J::term_eq(G, n, R, A)};
    }
    if (r == "tensor-eq") {
      const Term& l = shape(L, TK::Pair, "M * N");
      const Term& rr = shape(R, TK::Pair, "M' * N'");
      const Type& ab = type_shape(A, YK::Tensor, "A * B");
      auto parts = split(G, {unite(free_vars(l.a), free_vars(rr.a)), unite(free_vars(l.b), free_vars(rr.b))});
      return {J::term_eq(parts[0], l.a, rr.a, ab.left), J::term_eq(parts[1], l.b, rr.b, ab.right)};
    }
    if (r == "let-eq") {
      const Term& l = shape(L, TK::LetPair, "a let");
      const Term& rr = shape(R, TK::LetPair, "a let");
      auto [x, y, n, n2] = align2(l.x, l.y, l.b, rr.x, rr.y, rr.b);
      auto parts = split(G, {unite(free_vars(l.a), free_vars(rr.a)), unite(free_under(n, {x, y}), free_under(n2, {x, y}))});
      TypePtr ab = type_in(parts[0], l.a);
      type_shape(ab, YK::Tensor, "A * B");
      return {J::term_eq(parts[0], l.a, rr.a, ab),
              J::term_eq(extend(extend(parts[1], x, ab->left), y, ab->right), n, n2, A)};
    }
    if (r == "inl-eq" || r == "inr-eq") {
      TK k = r == "inl-eq" ? TK::Inl : TK::Inr;
      const Term& l = shape(L, k, r == "inl-eq" ? "inl M" : "inr M");
      const Term& rr = shape(R, k, r == "inl-eq" ? "inl N" : "inr N");
      const Type& ab = type_shape(A, YK::Sum, "A + B");
      return {J::term_eq(G, l.a, rr.a, k == TK::Inl ? ab.left : ab.right)};
    }
    if (r == "case-eq") {
      const Term& l = shape(L, TK::Case, "a case");
      const Term& rr = shape(R, TK::Case, "a case");
      auto [x, n, n2] = align(l.x, l.b, rr.x, rr.b);
      auto [y, p, p2] = align(l.y, l.c, rr.y, rr.c);
      auto parts = split(G, {unite(free_vars(l.a), free_vars(rr.a)),
                             unite(unite(free_under(n, {x}), free_under(n2, {x})),
                                   unite(free_under(p, {y}), free_under(p2, {y})))});
      TypePtr ab = type_in(parts[0], l.a);
      type_shape(ab, YK::Sum, "A + B");
      return {J::term_eq(parts[0], l.a, rr.a, ab), J::term_eq(extend(parts[1], x, ab->left), n, n2, A),
              J::term_eq(extend(parts[1], y, ab->right), p, p2, A)};
    }
    if (r == "measure-eq") {
      const Term& l = shape(L, TK::Measure, "a measure");
      const Term& rr = shape(R, TK::Measure, "a measure");
      if (l.branches.size() != rr.branches.size())
        fail("schema mismatch: the measurements have " + std::to_string(l.branches.size()) + " and " +
             std::to_string(rr.branches.size()) + " branches");
      auto parts = measure_split(l, rr);
      std::vector<Judgement> out{J::leq(parts[0], mk::one(), mk::ovee_n(branch_effects(l)))};
      for (std::size_t i = 0; i < l.branches.size(); ++i)
        out.push_back(J::equiv(parts[0], l.branches[i].effect, rr.branches[i].effect));
      for (std::size_t i = 0; i < l.branches.size(); ++i)
        out.push_back(J::term_eq(parts[1], l.branches[i].term, rr.branches[i].term, A));
      return out;
    }
    if (r == "beta-tensor") {
      const Term& l = shape(L, TK::LetPair, "let x * y = M * N in P");
      const Term& pr = shape(l.a, TK::Pair, "M * N");
      match(substitute(l.b, Substitution{{l.x, pr.a}, {l.y, pr.b}}), R);
      return {};
    }
    if (r == "beta-plus-1" || r == "beta-plus-2") {
      bool left = r == "beta-plus-1";
      const Term& l = shape(L, TK::Case, "a case");
      const Term& in = shape(l.a, left ? TK::Inl : TK::Inr, left ? "inl M" : "inr M");
      match(left ? substitute_term(l.b, l.x, in.a) : substitute_term(l.c, l.y, in.a), R);
      return {};
    }
    if (r == "eta-tensor") {
      type_shape(A, YK::Tensor, "A * B");
      std::string x = is(R, TK::LetPair) ? R->x : "x", y = is(R, TK::LetPair) ? R->y : "y";
      require(x != y, "the binders of eta-tensor differ");
      match(mk::let_pair(x, y, L, mk::pair(mk::var(x), mk::var(y))), R);
      return {};
    }
    if (r == "eta-unit") {
      type_shape(A, YK::Unit, "I");
      match(mk::unit(), R);
      return {};
    }
    if (r == "eta-plus") {
      type_shape(A, YK::Sum, "A + B");
      std::string x = is(R, TK::Case) ? R->x : "x", y = is(R, TK::Case) ? R->y : "y";
      match(mk::case_of(L, x, mk::inl(mk::var(x)), y, mk::inr(mk::var(y))), R);
      return {};
    }
    if (r == "let-commute") {
      const Term& l = shape(L, TK::LetPair, "let x * y = M in let t * u = N in P");
      const Term& in = shape(l.b, TK::LetPair, "let t * u = N in P");
      NameSet p = free_under(in.b, {in.x, in.y});
      require(!p.count(l.x) && !p.count(l.y), "P must not mention " + l.x + " or " + l.y);
      match(mk::let_pair(in.x, in.y, mk::let_pair(l.x, l.y, l.a, in.a), in.b), R);
      return {};
    }
    if (r == "let-case") {
      const Term& l = shape(L, TK::LetPair, "let z * t = case M of ... in Q");
      const Term& c = shape(l.a, TK::Case, "case M of ...");
      NameSet q = free_under(l.b, {l.x, l.y});
      require(!q.count(c.x) && !q.count(c.y), "Q must not mention " + c.x + " or " + c.y);
      match(mk::case_of(c.a, c.x, mk::let_pair(l.x, l.y, c.b, l.b), c.y, mk::let_pair(l.x, l.y, c.c, l.b)), R);
      return {};
    }
    if (r == "let-tensor") {
      const Term& l = shape(L, TK::Pair, "(let x * y = M in N) * P");
      const Term& in = shape(l.a, TK::LetPair, "let x * y = M in N");
      NameSet p = free_vars(l.b);
      require(!p.count(in.x) && !p.count(in.y), "P must not mention " + in.x + " or " + in.y);
      match(mk::let_pair(in.x, in.y, in.a, mk::pair(in.b, l.b)), R);
      return {};
    }
    if (r == "case-commute") {
      const Term& rr = shape(R, TK::Case, "case (case M of ...) of ...");
      const Term& in = shape(rr.a, TK::Case, "case M of ...");
      NameSet q = unite(free_under(rr.b, {rr.x}), free_under(rr.c, {rr.y}));
      require(!q.count(in.x) && !q.count(in.y), "the outer branches must not mention " + in.x + " or " + in.y);
      auto inner = [&](const TermPtr& n) { return mk::case_of(n, rr.x, rr.b, rr.y, rr.c); };
      match(mk::case_of(in.a, in.x, inner(in.b), in.y, inner(in.c)), L);
      return {};
    }
    if (r == "case-tensor") {
      const Term& l = shape(L, TK::Pair, "(case Q of ...) * P");
      const Term& c = shape(l.a, TK::Case, "case Q of ...");
      NameSet p = free_vars(l.b);
      require(!p.count(c.x) && !p.count(c.y), "P must not mention " + c.x + " or " + c.y);
      match(mk::case_of(c.a, c.x, mk::pair(c.b, l.b), c.y, mk::pair(c.c, l.b)), R);
      return {};
    }
    if (r == "measure-perm") {
      const Term& l = shape(L, TK::Measure, "a measure");
      const auto& p = s.args.perm;
      std::size_t n = l.branches.size();
      if (p.size() != n) fail("measure-perm needs a permutation of 1.." + std::to_string(n));
      std::vector<bool> seen(n, false);
      std::vector<MeasureBranch> brs;
      for (int i : p) {
        if (i < 1 || static_cast<std::size_t>(i) > n || seen[static_cast<std::size_t>(i) - 1])
          fail("measure-perm needs a permutation of 1.." + std::to_string(n));
        seen[static_cast<std::size_t>(i) - 1] = true;
        brs.push_back(l.branches[static_cast<std::size_t>(i) - 1]);
      }
      match(mk::measure(std::move(brs)), R);
      auto parts = measure_split(l, l);
      return {J::leq(parts[0], mk::one(), mk::ovee_n(branch_effects(l)))};
    }
    if (r == "measure-0") {
      const Term& l = shape(L, TK::Measure, "a measure");
      if (l.branches.size() < 2) fail("schema mismatch: measure-0 needs a measurement with at least two branches");
      match(mk::zero(), l.branches.back().effect);
      std::vector<MeasureBranch> brs(l.branches.begin(), l.branches.end() - 1);
      match(mk::measure(brs), R);
      auto parts = measure_split(l, l);
      std::vector<EffectPtr> phis;
      for (const auto& b : brs) phis.push_back(b.effect);
      return {J::leq(parts[0], mk::one(), mk::ovee_n(phis))};
    }
    if (r == "measure-1") {
      const Term& l = shape(L, TK::Measure, "measure { 1 -> M }");
      if (l.branches.size() != 1) fail("schema mismatch: measure-1 needs a single branch");
      match(mk::one(), l.branches[0].effect);
      match(l.branches[0].term, R);
      return {};
    }
    if (r == "measure-plus") {
      const Term& l = shape(L, TK::Measure, "a measure");
      const Effect& o = shape(l.branches.at(0).effect, EK::Ovee, "phi o+ psi");
      std::vector<MeasureBranch> brs{{o.a, l.branches[0].term}, {o.b, l.branches[0].term}};
      brs.insert(brs.end(), l.branches.begin() + 1, l.branches.end());
      match(mk::measure(brs), R);
      auto parts = measure_split(l, l);
      std::vector<EffectPtr> phis;
      for (const auto& b : brs) phis.push_back(b.effect);
      return {J::leq(parts[0], mk::one(), mk::ovee_n(phis))};
    }
    if (r == "measure-case") {
      const Term& l = shape(L, TK::Measure, "measure { caseE M of ... -> N | ... }");
      const Effect& first = shape(l.branches.at(0).effect, EK::Case, "caseE M of ...");
      std::string x = first.x, y = first.y;
      NameSet ns = free_of(branch_terms(l));
      require(!ns.count(x) && !ns.count(y), "the branch terms must not mention " + x + " or " + y);
      std::vector<MeasureBranch> lb, rb;
      std::vector<EffectPtr> phis, psis;
      for (const auto& br : l.branches) {
        const Effect& c = shape(br.effect, EK::Case, "caseE M of ...");
        match(first.term, c.term);
        EffectPtr phi = c.a, psi = c.b;
        if (c.x != x) {
          require(!free_vars(c.a).count(x) || c.x == x, "binder clash on " + x);
          phi = substitute(c.a, Substitution{{c.x, mk::var(x)}});
        }
        if (c.y != y) {
          require(!free_vars(c.b).count(y), "binder clash on " + y);
          psi = substitute(c.b, Substitution{{c.y, mk::var(y)}});
        }
        phis.push_back(phi);
        psis.push_back(psi);
        lb.push_back({phi, br.term});
        rb.push_back({psi, br.term});
      }
      match(mk::case_of(first.term, x, mk::measure(lb), y, mk::measure(rb)), R);
      NameSet effs;
      for (const auto& e : phis) collect_free(e, effs);
      for (const auto& e : psis) collect_free(e, effs);
      effs.erase(x);
      effs.erase(y);
      auto parts = split(G, {effs, free_vars(first.term), ns});
      TypePtr ab = type_in(parts[1], first.term);
      type_shape(ab, YK::Sum, "A + B");
      return {J::leq(extend(parts[0], x, ab->left), mk::one(), mk::ovee_n(phis)),
              J::leq(extend(parts[0], y, ab->right), mk::one(), mk::ovee_n(psis))};
    }
    if (r == "qbit-cz-x" || r == "qbit-cz-z") {
      bool xrule = r == "qbit-cz-x";
      const Term& l = shape(L, TK::CZ, "E M N");
      const Term& m = shape(l.a, xrule ? TK::PauliX : TK::PauliZ, xrule ? "X M" : "Z M");
      std::string x = is(R, TK::LetPair) ? R->x : "x", y = is(R, TK::LetPair) ? R->y : "y";
      require(x != y, "the binders differ");
      TermPtr body = xrule ? mk::pair(mk::pauli_x(mk::var(x)), mk::pauli_z(mk::var(y)))
                           : mk::pair(mk::pauli_z(mk::var(x)), mk::var(y));
      match(mk::let_pair(x, y, mk::cz(m.a, l.b), body), R);
      return {};
    }
    if (r == "qbit-xx" || r == "qbit-zz") {
      TK k = r == "qbit-xx" ? TK::PauliX : TK::PauliZ;
      const Term& o = shape(L, k, r == "qbit-xx" ? "X (X M)" : "Z (Z M)");
      const Term& i = shape(o.a, k, r == "qbit-xx" ? "X M" : "Z M");
      match(i.a, R);
      return {};
    }
    wrong_kind(r, "a term equality");
  }

  /// Accepts Gamma |- a <= b or Gamma |- b <= a.
  static void either(const Judgement& g, const EffectPtr& a, const EffectPtr& b) {
    using detail::same;
    if ((same(g.elhs, a) && same(g.erhs, b)) || (same(g.elhs, b) && same(g.erhs, a))) return;
    const EffectPtr& other = same(g.elhs, a) ? g.erhs : same(g.erhs, a) ? g.elhs : nullptr;
    if (other) {
      auto [e, f] = detail::first_difference(b, other);
      detail::fail("schema mismatch: expected " + e + ", found " + f);
    }
    detail::fail("schema mismatch: expected " + print(a) + " == " + print(b) + ", found " + print(g.elhs) +
                 " <= " + print(g.erhs));
  }

  /// The side of an equivalence goal for which `pick` succeeds, left first.
  template <class F>
  static void on_either_side(const Judgement& g, F pick) {
    try {
      pick(g.elhs);
      return;
    } catch (const detail::RuleFailure& first) {
      try {
        pick(g.erhs);
      } catch (const detail::RuleFailure&) {
        throw first;
      }
    }
  }

  std::pair<Context, TypePtr> scrutinee(const Context& G, const TermPtr& m) {
    TypePtr ab = type_in(restrict_to(G, free_vars(m)), m);
    detail::type_shape(ab, YK::Sum, "A + B");
    return {without(G, free_vars(m)), ab};
  }

  std::vector<Judgement> leq_rule(const Script& s, const Judgement& g) {
    using namespace detail;
    const std::string& r = s.rule;
    const Context& G = g.ctx;
    const EffectPtr& L = g.elhs;
    const EffectPtr& R = g.erhs;

    if (r == "leq-ref") {
      if (same(L, R)) return {};
      auto lv = literal_value(L), rv = literal_value(R);
      if (lv && rv) {
        require(*lv <= *rv, print(L) + " evaluates above " + print(R));
        return {};
      }
      match(L, R);
      return {};
    }
    if (r == "leq-trans") {
      if (!s.args.effect) fail("leq-trans needs the middle effect as an explicit argument");
      // Middles built from the goal's own subterms are defined whenever the
      // goal is, so only their annotations are needed.
      const EffectPtr& a = s.args.effect;
      bool derived = same(a, mk::bot(mk::bot(L))) || known_formed(a, g);
      EffectPtr m = elab_effect(G, a, derived);
      return {J::leq(G, L, m), J::leq(G, m, R)};
    }
    if (r == "zero-leq") {
      match(mk::zero(), L);
      return {};
    }
    if (r == "bot-antitone") {
      const Effect& l = shape(L, EK::Bot, "bot(psi)");
      const Effect& rr = shape(R, EK::Bot, "bot(phi)");
      return {J::leq(G, rr.a, l.a)};
    }
    if (r == "bot-bot") {
      match(mk::bot(mk::bot(L)), R);
      return {};
    }
    if (r == "leq-ovee") {
      const Effect& o = shape(R, EK::Ovee, "phi o+ psi");
      match(L, o.a);
      return {J::perp(G, L, o.b)};
    }
    if (r == "ovee-mono") {
      const Effect& l = shape(L, EK::Ovee, "phi o+ chi");
      const Effect& rr = shape(R, EK::Ovee, "psi o+ chi");
      match(l.b, rr.b);
      return {J::leq(G, l.a, rr.a), J::perp(G, rr.a, l.b)};
    }
    if (r == "ovee-comm") {
      const Effect& l = shape(L, EK::Ovee, "phi o+ psi");
      match(mk::ovee(l.b, l.a), R);
      return {J::perp(G, l.a, l.b)};
    }
    if (r == "perp-rotate") {
      const Effect& l = shape(L, EK::Ovee, "psi o+ chi");
      const Effect& rr = shape(R, EK::Bot, "bot(phi)");
      return {J::perp(G, mk::ovee(rr.a, l.a), l.b)};
    }
    if (r == "ovee-assoc") {
      const Effect& l = shape(L, EK::Ovee, "phi o+ (psi o+ chi)");
      const Effect& in = shape(l.b, EK::Ovee, "psi o+ chi");
      match(mk::ovee(mk::ovee(l.a, in.a), in.b), R);
      return {J::perp(G, mk::ovee(l.a, in.a), in.b)};
    }
    if (r == "ovee-0") {
      const Effect& l = shape(L, EK::Ovee, "phi o+ 0");
      match(mk::zero(), l.b);
      match(l.a, R);
      return {};
    }
    if (r == "ortho-1") {
      const Effect& l = shape(L, EK::Bot, "bot(psi)");
      return {J::leq(G, mk::one(), mk::ovee(R, l.a))};
    }
    if (r == "ortho-2") {
      match(mk::one(), L);
      const Effect& o = shape(R, EK::Ovee, "phi o+ bot(phi)");
      match(mk::bot(o.a), o.b);
      return {};
    }
    if (r == "dist-l") {
      if (is(R, EK::Bot)) {
        const Effect& l = shape(L, EK::Mult, "phi . chi");
        const Effect& rr = shape(shape(R, EK::Bot, "bot(psi . chi)").a, EK::Mult, "psi . chi");
        match(l.b, rr.b);
        return {J::perp({}, l.a, rr.a)};
      }
      EffectPtr phi, psi;
      on_either_side(g, [&](const EffectPtr& side) {
        const Effect& m = shape(side, EK::Mult, "(phi o+ psi) . chi");
        const Effect& o = shape(m.a, EK::Ovee, "phi o+ psi");
        either(g, side, mk::ovee(mk::mult(o.a, m.b), mk::mult(o.b, m.b)));
        phi = o.a;
        psi = o.b;
      });
      return {J::perp({}, phi, psi)};
    }
    if (r == "dist-r") {
      if (is(R, EK::Bot)) {
        const Effect& l = shape(L, EK::Mult, "phi . psi");
        const Effect& rr = shape(shape(R, EK::Bot, "bot(phi . chi)").a, EK::Mult, "phi . chi");
        match(l.a, rr.a);
        return {J::perp(G, l.b, rr.b)};
      }
      EffectPtr psi, chi;
      on_either_side(g, [&](const EffectPtr& side) {
        const Effect& m = shape(side, EK::Mult, "phi . (psi o+ chi)");
        const Effect& o = shape(m.b, EK::Ovee, "psi o+ chi");
        either(g, side, mk::ovee(mk::mult(m.a, o.a), mk::mult(m.a, o.b)));
        psi = o.a;
        chi = o.b;
      });
      return {J::perp(G, psi, chi)};
    }
    if (r == "unit-l") {
      on_either_side(g, [&](const EffectPtr& side) {
        const Effect& m = shape(side, EK::Mult, "1 . phi");
        match(mk::one(), m.a);
        either(g, side, m.b);
      });
      return {};
    }
    if (r == "unit-r") {
      on_either_side(g, [&](const EffectPtr& side) {
        const Effect& m = shape(side, EK::Mult, "phi . 1");
        match(mk::one(), m.b);
        require(closed(m.a), print(m.a) + " is closed");
        either(g, side, m.a);
      });
      return {};
    }
    if (r == "assoc") {
      on_either_side(g, [&](const EffectPtr& side) {
        const Effect& m = shape(side, EK::Mult, "phi . (psi . chi)");
        const Effect& in = shape(m.b, EK::Mult, "psi . chi");
        require(closed(m.a) && closed(in.a), "phi and psi are closed");
        either(g, side, mk::mult(mk::mult(m.a, in.a), in.b));
      });
      return {};
    }
    if (r == "comm") {
      const Effect& m = shape(L, EK::Mult, "phi . psi");
      require(closed(m.a) && closed(m.b), "phi and psi are closed");
      match(mk::mult(m.b, m.a), R);
      return {};
    }
    if (r == "case-cong") {
      const Effect& l = shape(L, EK::Case, "caseE M of ...");
      const Effect& rr = shape(R, EK::Case, "caseE N of ...");
      match(mk::case_eff(rr.term, l.x, l.a, l.y, l.b), R);
      Context d = restrict_to(G, unite(free_vars(l.term), free_vars(rr.term)));
      TypePtr ab = type_in(d, l.term);
      return {J::term_eq(d, l.term, rr.term, ab)};
    }
    if (r == "case-mono") {
      const Effect& l = shape(L, EK::Case, "caseE M of ...");
      const Effect& rr = shape(R, EK::Case, "caseE M of ...");
      match(l.term, rr.term);
      auto [x, phi, phi2] = align(l.x, l.a, rr.x, rr.a);
      auto [y, psi, psi2] = align(l.y, l.b, rr.y, rr.b);
      auto [gamma, ab] = scrutinee(G, l.term);
      return {J::leq(extend(gamma, x, ab->left), phi, phi2), J::leq(extend(gamma, y, ab->right), psi, psi2)};
    }
    if (r == "beta-plus-1-eff" || r == "beta-plus-2-eff") {
      bool left = r == "beta-plus-1-eff";
      on_either_side(g, [&](const EffectPtr& side) {
        const Effect& c = shape(side, EK::Case, "caseE inl M of ...");
        const Term& in = shape(c.term, left ? TK::Inl : TK::Inr, left ? "inl M" : "inr M");
        either(g, side, left ? substitute_effect(c.a, c.x, in.a) : substitute_effect(c.b, c.y, in.a));
      });
      return {};
    }
    if (r == "eta-plus-eff") {
      on_either_side(g, [&](const EffectPtr& side) {
        const Effect& c = shape(side, EK::Case, "caseE z of ...");
        const Term& z = shape(c.term, TK::Var, "a variable");
        const Binding* b = lookup(G, z.name);
        require(b && b->type->kind == YK::Sum, "'" + z.name + "' has a sum type in " + print(G));
        const EffectPtr& phi = same(side, g.elhs) ? g.erhs : g.elhs;
        NameSet f = minus(free_vars(phi), {z.name});
        require(!f.count(c.x) && !f.count(c.y), "the binders are fresh for " + print(phi));
        either(g, phi,
               mk::case_eff(c.term, c.x, substitute_effect(phi, z.name, mk::inl(mk::var(c.x))), c.y,
                            substitute_effect(phi, z.name, mk::inr(mk::var(c.y)))));
      });
      return {};
    }
    if (r == "case-ovee") {
      std::vector<Judgement> out;
      on_either_side(g, [&](const EffectPtr& side) {
        const Effect& c = shape(side, EK::Case, "caseE M of inl x -> phi o+ phi' | ...");
        const Effect& l = shape(c.a, EK::Ovee, "phi o+ phi'");
        const Effect& rr = shape(c.b, EK::Ovee, "psi o+ psi'");
        either(g, side,
               mk::ovee(mk::case_eff(c.term, c.x, l.a, c.y, rr.a), mk::case_eff(c.term, c.x, l.b, c.y, rr.b)));
        auto [gamma, ab] = scrutinee(G, c.term);
        out = {J::perp(extend(gamma, c.x, ab->left), l.a, l.b), J::perp(extend(gamma, c.y, ab->right), rr.a, rr.b)};
      });
      return out;
    }
    if (r == "case-bot") {
      on_either_side(g, [&](const EffectPtr& side) {
        const Effect& c = shape(shape(side, EK::Bot, "bot(caseE ...)").a, EK::Case, "caseE M of ...");
        either(g, side, mk::case_eff(c.term, c.x, mk::bot(c.a), c.y, mk::bot(c.b)));
      });
      return {};
    }
    if (r == "case-leq") {
      const Effect& c = shape(L, EK::Case, "caseE M of ...");
      NameSet chi = free_vars(R);
      std::string x = c.x, y = c.y;
      EffectPtr phi = c.a, psi = c.b;
      if (chi.count(x)) {
        x = fresh_name(x, unite(chi, free_vars(phi)));
        phi = rename(phi, c.x, x);
      }
      if (chi.count(y)) {
        y = fresh_name(y, unite(chi, free_vars(psi)));
        psi = rename(psi, c.y, y);
      }
      auto [delta, ab] = scrutinee(G, c.term);
      return {J::leq(extend(delta, x, ab->left), phi, R), J::leq(extend(delta, y, ab->right), psi, R)};
    }
    if (r == "case-times") {
      on_either_side(g, [&](const EffectPtr& side) {
        const Effect& m = shape(side, EK::Mult, "chi . caseE M of ...");
        const Effect& c = shape(m.b, EK::Case, "caseE M of ...");
        require(closed(m.a), print(m.a) + " is closed");
        either(g, side, mk::case_eff(c.term, c.x, mk::mult(m.a, c.a), c.y, mk::mult(m.a, c.b)));
      });
      return {};
    }
    if (r == "qbit-x-proj" || r == "qbit-z-proj") {
      bool xrule = r == "qbit-x-proj";
      on_either_side(g, [&](const EffectPtr& side) {
        const Effect& p = shape(side, EK::ProjPlus, "(P M = |+a>)");
        const Term& m = shape(p.term, xrule ? TK::PauliX : TK::PauliZ, xrule ? "X M" : "Z M");
        either(g, side, mk::proj_plus(m.a, xrule ? p.angle.negated() : p.angle.shifted(Rational(-1))));
      });
      return {};
    }
    if (r == "qbit-xz-zx") {
      on_either_side(g, [&](const EffectPtr& side) {
        const Effect& p = shape(side, EK::ProjPlus, "(X (Z M) = |+a>)");
        const Term& x = shape(p.term, TK::PauliX, "X (Z M)");
        const Term& z = shape(x.a, TK::PauliZ, "Z M");
        either(g, side, mk::proj_plus(mk::pauli_z(mk::pauli_x(z.a)), p.angle));
      });
      return {};
    }
    if (r == "beta-iso") {
      if (!s.args.var || !s.args.effect || !s.args.term)
        fail("beta-iso needs the arguments var, effect and term (the measurement)");
      TermPtr meas = elab_term(G, s.args.term, nullptr);
      const Term& m = shape(meas, TK::Measure, "measure { phi -> M | bot(phi) -> N }");
      if (m.branches.size() != 2) fail("schema mismatch: beta-iso needs a two-branch measurement");
      EffectPtr phi = m.branches[0].effect;
      require(closed(phi), print(phi) + " is closed");
      match(mk::bot(phi), m.branches[1].effect);
      TypePtr a = type_of(G, meas);
      const std::string& x = *s.args.var;
      EffectPtr psi = elab_effect(extend(without(G, free_vars(meas)), x, a), s.args.effect);
      either(g, substitute_effect(psi, x, meas),
             mk::ovee(mk::mult(phi, substitute_effect(psi, x, m.branches[0].term)),
                      mk::mult(mk::bot(phi), substitute_effect(psi, x, m.branches[1].term))));
      return {};
    }
    wrong_kind(r, "an effect inequality");
  }

  static constexpr int kMaxNesting = 3;
  static constexpr const char* kCircular = "circular formation check";

  DerivationConfig cfg_;
  int nesting_ = 0;
  int cutoffs_ = 0;  // searches cut short by nesting or cycles
  std::map<std::string, std::string> typed_;  // judgement -> error ("" when derivable)
  std::map<std::string, int> failed_;         // goal -> depth that failed
  std::map<std::string, Script> found_;
};

/// Parses a comma-separated pack list such as "core,qubit,beta-iso".
inline DerivationConfig config_from_packs(const std::vector<std::string>& packs, int auto_depth = 6) {
  DerivationConfig cfg;
  cfg.qubit = false;
  cfg.beta_iso = false;
  cfg.auto_depth = auto_depth;
  for (const auto& p : packs) {
    if (p == "qubit")
      cfg.qubit = true;
    else if (p == "beta-iso")
      cfg.beta_iso = true;
    else if (p != "core")
      throw std::invalid_argument("unknown rule pack '" + p + "'");
  }
  return cfg;
}

}  // namespace qpel
