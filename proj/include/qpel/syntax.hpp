#pragma once
// Abstract syntax: types, terms, effects, contexts and judgements.
//
// All nodes are immutable and shared through shared_ptr<const T>. Binders are
// named; alpha-equivalence, free variables and capture-avoiding substitution
// live here too.

#include "qpel/rational.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace qpel {

// ---------------------------------------------------------------------------
// Types

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct Type {
  enum class Kind { Unit, Tensor, Sum, Qbit, Meta };
  Kind kind = Kind::Unit;
  TypePtr left, right;
  int meta = -1;  // only for Kind::Meta (inference placeholders)
};

inline TypePtr unit_type() {
  static const TypePtr t = std::make_shared<const Type>(Type{Type::Kind::Unit, nullptr, nullptr, -1});
  return t;
}
inline TypePtr qbit_type() {
  static const TypePtr t = std::make_shared<const Type>(Type{Type::Kind::Qbit, nullptr, nullptr, -1});
  return t;
}
inline TypePtr tensor_type(TypePtr a, TypePtr b) {
  return std::make_shared<const Type>(Type{Type::Kind::Tensor, std::move(a), std::move(b), -1});
}
inline TypePtr sum_type(TypePtr a, TypePtr b) {
  return std::make_shared<const Type>(Type{Type::Kind::Sum, std::move(a), std::move(b), -1});
}
inline TypePtr meta_type(int id) {
  return std::make_shared<const Type>(Type{Type::Kind::Meta, nullptr, nullptr, id});
}

inline bool type_equal(const TypePtr& a, const TypePtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Type::Kind::Unit:
    case Type::Kind::Qbit:
      return true;
    case Type::Kind::Meta:
      return a->meta == b->meta;
    default:
      return type_equal(a->left, b->left) && type_equal(a->right, b->right);
  }
}

inline bool type_mentions_qbit(const TypePtr& t) {
  if (!t) return false;
  if (t->kind == Type::Kind::Qbit) return true;
  return type_mentions_qbit(t->left) || type_mentions_qbit(t->right);
}

// ---------------------------------------------------------------------------
// Terms and effects

struct Term;
struct Effect;
using TermPtr = std::shared_ptr<const Term>;
using EffectPtr = std::shared_ptr<const Effect>;

struct MeasureBranch {
  EffectPtr effect;
  TermPtr term;
};

struct Term {
  enum class Kind { Var, Pair, LetPair, Unit, Inl, Inr, Case, Measure, NewPlus, PauliX, PauliZ, CZ };
  Kind kind = Kind::Unit;
  std::string name;  // Var
  std::string x, y;  // LetPair: let x * y = a in b; Case: x binds in b, y binds in c
  TermPtr a, b, c;
  std::vector<MeasureBranch> branches;
  // Filled by elaboration for Inl/Inr: the full sum type. Ignored by
  // alpha-equivalence and printing.
  TypePtr ann;
};

struct Effect {
  enum class Kind { Zero, Ovee, Bot, Mult, Case, ProjPlus, Scalar };
  Kind kind = Kind::Zero;
  EffectPtr a, b;
  TermPtr term;      // Case scrutinee, ProjPlus subject
  std::string x, y;  // Case binders: x in a, y in b
  Angle angle;       // ProjPlus
  Rational value;    // Scalar literal in [0, 1]
};

namespace mk {

inline TermPtr var(std::string name) {
  Term t;
  t.kind = Term::Kind::Var;
  t.name = std::move(name);
  return std::make_shared<const Term>(std::move(t));
}
inline TermPtr pair(TermPtr a, TermPtr b) {
  Term t;
  t.kind = Term::Kind::Pair;
  t.a = std::move(a);
  t.b = std::move(b);
  return std::make_shared<const Term>(std::move(t));
}
inline TermPtr let_pair(std::string x, std::string y, TermPtr bound, TermPtr body) {
  Term t;
  t.kind = Term::Kind::LetPair;
  t.x = std::move(x);
  t.y = std::move(y);
  t.a = std::move(bound);
  t.b = std::move(body);
  return std::make_shared<const Term>(std::move(t));
}
inline TermPtr unit() {
  static const TermPtr u = [] {
    Term t;
    t.kind = Term::Kind::Unit;
    return std::make_shared<const Term>(std::move(t));
  }();
  return u;
}
inline TermPtr inl(TermPtr m, TypePtr ann = nullptr) {
  Term t;
  t.kind = Term::Kind::Inl;
  t.a = std::move(m);
  t.ann = std::move(ann);
  return std::make_shared<const Term>(std::move(t));
}
inline TermPtr inr(TermPtr m, TypePtr ann = nullptr) {
  Term t;
  t.kind = Term::Kind::Inr;
  t.a = std::move(m);
  t.ann = std::move(ann);
  return std::make_shared<const Term>(std::move(t));
}
inline TermPtr case_of(TermPtr m, std::string x, TermPtr n, std::string y, TermPtr p) {
  Term t;
  t.kind = Term::Kind::Case;
  t.a = std::move(m);
  t.x = std::move(x);
  t.b = std::move(n);
  t.y = std::move(y);
  t.c = std::move(p);
  return std::make_shared<const Term>(std::move(t));
}
inline TermPtr measure(std::vector<MeasureBranch> branches) {
  Term t;
  t.kind = Term::Kind::Measure;
  t.branches = std::move(branches);
  return std::make_shared<const Term>(std::move(t));
}
inline TermPtr new_plus() {
  static const TermPtr p = [] {
    Term t;
    t.kind = Term::Kind::NewPlus;
    return std::make_shared<const Term>(std::move(t));
  }();
  return p;
}
inline TermPtr pauli_x(TermPtr m) {
  Term t;
  t.kind = Term::Kind::PauliX;
  t.a = std::move(m);
  return std::make_shared<const Term>(std::move(t));
}
inline TermPtr pauli_z(TermPtr m) {
  Term t;
  t.kind = Term::Kind::PauliZ;
  t.a = std::move(m);
  return std::make_shared<const Term>(std::move(t));
}
inline TermPtr cz(TermPtr m, TermPtr n) {
  Term t;
  t.kind = Term::Kind::CZ;
  t.a = std::move(m);
  t.b = std::move(n);
  return std::make_shared<const Term>(std::move(t));
}

inline EffectPtr zero() {
  static const EffectPtr z = std::make_shared<const Effect>();
  return z;
}
inline EffectPtr ovee(EffectPtr a, EffectPtr b) {
  Effect e;
  e.kind = Effect::Kind::Ovee;
  e.a = std::move(a);
  e.b = std::move(b);
  return std::make_shared<const Effect>(std::move(e));
}
inline EffectPtr bot(EffectPtr a) {
  Effect e;
  e.kind = Effect::Kind::Bot;
  e.a = std::move(a);
  return std::make_shared<const Effect>(std::move(e));
}
/// `1` is notation for bot(0).
inline EffectPtr one() { return bot(zero()); }
inline EffectPtr mult(EffectPtr scalar, EffectPtr a) {
  Effect e;
  e.kind = Effect::Kind::Mult;
  e.a = std::move(scalar);
  e.b = std::move(a);
  return std::make_shared<const Effect>(std::move(e));
}
inline EffectPtr case_eff(TermPtr m, std::string x, EffectPtr l, std::string y, EffectPtr r) {
  Effect e;
  e.kind = Effect::Kind::Case;
  e.term = std::move(m);
  e.x = std::move(x);
  e.a = std::move(l);
  e.y = std::move(y);
  e.b = std::move(r);
  return std::make_shared<const Effect>(std::move(e));
}
inline EffectPtr proj_plus(TermPtr m, Angle alpha) {
  Effect e;
  e.kind = Effect::Kind::ProjPlus;
  e.term = std::move(m);
  e.angle = alpha;
  return std::make_shared<const Effect>(std::move(e));
}
inline EffectPtr scalar(Rational v) {
  Effect e;
  e.kind = Effect::Kind::Scalar;
  e.value = std::move(v);
  return std::make_shared<const Effect>(std::move(e));
}

/// ((e1 o+ e2) o+ ...) o+ en, left-associated. Requires a nonempty list.
inline EffectPtr ovee_n(const std::vector<EffectPtr>& es) {
  EffectPtr acc = es.at(0);
  for (std::size_t i = 1; i < es.size(); ++i) acc = ovee(acc, es[i]);
  return acc;
}

}  // namespace mk

inline bool is_one(const EffectPtr& e) {
  return e->kind == Effect::Kind::Bot && e->a->kind == Effect::Kind::Zero;
}

// ---------------------------------------------------------------------------
// Free variables

using NameSet = std::set<std::string>;

void collect_free(const TermPtr& t, NameSet& out);
void collect_free(const EffectPtr& e, NameSet& out);

namespace detail {
inline void collect_under(const TermPtr& t, std::initializer_list<std::string> binders, NameSet& out) {
  NameSet inner;
  collect_free(t, inner);
  for (const auto& b : binders) inner.erase(b);
  out.insert(inner.begin(), inner.end());
}
inline void collect_under(const EffectPtr& e, std::initializer_list<std::string> binders, NameSet& out) {
  NameSet inner;
  collect_free(e, inner);
  for (const auto& b : binders) inner.erase(b);
  out.insert(inner.begin(), inner.end());
}
}  // namespace detail

inline void collect_free(const TermPtr& t, NameSet& out) {
  switch (t->kind) {
    case Term::Kind::Var:
      out.insert(t->name);
      break;
    case Term::Kind::Unit:
    case Term::Kind::NewPlus:
      break;
    case Term::Kind::Pair:
    case Term::Kind::CZ:
      collect_free(t->a, out);
      collect_free(t->b, out);
      break;
    case Term::Kind::Inl:
    case Term::Kind::Inr:
    case Term::Kind::PauliX:
    case Term::Kind::PauliZ:
      collect_free(t->a, out);
      break;
    case Term::Kind::LetPair:
      collect_free(t->a, out);
      detail::collect_under(t->b, {t->x, t->y}, out);
      break;
    case Term::Kind::Case:
      collect_free(t->a, out);
      detail::collect_under(t->b, {t->x}, out);
      detail::collect_under(t->c, {t->y}, out);
      break;
    case Term::Kind::Measure:
      for (const auto& br : t->branches) {
        collect_free(br.effect, out);
        collect_free(br.term, out);
      }
      break;
  }
}

inline void collect_free(const EffectPtr& e, NameSet& out) {
  switch (e->kind) {
    case Effect::Kind::Zero:
    case Effect::Kind::Scalar:
      break;
    case Effect::Kind::Bot:
      collect_free(e->a, out);
      break;
    case Effect::Kind::Ovee:
    case Effect::Kind::Mult:
      collect_free(e->a, out);
      collect_free(e->b, out);
      break;
    case Effect::Kind::Case:
      collect_free(e->term, out);
      detail::collect_under(e->a, {e->x}, out);
      detail::collect_under(e->b, {e->y}, out);
      break;
    case Effect::Kind::ProjPlus:
      collect_free(e->term, out);
      break;
  }
}

inline NameSet free_vars(const TermPtr& t) {
  NameSet s;
  collect_free(t, s);
  return s;
}
inline NameSet free_vars(const EffectPtr& e) {
  NameSet s;
  collect_free(e, s);
  return s;
}

/// Every name occurring in the syntax, bound or free.
void collect_names(const TermPtr& t, NameSet& out);
void collect_names(const EffectPtr& e, NameSet& out);

inline void collect_names(const TermPtr& t, NameSet& out) {
  if (t->kind == Term::Kind::Var) out.insert(t->name);
  if (t->kind == Term::Kind::LetPair || t->kind == Term::Kind::Case) {
    out.insert(t->x);
    out.insert(t->y);
  }
  for (const auto* child : {&t->a, &t->b, &t->c})
    if (*child) collect_names(*child, out);
  for (const auto& br : t->branches) {
    collect_names(br.effect, out);
    collect_names(br.term, out);
  }
}

inline void collect_names(const EffectPtr& e, NameSet& out) {
  if (e->kind == Effect::Kind::Case) {
    out.insert(e->x);
    out.insert(e->y);
  }
  if (e->a) collect_names(e->a, out);
  if (e->b) collect_names(e->b, out);
  if (e->term) collect_names(e->term, out);
}

/// `base` decorated with primes until it avoids `avoid`.
inline std::string fresh_name(const std::string& base, const NameSet& avoid) {
  std::string candidate = base + "'";
  while (avoid.count(candidate)) candidate += "'";
  return candidate;
}

// ---------------------------------------------------------------------------
// Capture-avoiding simultaneous substitution

using Substitution = std::map<std::string, TermPtr>;

TermPtr substitute(const TermPtr& t, const Substitution& s);
EffectPtr substitute(const EffectPtr& e, const Substitution& s);

namespace detail {

/// Names free in the range of `s`, restricted to the keys that matter for `body_free`.
inline NameSet range_free(const Substitution& s, const NameSet& body_free) {
  NameSet out;
  for (const auto& [k, v] : s)
    if (body_free.count(k)) collect_free(v, out);
  return out;
}

/// Prepares substitution under binders: drops shadowed keys and renames
/// binders that would capture. Returns the adjusted substitution; updates
/// binder names in place.
template <class Body>
Substitution enter_binders(const Substitution& s, std::vector<std::string*> binders,
                           const std::vector<const Body*>& bodies) {
  Substitution inner = s;
  for (auto* b : binders) inner.erase(*b);
  if (inner.empty()) return inner;
  NameSet body_free;
  for (const auto* body : bodies) collect_free(*body, body_free);
  NameSet danger = range_free(inner, body_free);
  NameSet avoid = danger;
  avoid.insert(body_free.begin(), body_free.end());
  for (const auto& [k, v] : inner) {
    avoid.insert(k);
    collect_names(v, avoid);
  }
  for (auto* b : binders) avoid.insert(*b);
  for (auto* b : binders) {
    if (danger.count(*b)) {
      std::string renamed = fresh_name(*b, avoid);
      avoid.insert(renamed);
      inner[*b] = mk::var(renamed);
      *b = renamed;
    }
  }
  return inner;
}

}  // namespace detail

inline TermPtr substitute(const TermPtr& t, const Substitution& s) {
  if (s.empty()) return t;
  switch (t->kind) {
    case Term::Kind::Var: {
      auto it = s.find(t->name);
      return it == s.end() ? t : it->second;
    }
    case Term::Kind::Unit:
    case Term::Kind::NewPlus:
      return t;
    case Term::Kind::Pair:
      return mk::pair(substitute(t->a, s), substitute(t->b, s));
    case Term::Kind::CZ:
      return mk::cz(substitute(t->a, s), substitute(t->b, s));
    case Term::Kind::Inl:
      return mk::inl(substitute(t->a, s), t->ann);
    case Term::Kind::Inr:
      return mk::inr(substitute(t->a, s), t->ann);
    case Term::Kind::PauliX:
      return mk::pauli_x(substitute(t->a, s));
    case Term::Kind::PauliZ:
      return mk::pauli_z(substitute(t->a, s));
    case Term::Kind::LetPair: {
      std::string x = t->x, y = t->y;
      // Separate renaming for x and y: both bind in the same body.
      auto inner = detail::enter_binders<TermPtr>(s, {&x, &y}, {&t->b});
      return mk::let_pair(x, y, substitute(t->a, s), substitute(t->b, inner));
    }
    case Term::Kind::Case: {
      std::string x = t->x, y = t->y;
      auto left = detail::enter_binders<TermPtr>(s, {&x}, {&t->b});
      auto right = detail::enter_binders<TermPtr>(s, {&y}, {&t->c});
      return mk::case_of(substitute(t->a, s), x, substitute(t->b, left), y, substitute(t->c, right));
    }
    case Term::Kind::Measure: {
      std::vector<MeasureBranch> bs;
      bs.reserve(t->branches.size());
      for (const auto& br : t->branches) bs.push_back({substitute(br.effect, s), substitute(br.term, s)});
      return mk::measure(std::move(bs));
    }
  }
  return t;
}

inline EffectPtr substitute(const EffectPtr& e, const Substitution& s) {
  if (s.empty()) return e;
  switch (e->kind) {
    case Effect::Kind::Zero:
    case Effect::Kind::Scalar:
      return e;
    case Effect::Kind::Bot:
      return mk::bot(substitute(e->a, s));
    case Effect::Kind::Ovee:
      return mk::ovee(substitute(e->a, s), substitute(e->b, s));
    case Effect::Kind::Mult:
      return mk::mult(substitute(e->a, s), substitute(e->b, s));
    case Effect::Kind::ProjPlus:
      return mk::proj_plus(substitute(e->term, s), e->angle);
    case Effect::Kind::Case: {
      std::string x = e->x, y = e->y;
      auto left = detail::enter_binders<EffectPtr>(s, {&x}, {&e->a});
      auto right = detail::enter_binders<EffectPtr>(s, {&y}, {&e->b});
      return mk::case_eff(substitute(e->term, s), x, substitute(e->a, left), y, substitute(e->b, right));
    }
  }
  return e;
}

/// [n/x]m
inline TermPtr substitute_term(const TermPtr& m, const std::string& x, const TermPtr& n) {
  return substitute(m, Substitution{{x, n}});
}
/// [n/x]phi
inline EffectPtr substitute_effect(const EffectPtr& phi, const std::string& x, const TermPtr& n) {
  return substitute(phi, Substitution{{x, n}});
}

// ---------------------------------------------------------------------------
// Alpha-equivalence

namespace detail {

struct BinderEnv {
  std::vector<std::string> left, right;

  // Index from the innermost binder, or -1 when free.
  static int lookup(const std::vector<std::string>& env, const std::string& n) {
    for (std::size_t i = env.size(); i-- > 0;)
      if (env[i] == n) return static_cast<int>(env.size() - 1 - i);
    return -1;
  }
};

bool alpha(const TermPtr& a, const TermPtr& b, BinderEnv& env);
bool alpha(const EffectPtr& a, const EffectPtr& b, BinderEnv& env);

inline bool alpha_under(const TermPtr& a, const TermPtr& b, BinderEnv& env,
                        std::initializer_list<std::pair<std::string, std::string>> binders) {
  for (const auto& [l, r] : binders) {
    env.left.push_back(l);
    env.right.push_back(r);
  }
  bool ok = alpha(a, b, env);
  for (std::size_t i = 0; i < binders.size(); ++i) {
    env.left.pop_back();
    env.right.pop_back();
  }
  return ok;
}

inline bool alpha_under(const EffectPtr& a, const EffectPtr& b, BinderEnv& env,
                        std::initializer_list<std::pair<std::string, std::string>> binders) {
  for (const auto& [l, r] : binders) {
    env.left.push_back(l);
    env.right.push_back(r);
  }
  bool ok = alpha(a, b, env);
  for (std::size_t i = 0; i < binders.size(); ++i) {
    env.left.pop_back();
    env.right.pop_back();
  }
  return ok;
}

inline bool alpha(const TermPtr& a, const TermPtr& b, BinderEnv& env) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Term::Kind::Var: {
      int la = BinderEnv::lookup(env.left, a->name);
      int lb = BinderEnv::lookup(env.right, b->name);
      if (la < 0 && lb < 0) return a->name == b->name;
      return la == lb;
    }
    case Term::Kind::Unit:
    case Term::Kind::NewPlus:
      return true;
    case Term::Kind::Pair:
    case Term::Kind::CZ:
      return alpha(a->a, b->a, env) && alpha(a->b, b->b, env);
    case Term::Kind::Inl:
    case Term::Kind::Inr:
    case Term::Kind::PauliX:
    case Term::Kind::PauliZ:
      return alpha(a->a, b->a, env);
    case Term::Kind::LetPair:
      return alpha(a->a, b->a, env) && alpha_under(a->b, b->b, env, {{a->x, b->x}, {a->y, b->y}});
    case Term::Kind::Case:
      return alpha(a->a, b->a, env) && alpha_under(a->b, b->b, env, {{a->x, b->x}}) &&
             alpha_under(a->c, b->c, env, {{a->y, b->y}});
    case Term::Kind::Measure:
      if (a->branches.size() != b->branches.size()) return false;
      for (std::size_t i = 0; i < a->branches.size(); ++i) {
        if (!alpha(a->branches[i].effect, b->branches[i].effect, env)) return false;
        if (!alpha(a->branches[i].term, b->branches[i].term, env)) return false;
      }
      return true;
  }
  return false;
}

inline bool alpha(const EffectPtr& a, const EffectPtr& b, BinderEnv& env) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Effect::Kind::Zero:
      return true;
    case Effect::Kind::Scalar:
      return a->value == b->value;
    case Effect::Kind::Bot:
      return alpha(a->a, b->a, env);
    case Effect::Kind::Ovee:
    case Effect::Kind::Mult:
      return alpha(a->a, b->a, env) && alpha(a->b, b->b, env);
    case Effect::Kind::ProjPlus:
      return a->angle == b->angle && alpha(a->term, b->term, env);
    case Effect::Kind::Case:
      return alpha(a->term, b->term, env) && alpha_under(a->a, b->a, env, {{a->x, b->x}}) &&
             alpha_under(a->b, b->b, env, {{a->y, b->y}});
  }
  return false;
}

}  // namespace detail

inline bool alpha_eq(const TermPtr& a, const TermPtr& b) {
  detail::BinderEnv env;
  return detail::alpha(a, b, env);
}
inline bool alpha_eq(const EffectPtr& a, const EffectPtr& b) {
  detail::BinderEnv env;
  return detail::alpha(a, b, env);
}

/// Compares two single-binder abstractions (x. a) and (y. b).
inline bool alpha_eq_abs(const std::string& x, const TermPtr& a, const std::string& y, const TermPtr& b) {
  detail::BinderEnv env;
  return detail::alpha_under(a, b, env, {{x, y}});
}
inline bool alpha_eq_abs(const std::string& x, const EffectPtr& a, const std::string& y, const EffectPtr& b) {
  detail::BinderEnv env;
  return detail::alpha_under(a, b, env, {{x, y}});
}

// ---------------------------------------------------------------------------
// Local definitions via the tensor unit

/// `let x = m in n` encoded as `let x * y = m * unit in n` with y fresh for n.
inline TermPtr desugar_let(const std::string& x, const TermPtr& m, const TermPtr& n) {
  NameSet avoid;
  collect_names(n, avoid);
  collect_names(m, avoid);
  avoid.insert(x);
  std::string y = avoid.count("u") ? fresh_name("u", avoid) : "u";
  return mk::let_pair(x, y, mk::pair(m, mk::unit()), n);
}

// ---------------------------------------------------------------------------
// Contexts and judgements

struct Binding {
  std::string name;
  TypePtr type;
};
using Context = std::vector<Binding>;

/// Innermost binding of `name`, or nullptr.
inline const Binding* lookup(const Context& ctx, const std::string& name) {
  for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
    if (it->name == name) return &*it;
  return nullptr;
}

inline bool has_distinct_names(const Context& ctx) {
  NameSet seen;
  for (const auto& b : ctx)
    if (!seen.insert(b.name).second) return false;
  return true;
}

/// Appends a binding, dropping any outer binding it shadows.
inline Context extend(Context ctx, const std::string& name, TypePtr type) {
  std::erase_if(ctx, [&](const Binding& b) { return b.name == name; });
  ctx.push_back({name, std::move(type)});
  return ctx;
}

inline Context restrict_to(const Context& ctx, const NameSet& names) {
  Context out;
  for (const auto& b : ctx)
    if (names.count(b.name)) out.push_back(b);
  return out;
}

inline Context without(const Context& ctx, const NameSet& names) {
  Context out;
  for (const auto& b : ctx)
    if (!names.count(b.name)) out.push_back(b);
  return out;
}

/// Same bindings up to order.
inline bool context_equiv(const Context& a, const Context& b) {
  if (a.size() != b.size()) return false;
  for (const auto& bind : a) {
    const Binding* other = lookup(b, bind.name);
    if (!other || !type_equal(other->type, bind.type)) return false;
  }
  return true;
}

struct Judgement {
  enum class Kind { Typing, TermEq, EffFormation, EffLeq, EffEquiv };
  Kind kind = Kind::Typing;
  Context ctx;
  TermPtr lhs, rhs;
  TypePtr type;
  EffectPtr elhs, erhs;

  static Judgement typing(Context c, TermPtr m, TypePtr a) {
    Judgement j;
    j.kind = Kind::Typing;
    j.ctx = std::move(c);
    j.lhs = std::move(m);
    j.type = std::move(a);
    return j;
  }
  static Judgement term_eq(Context c, TermPtr m, TermPtr n, TypePtr a) {
    Judgement j;
    j.kind = Kind::TermEq;
    j.ctx = std::move(c);
    j.lhs = std::move(m);
    j.rhs = std::move(n);
    j.type = std::move(a);
    return j;
  }
  static Judgement eff(Context c, EffectPtr phi) {
    Judgement j;
    j.kind = Kind::EffFormation;
    j.ctx = std::move(c);
    j.elhs = std::move(phi);
    return j;
  }
  static Judgement leq(Context c, EffectPtr phi, EffectPtr psi) {
    Judgement j;
    j.kind = Kind::EffLeq;
    j.ctx = std::move(c);
    j.elhs = std::move(phi);
    j.erhs = std::move(psi);
    return j;
  }
  /// phi _|_ psi is phi <= bot(psi).
  static Judgement perp(Context c, EffectPtr phi, const EffectPtr& psi) {
    return leq(std::move(c), std::move(phi), mk::bot(psi));
  }
  static Judgement equiv(Context c, EffectPtr phi, EffectPtr psi) {
    Judgement j = leq(std::move(c), std::move(phi), std::move(psi));
    j.kind = Kind::EffEquiv;
    return j;
  }
};

/// Expands the derived notation into core judgements: an equivalence becomes
/// its two inequalities, everything else is already core.
inline std::vector<Judgement> expand_notation(const Judgement& j) {
  if (j.kind != Judgement::Kind::EffEquiv) return {j};
  return {Judgement::leq(j.ctx, j.elhs, j.erhs), Judgement::leq(j.ctx, j.erhs, j.elhs)};
}

/// Alpha-equivalence of judgements (contexts compared up to order).
inline bool judgement_eq(const Judgement& a, const Judgement& b) {
  if (a.kind != b.kind || !context_equiv(a.ctx, b.ctx)) return false;
  switch (a.kind) {
    case Judgement::Kind::Typing:
      return alpha_eq(a.lhs, b.lhs) && type_equal(a.type, b.type);
    case Judgement::Kind::TermEq:
      return alpha_eq(a.lhs, b.lhs) && alpha_eq(a.rhs, b.rhs) && type_equal(a.type, b.type);
    case Judgement::Kind::EffFormation:
      return alpha_eq(a.elhs, b.elhs);
    default:
      return alpha_eq(a.elhs, b.elhs) && alpha_eq(a.erhs, b.erhs);
  }
}

inline bool term_mentions_qubits(const TermPtr& t);
inline bool effect_mentions_qubits(const EffectPtr& e);

inline bool term_mentions_qubits(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::NewPlus:
    case Term::Kind::PauliX:
    case Term::Kind::PauliZ:
    case Term::Kind::CZ:
      return true;
    default:
      break;
  }
  for (const auto* child : {&t->a, &t->b, &t->c})
    if (*child && term_mentions_qubits(*child)) return true;
  for (const auto& br : t->branches)
    if (effect_mentions_qubits(br.effect) || term_mentions_qubits(br.term)) return true;
  return false;
}

inline bool effect_mentions_qubits(const EffectPtr& e) {
  if (e->kind == Effect::Kind::ProjPlus) return true;
  if (e->a && effect_mentions_qubits(e->a)) return true;
  if (e->b && effect_mentions_qubits(e->b)) return true;
  return e->term && term_mentions_qubits(e->term);
}

}  // namespace qpel
