#pragma once
// Interpretation of types, contexts, terms and effects in a triangle backend.
//
// A context x1:A1, ..., xn:An denotes A1 (x) ... (x) An. A term denotes a
// morphism from its context; an effect denotes a predicate on its context.
// Variables a subterm does not use are discarded with the terminal map.

#include "qpel/printer.hpp"
#include "qpel/syntax.hpp"
#include "qpel/triangle.hpp"
#include "qpel/typecheck.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace qpel {

/// A denotation that does not exist although the syntax is well formed, e.g.
/// an effect sum that is undefined in the backend.
class SemanticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <TriangleBackend B>
struct TermDenotation {
  std::string backend;
  Context ctx;
  TypePtr type;
  typename B::Mor mor;
};

template <TriangleBackend B>
struct EffectDenotation {
  std::string backend;
  Context ctx;
  typename B::Pred pred;
};

template <TriangleBackend B>
class Interpreter {
 public:
  using Obj = typename B::Obj;
  using Mor = typename B::Mor;
  using Pred = typename B::Pred;

  explicit Interpreter(const B& backend) : b_(backend) {}

  Obj object(const TypePtr& t) const {
    switch (t->kind) {
      case Type::Kind::Tensor:
        return b_.tensor(object(t->left), object(t->right));
      case Type::Kind::Sum:
        return b_.coproduct(object(t->left), object(t->right));
      case Type::Kind::Qbit:
        return b_.qbit();
      default:
        return b_.unit_obj();
    }
  }

  Obj object(const Context& ctx) const {
    Obj o = b_.unit_obj();
    for (const auto& bind : ctx) o = b_.tensor(o, object(bind.type));
    return o;
  }

  /// The denotation of an elaborated term (inl/inr annotated) and its type.
  std::pair<Mor, TypePtr> term(const Context& ctx, const TermPtr& t) {
    using K = Term::Kind;
    switch (t->kind) {
      case K::Var: {
        auto s = split(ctx, {{t->name}});
        if (s.parts[0].empty()) throw std::invalid_argument("unbound variable '" + t->name + "'");
        return {s.mor, s.parts[0][0].type};
      }
      case K::Unit:
        return {b_.terminal(object(ctx)), unit_type()};
      case K::NewPlus:
        return {b_.compose(b_.new_plus(), b_.terminal(object(ctx))), qbit_type()};
      case K::Pair:
      case K::CZ: {
        auto s = split(ctx, {free_vars(t->a), free_vars(t->b)});
        auto [f, a] = term(s.parts[0], t->a);
        auto [g, c] = term(s.parts[1], t->b);
        Mor h = b_.compose(b_.tensor_mor(f, g), s.mor);
        if (t->kind == K::CZ) return {b_.compose(b_.cz(), h), tensor_type(qbit_type(), qbit_type())};
        return {h, tensor_type(a, c)};
      }
      case K::LetPair: {
        NameSet body = free_vars(t->b);
        body.erase(t->x);
        body.erase(t->y);
        auto s = split(ctx, {free_vars(t->a), body});
        auto [f, ab] = term(s.parts[0], t->a);
        Obj rest = object(s.parts[1]);
        Mor into = b_.compose(b_.symmetry(b_.cod(f), rest), b_.compose(b_.tensor_mor(f, b_.identity(rest)), s.mor));
        Context inner = bind(bind(s.parts[1], t->x, ab->left), t->y, ab->right);
        auto [g, c] = term(inner, t->b);
        return {b_.compose(g, into), c};
      }
      case K::Inl:
      case K::Inr: {
        auto [f, a] = term(ctx, t->a);
        TypePtr sum = t->ann;
        if (!sum) throw std::invalid_argument("injection without its sum type; elaborate the term first");
        Obj l = object(sum->left), r = object(sum->right);
        return {b_.compose(t->kind == K::Inl ? b_.inl(l, r) : b_.inr(l, r), f), sum};
      }
      case K::Case: {
        auto [into, ab, rest] = scrutinise(ctx, t->a, t->x, t->b, t->y, t->c);
        auto [g, c] = term(bind(rest, t->x, ab->left), t->b);
        auto [h, c2] = term(bind(rest, t->y, ab->right), t->c);
        return {b_.compose(b_.cotuple(g, h), into), c};
      }
      case K::Measure: {
        NameSet effects, terms;
        for (const auto& br : t->branches) {
          NameSet fe = free_vars(br.effect), ft = free_vars(br.term);
          effects.insert(fe.begin(), fe.end());
          terms.insert(ft.begin(), ft.end());
        }
        auto s = split(ctx, {terms, effects});
        std::vector<Pred> preds;
        for (const auto& br : t->branches) preds.push_back(effect(s.parts[1], br.effect));
        Obj delta = object(s.parts[0]);
        std::size_t n = preds.size();
        Mor m = b_.tensor_mor(b_.identity(delta), b_.meas(object(s.parts[1]), preds));
        std::vector<Mor> legs;
        TypePtr a;
        for (const auto& br : t->branches) {
          auto [g, c] = term(s.parts[0], br.term);
          legs.push_back(g);
          a = c;
        }
        return {b_.compose(cotuple_all(b_, legs), b_.compose(distribute_n(delta, n), b_.compose(m, s.mor))), a};
      }
      case K::PauliX:
      case K::PauliZ: {
        auto [f, a] = term(ctx, t->a);
        return {b_.compose(t->kind == K::PauliX ? b_.pauli_x() : b_.pauli_z(), f), qbit_type()};
      }
    }
    throw std::invalid_argument("unknown term form");
  }

  /// The denotation of an elaborated effect.
  Pred effect(const Context& ctx, const EffectPtr& e) {
    using K = Effect::Kind;
    switch (e->kind) {
      case K::Zero:
        return b_.p_zero(object(ctx));
      case K::Scalar:
        return b_.p_const(object(ctx), e->value);
      case K::Bot:
        return b_.p_orth(effect(ctx, e->a));
      case K::Ovee: {
        auto sum = b_.p_ovee(effect(ctx, e->a), effect(ctx, e->b));
        if (!sum) throw SemanticError("the sum " + print(e) + " is undefined in the " + b_.name() + " backend");
        return *sum;
      }
      case K::Mult:
        return b_.p_scale(effect(Context{}, e->a), effect(ctx, e->b));
      case K::Case: {
        auto [into, ab, rest] = scrutinise(ctx, e->term, e->x, e->a, e->y, e->b);
        Pred p = b_.p_copair(effect(bind(rest, e->x, ab->left), e->a), effect(bind(rest, e->y, ab->right), e->b));
        return b_.apply_p(into, p);
      }
      case K::ProjPlus:
        return b_.apply_p(term(ctx, e->term).first, b_.proj_plus(e->angle));
    }
    throw std::invalid_argument("unknown effect form");
  }

  /// Gamma (x) (n . I) -> n . Gamma, by repeated distributivity.
  Mor distribute_n(const Obj& d, std::size_t n) const {
    if (n == 1) return b_.identity(d);
    Obj i = b_.unit_obj();
    Mor f = b_.distribute(d, copies(b_, i, n - 1), i);
    return b_.compose(coproduct_mor(distribute_n(d, n - 1), b_.identity(d)), f);
  }

  Mor coproduct_mor(const Mor& f, const Mor& g) const {
    Obj x = b_.cod(f), y = b_.cod(g);
    return b_.cotuple(b_.compose(b_.inl(x, y), f), b_.compose(b_.inr(x, y), g));
  }

  struct Split {
    Mor mor;
    std::vector<Context> parts;
  };

  /// Gamma -> Gamma|g1 (x) ... (x) Gamma|gk, each part in Gamma's order;
  /// bindings in no group are discarded.
  Split split(const Context& ctx, const std::vector<NameSet>& groups) const {
    std::vector<Obj> objs;
    for (const auto& bind : ctx) objs.push_back(object(bind.type));
    Split s{b_.identity(object(ctx)), std::vector<Context>(groups.size())};
    std::vector<std::size_t> order;
    std::vector<bool> used(ctx.size(), false);
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (std::size_t i = 0; i < ctx.size(); ++i)
        if (!used[i] && groups[g].count(ctx[i].name)) {
          used[i] = true;
          order.push_back(i);
          s.parts[g].push_back(ctx[i]);
        }
    std::vector<Obj> kept, dropped;
    for (std::size_t i : order) kept.push_back(objs[i]);
    for (std::size_t i = 0; i < ctx.size(); ++i)
      if (!used[i]) {
        order.push_back(i);
        dropped.push_back(objs[i]);
      }
    bool in_place = true;
    for (std::size_t i = 0; i < order.size(); ++i) in_place = in_place && order[i] == i;
    if (!in_place) s.mor = permute_factors(b_, objs, order);
    if (!dropped.empty())
      s.mor = b_.compose(b_.tensor_mor(b_.identity(tensor_all(b_, kept)), b_.terminal(tensor_all(b_, dropped))), s.mor);
    return s;
  }

 private:
  struct Scrutinee {
    Mor into;  // Gamma -> Delta (x) A + Delta (x) B
    TypePtr sum;
    Context rest;  // Delta
  };

  /// The shared part of case terms and case effects: 1 (x) [[M]] followed by
  /// distributivity.
  template <class Body>
  Scrutinee scrutinise(const Context& ctx, const TermPtr& m, const std::string& x, const Body& l,
                       const std::string& y, const Body& r) {
    NameSet branches = free_vars(l);
    branches.erase(x);
    NameSet rb = free_vars(r);
    rb.erase(y);
    branches.insert(rb.begin(), rb.end());
    auto s = split(ctx, {branches, free_vars(m)});
    auto [f, ab] = term(s.parts[1], m);
    Obj delta = object(s.parts[0]);
    Mor g = b_.compose(b_.tensor_mor(b_.identity(delta), f), s.mor);
    Mor d = b_.distribute(delta, object(ab->left), object(ab->right));
    return {b_.compose(d, g), ab, s.parts[0]};
  }

  /// Appends x : A. A shadowed binding stays in place under a name no
  /// source program can mention, so the context object is unchanged.
  Context bind(Context ctx, const std::string& x, const TypePtr& a) {
    for (auto& b : ctx)
      if (b.name == x) b.name = x + "#" + std::to_string(++hidden_);
    ctx.push_back({x, a});
    return ctx;
  }

  const B& b_;
  int hidden_ = 0;
};

// ---------------------------------------------------------------------------
// Entry points on surface syntax

namespace detail {

inline CheckOptions trusting_options() {
  CheckOptions opts;
  opts.resolver = trusting_resolver();
  return opts;
}

inline TypingResult elaborate_term(const Context& ctx, const TermPtr& m, const TypePtr& a) {
  TypingResult r = check_term(ctx, m, a, trusting_options());
  if (!r.ok()) throw *r.error;
  return r;
}

inline EffectPtr elaborate_effect(const Context& ctx, const EffectPtr& phi) {
  TypingResult r = check_effect(ctx, phi, trusting_options());
  if (!r.ok()) throw *r.error;
  return r.effect;
}

}  // namespace detail

/// [[Gamma |- M : A]]. A may be null. Throws TypeError on ill-typed input.
template <TriangleBackend B>
TermDenotation<B> interp_term(const B& backend, const Context& ctx, const TermPtr& m, const TypePtr& a = nullptr) {
  TypingResult r = detail::elaborate_term(ctx, m, a);
  Interpreter<B> in(backend);
  return {backend.name(), ctx, r.type, in.term(ctx, r.term).first};
}

/// [[Gamma |- phi eff]].
template <TriangleBackend B>
EffectDenotation<B> interp_effect(const B& backend, const Context& ctx, const EffectPtr& phi) {
  Interpreter<B> in(backend);
  return {backend.name(), ctx, in.effect(ctx, detail::elaborate_effect(ctx, phi))};
}

/// Truth of a judgement: equal denotations for term equations, the order of
/// P([[Gamma]]) for inequalities. Formation judgements are true when their
/// denotation exists.
template <TriangleBackend B>
bool judgement_true(const B& backend, const Judgement& j) {
  Interpreter<B> in(backend);
  switch (j.kind) {
    case Judgement::Kind::Typing:
      in.term(j.ctx, detail::elaborate_term(j.ctx, j.lhs, j.type).term);
      return true;
    case Judgement::Kind::TermEq: {
      auto f = in.term(j.ctx, detail::elaborate_term(j.ctx, j.lhs, j.type).term).first;
      auto g = in.term(j.ctx, detail::elaborate_term(j.ctx, j.rhs, j.type).term).first;
      return backend.mor_equal(f, g);
    }
    case Judgement::Kind::EffFormation:
      in.effect(j.ctx, detail::elaborate_effect(j.ctx, j.elhs));
      return true;
    case Judgement::Kind::EffLeq:
    case Judgement::Kind::EffEquiv: {
      auto p = in.effect(j.ctx, detail::elaborate_effect(j.ctx, j.elhs));
      auto q = in.effect(j.ctx, detail::elaborate_effect(j.ctx, j.erhs));
      if (j.kind == Judgement::Kind::EffEquiv) return backend.p_equal(p, q);
      return backend.p_leq(p, q);
    }
  }
  return false;
}

}  // namespace qpel
