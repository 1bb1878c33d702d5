#pragma once
// Term and effect formation. Contexts are affine: a variable is consumed by at
// most one premise of a multiplicative rule, unused variables are discarded.
//
// Checking runs in two passes. The first infers types (unknown sum components
// become metavariables, defaulting to I) and checks linearity. The second
// rebuilds the formation derivation with exact premise contexts and hands the
// <= premises of (ovee) and (measure) to an ObligationResolver.

#include "qpel/printer.hpp"
#include "qpel/proof_script.hpp"
#include "qpel/syntax.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpel {

class TypeError : public std::runtime_error {
 public:
  TypeError(std::string rule, const std::string& message)
      : std::runtime_error("(" + rule + ") " + message), rule_(std::move(rule)), message_(message) {}
  const std::string& rule() const { return rule_; }
  const std::string& message() const { return message_; }

 private:
  std::string rule_, message_;
};

/// A node of a formation derivation. Obligation nodes carry the script that
/// discharged them; their rule is the script's root rule.
struct FormationNode {
  std::string rule;
  Judgement conclusion;
  std::vector<FormationNode> premises;
  std::optional<Script> proof;

  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& p : premises) n += p.size();
    return n;
  }
};

struct ObligationOutcome {
  bool ok = false;
  Script proof;
  std::string diagnostic;
};

/// Called for each <= premise with the explicit script, if the source gave one.
using ObligationResolver = std::function<ObligationOutcome(const Judgement& goal, const Script* given)>;

struct CheckOptions {
  ObligationResolver resolver;
  std::vector<Script> scripts;  // explicit obligation scripts, consumed in checking order
  bool qubits = true;           // the qubit pack
};

struct TypingResult {
  std::optional<TypeError> error;
  TypePtr type;
  TermPtr term;      // annotated: inl/inr carry their full sum type
  EffectPtr effect;  // annotated
  FormationNode derivation;
  std::vector<Judgement> obligations;

  bool ok() const { return !error.has_value(); }
};

/// Accepts every obligation unchecked, proving it with the script "auto".
inline ObligationResolver trusting_resolver() {
  return [](const Judgement&, const Script* given) {
    return ObligationOutcome{true, given ? *given : make_auto(), ""};
  };
}

/// Partitions ctx among premises using the variables each consumes. Unused
/// variables go to the last part; each part keeps ctx's order.
inline std::vector<Context> split_context(const Context& ctx, const std::vector<NameSet>& parts) {
  std::vector<Context> out(parts.size());
  for (const auto& b : ctx) {
    int owner = -1;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (!parts[i].count(b.name)) continue;
      if (owner >= 0)
        throw TypeError("split", "variable '" + b.name + "' is required by two premises");
      owner = static_cast<int>(i);
    }
    if (owner < 0) owner = static_cast<int>(parts.size()) - 1;
    out[static_cast<std::size_t>(owner)].push_back(b);
  }
  return out;
}

namespace detail {

inline Context concat(std::vector<Context> parts) {
  Context out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

inline NameSet minus(NameSet s, std::initializer_list<std::string> names) {
  for (const auto& n : names) s.erase(n);
  return s;
}

inline NameSet unite(const NameSet& a, const NameSet& b) {
  NameSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

inline void require_disjoint(const char* rule, const NameSet& a, const NameSet& b) {
  for (const auto& n : a)
    if (b.count(n))
      throw TypeError(rule, "variable '" + n + "' is used twice (no-cloning): it may be consumed by only one premise");
}

/// First pass: inference with metavariables and linearity.
class Elaborator {
 public:
  explicit Elaborator(bool qubits) : qubits_(qubits) {}

  TypePtr fresh() { return meta_type(next_++); }

  TypePtr zonk(const TypePtr& t, bool defaults) const {
    switch (t->kind) {
      case Type::Kind::Meta: {
        auto it = solution_.find(t->meta);
        if (it != solution_.end()) return zonk(it->second, defaults);
        return defaults ? unit_type() : t;
      }
      case Type::Kind::Tensor:
        return tensor_type(zonk(t->left, defaults), zonk(t->right, defaults));
      case Type::Kind::Sum:
        return sum_type(zonk(t->left, defaults), zonk(t->right, defaults));
      default:
        return t;
    }
  }

  TermPtr term(const Context& ctx, const TermPtr& t, const TypePtr& expected) {
    using K = Term::Kind;
    auto node = std::make_shared<Term>(*t);
    switch (t->kind) {
      case K::Var: {
        const Binding* b = lookup(ctx, t->name);
        if (!b) throw TypeError("var", "unbound variable '" + t->name + "'");
        expect("var", expected, b->type, t);
        break;
      }
      case K::Pair: {
        require_disjoint("tensor", free_vars(t->a), free_vars(t->b));
        TypePtr a = fresh(), b = fresh();
        expect("tensor", expected, tensor_type(a, b), t);
        node->a = term(ctx, t->a, a);
        node->b = term(ctx, t->b, b);
        break;
      }
      case K::LetPair: {
        require_disjoint("let", free_vars(t->a), minus(free_vars(t->b), {t->x, t->y}));
        if (t->x == t->y) throw TypeError("let", "binders of a let must differ ('" + t->x + "' twice)");
        TypePtr a = fresh(), b = fresh();
        node->a = term(ctx, t->a, tensor_type(a, b));
        node->b = term(extend(extend(ctx, t->x, a), t->y, b), t->b, expected);
        break;
      }
      case K::Unit:
        expect("unit", expected, unit_type(), t);
        break;
      case K::Inl:
      case K::Inr: {
        const char* rule = t->kind == K::Inl ? "inl" : "inr";
        TypePtr a = fresh(), b = fresh();
        TypePtr sum = sum_type(a, b);
        if (t->ann) expect(rule, sum, t->ann, t);
        expect(rule, expected, sum, t);
        node->a = term(ctx, t->a, t->kind == K::Inl ? a : b);
        node->ann = sum;
        break;
      }
      case K::Case: {
        NameSet branches = unite(minus(free_vars(t->b), {t->x}), minus(free_vars(t->c), {t->y}));
        require_disjoint("case", free_vars(t->a), branches);
        TypePtr a = fresh(), b = fresh();
        node->a = term(ctx, t->a, sum_type(a, b));
        node->b = term(extend(ctx, t->x, a), t->b, expected);
        node->c = term(extend(ctx, t->y, b), t->c, expected);
        break;
      }
      case K::Measure: {
        if (t->branches.empty()) throw TypeError("measure", "a measurement needs at least one branch");
        NameSet effects, terms;
        for (const auto& br : t->branches) {
          effects = unite(effects, free_vars(br.effect));
          terms = unite(terms, free_vars(br.term));
        }
        require_disjoint("measure", effects, terms);
        for (std::size_t i = 0; i < t->branches.size(); ++i) {
          node->branches[i].effect = effect(ctx, t->branches[i].effect);
          node->branches[i].term = term(ctx, t->branches[i].term, expected);
        }
        break;
      }
      case K::NewPlus:
        qubit_rule("qbit-new");
        expect("qbit-new", expected, qbit_type(), t);
        break;
      case K::PauliX:
      case K::PauliZ: {
        const char* rule = t->kind == K::PauliX ? "qbit-x" : "qbit-z";
        qubit_rule(rule);
        expect(rule, expected, qbit_type(), t);
        node->a = term(ctx, t->a, qbit_type());
        break;
      }
      case K::CZ:
        qubit_rule("qbit-cz");
        require_disjoint("qbit-cz", free_vars(t->a), free_vars(t->b));
        expect("qbit-cz", expected, tensor_type(qbit_type(), qbit_type()), t);
        node->a = term(ctx, t->a, qbit_type());
        node->b = term(ctx, t->b, qbit_type());
        break;
    }
    return node;
  }

  EffectPtr effect(const Context& ctx, const EffectPtr& e) {
    using K = Effect::Kind;
    auto node = std::make_shared<Effect>(*e);
    switch (e->kind) {
      case K::Zero:
      case K::Scalar:
        break;
      case K::Bot:
        node->a = effect(ctx, e->a);
        break;
      case K::Ovee:
        node->a = effect(ctx, e->a);
        node->b = effect(ctx, e->b);
        break;
      case K::Mult: {
        NameSet fv = free_vars(e->a);
        if (!fv.empty())
          throw TypeError("eff-mult", "the left factor of a product must be closed, but it mentions '" +
                                          *fv.begin() + "'");
        node->a = effect(Context{}, e->a);
        node->b = effect(ctx, e->b);
        break;
      }
      case K::Case: {
        NameSet branches = unite(minus(free_vars(e->a), {e->x}), minus(free_vars(e->b), {e->y}));
        require_disjoint("eff-case", free_vars(e->term), branches);
        TypePtr a = fresh(), b = fresh();
        node->term = term(ctx, e->term, sum_type(a, b));
        node->a = effect(extend(ctx, e->x, a), e->a);
        node->b = effect(extend(ctx, e->y, b), e->b);
        break;
      }
      case K::ProjPlus:
        qubit_rule("qbit-proj");
        node->term = term(ctx, e->term, qbit_type());
        break;
    }
    return node;
  }

  TermPtr finish(const TermPtr& t) const {
    auto node = std::make_shared<Term>(*t);
    if (t->ann) node->ann = zonk(t->ann, true);
    for (auto* child : {&node->a, &node->b, &node->c})
      if (*child) *child = finish(*child);
    for (auto& br : node->branches) br = {finish(br.effect), finish(br.term)};
    return node;
  }

  EffectPtr finish(const EffectPtr& e) const {
    auto node = std::make_shared<Effect>(*e);
    if (node->a) node->a = finish(node->a);
    if (node->b) node->b = finish(node->b);
    if (node->term) node->term = finish(node->term);
    return node;
  }

 private:
  void qubit_rule(const char* rule) const {
    if (!qubits_) throw TypeError(rule, "rule belongs to the disabled pack 'qubit'");
  }

  TypePtr walk(TypePtr t) const {
    while (t->kind == Type::Kind::Meta) {
      auto it = solution_.find(t->meta);
      if (it == solution_.end()) break;
      t = it->second;
    }
    return t;
  }

  bool occurs(int id, const TypePtr& t) const {
    TypePtr w = walk(t);
    if (w->kind == Type::Kind::Meta) return w->meta == id;
    return (w->left && occurs(id, w->left)) || (w->right && occurs(id, w->right));
  }

  bool unify(const TypePtr& x, const TypePtr& y) {
    TypePtr a = walk(x), b = walk(y);
    if (a->kind == Type::Kind::Meta && b->kind == Type::Kind::Meta && a->meta == b->meta) return true;
    if (a->kind == Type::Kind::Meta) {
      if (occurs(a->meta, b)) return false;
      solution_[a->meta] = b;
      return true;
    }
    if (b->kind == Type::Kind::Meta) return unify(b, a);
    if (a->kind != b->kind) return false;
    if (a->kind == Type::Kind::Tensor || a->kind == Type::Kind::Sum)
      return unify(a->left, b->left) && unify(a->right, b->right);
    return true;
  }

  void expect(const char* rule, const TypePtr& expected, const TypePtr& actual, const TermPtr& t) {
    if (!expected || unify(expected, actual)) return;
    throw TypeError(rule, "type mismatch in '" + print(t) + "': expected " + describe(expected) + ", found " +
                              describe(actual));
  }

  std::string describe(const TypePtr& t) const {
    TypePtr z = zonk(t, false);
    std::string s = print(z);
    return s.find('?') == std::string::npos ? s : "a type of shape " + s;
  }

  bool qubits_;
  int next_ = 0;
  std::map<int, TypePtr> solution_;
};

/// Second pass: the formation derivation of an elaborated term.
class Deriver {
 public:
  explicit Deriver(const CheckOptions& opts) : opts_(opts) {}

  std::vector<Judgement> obligations;

  std::pair<FormationNode, TypePtr> term(const Context& ctx, const TermPtr& t) {
    using K = Term::Kind;
    switch (t->kind) {
      case K::Var: {
        TypePtr a = lookup(ctx, t->name)->type;
        return {leaf("var", Judgement::typing(ctx, t, a)), a};
      }
      case K::Unit:
        return {leaf("unit", Judgement::typing(ctx, t, unit_type())), unit_type()};
      case K::NewPlus:
        return {leaf("qbit-new", Judgement::typing(ctx, t, qbit_type())), qbit_type()};
      case K::Pair:
      case K::CZ: {
        const char* rule = t->kind == K::Pair ? "tensor" : "qbit-cz";
        auto parts = split_context(ctx, {free_vars(t->a), free_vars(t->b)});
        auto [m, a] = term(parts[0], t->a);
        auto [n, b] = term(parts[1], t->b);
        TypePtr ty = t->kind == K::Pair ? tensor_type(a, b) : tensor_type(qbit_type(), qbit_type());
        return {rule_node(rule, ctx, Judgement::typing(concat(parts), t, ty), {m, n}), ty};
      }
      case K::LetPair: {
        auto parts = split_context(ctx, {free_vars(t->a), minus(free_vars(t->b), {t->x, t->y})});
        auto [m, ab] = term(parts[0], t->a);
        auto [n, c] = term(extend(extend(parts[1], t->x, ab->left), t->y, ab->right), t->b);
        return {rule_node("let", ctx, Judgement::typing(concat(parts), t, c), {m, n}), c};
      }
      case K::Inl:
      case K::Inr: {
        auto [m, a] = term(ctx, t->a);
        return {rule_node(t->kind == K::Inl ? "inl" : "inr", ctx, Judgement::typing(ctx, t, t->ann), {m}), t->ann};
      }
      case K::Case: {
        NameSet branches = unite(minus(free_vars(t->b), {t->x}), minus(free_vars(t->c), {t->y}));
        auto parts = split_context(ctx, {free_vars(t->a), branches});
        auto [m, ab] = term(parts[0], t->a);
        auto [n, c] = term(extend(parts[1], t->x, ab->left), t->b);
        auto [p, c2] = term(extend(parts[1], t->y, ab->right), t->c);
        return {rule_node("case", ctx, Judgement::typing(concat(parts), t, c), {m, n, p}), c};
      }
      case K::Measure: {
        NameSet effects, terms;
        std::vector<EffectPtr> phis;
        for (const auto& br : t->branches) {
          effects = unite(effects, free_vars(br.effect));
          terms = unite(terms, free_vars(br.term));
          phis.push_back(br.effect);
        }
        auto parts = split_context(ctx, {effects, terms});
        for (const auto& phi : phis) effect(parts[0], phi);
        std::vector<FormationNode> premises{obligation("measure", Judgement::leq(parts[0], mk::one(), mk::ovee_n(phis)))};
        TypePtr a;
        for (const auto& br : t->branches) {
          auto [n, b] = term(parts[1], br.term);
          premises.push_back(std::move(n));
          a = b;
        }
        return {rule_node("measure", ctx, Judgement::typing(concat(parts), t, a), std::move(premises)), a};
      }
      case K::PauliX:
      case K::PauliZ: {
        auto [m, a] = term(ctx, t->a);
        return {rule_node(t->kind == K::PauliX ? "qbit-x" : "qbit-z", ctx, Judgement::typing(ctx, t, qbit_type()),
                          {m}),
                qbit_type()};
      }
    }
    throw TypeError("var", "unknown term form");
  }

  FormationNode effect(const Context& ctx, const EffectPtr& e) {
    using K = Effect::Kind;
    Judgement j = Judgement::eff(ctx, e);
    switch (e->kind) {
      case K::Zero:
        return leaf("eff-0", j);
      case K::Scalar:
        return leaf("scalar", j);
      case K::Bot:
        return rule_node("eff-bot", ctx, j, {effect(ctx, e->a)});
      case K::Ovee: {
        effect(ctx, e->a);
        effect(ctx, e->b);
        return rule_node("eff-ovee", ctx, j, {obligation("eff-ovee", Judgement::perp(ctx, e->a, e->b))});
      }
      case K::Mult:
        return rule_node("eff-mult", ctx, j, {effect(Context{}, e->a), effect(ctx, e->b)});
      case K::Case: {
        NameSet branches = unite(minus(free_vars(e->a), {e->x}), minus(free_vars(e->b), {e->y}));
        auto parts = split_context(ctx, {branches, free_vars(e->term)});
        auto [m, ab] = term(parts[1], e->term);
        auto l = effect(extend(parts[0], e->x, ab->left), e->a);
        auto r = effect(extend(parts[0], e->y, ab->right), e->b);
        return rule_node("eff-case", ctx, Judgement::eff(concat(parts), e), {l, r, m});
      }
      case K::ProjPlus: {
        auto [m, a] = term(ctx, e->term);
        return rule_node("qbit-proj", ctx, j, {m});
      }
    }
    throw TypeError("eff-0", "unknown effect form");
  }

 private:
  static FormationNode leaf(const char* rule, Judgement j) { return FormationNode{rule, std::move(j), {}, {}}; }

  /// The rule node, wrapped in (exch) steps when its premises reorder ctx.
  static FormationNode rule_node(const char* rule, const Context& ctx, Judgement j,
                                 std::vector<FormationNode> premises) {
    FormationNode node{rule, j, std::move(premises), {}};
    Context order = j.ctx;
    std::vector<std::size_t> pos;
    for (const auto& b : order)
      for (std::size_t i = 0; i < ctx.size(); ++i)
        if (ctx[i].name == b.name) pos.push_back(i);
    // Bubble the premise order into ctx order; each adjacent swap is one (exch).
    for (std::size_t pass = 0; pass < pos.size(); ++pass)
      for (std::size_t i = 0; i + 1 < pos.size(); ++i) {
        if (pos[i] < pos[i + 1]) continue;
        std::swap(pos[i], pos[i + 1]);
        std::swap(order[i], order[i + 1]);
        Judgement k = node.conclusion;
        k.ctx = order;
        node = FormationNode{"exch", k, {std::move(node)}, {}};
      }
    return node;
  }

  FormationNode obligation(const char* rule, const Judgement& goal) {
    obligations.push_back(goal);
    const Script* given = next_script_ < opts_.scripts.size() ? &opts_.scripts[next_script_++] : nullptr;
    if (!opts_.resolver) throw TypeError(rule, "undischarged obligation " + print(goal) + ": no resolver");
    ObligationOutcome out = opts_.resolver(goal, given);
    if (!out.ok) {
      std::string why = out.diagnostic.empty() ? "" : ": " + out.diagnostic;
      throw TypeError(rule, "undischarged obligation " + print(goal) + why);
    }
    return FormationNode{out.proof.rule, goal, {}, out.proof};
  }

  const CheckOptions& opts_;
  std::size_t next_script_ = 0;
};

inline void require_well_formed(const Context& ctx) {
  if (!has_distinct_names(ctx)) throw TypeError("var", "context " + print(ctx) + " binds a name twice");
  for (const auto& b : ctx)
    if (!b.type) throw TypeError("var", "variable '" + b.name + "' has no type");
}

}  // namespace detail

/// Gamma |- M : A. A may be null, in which case it is inferred.
inline TypingResult check_term(const Context& ctx, const TermPtr& m, const TypePtr& expected,
                               const CheckOptions& opts) {
  TypingResult r;
  try {
    detail::require_well_formed(ctx);
    detail::Elaborator elab(opts.qubits);
    TermPtr raw = elab.term(ctx, m, expected ? expected : elab.fresh());
    r.term = elab.finish(raw);
    detail::Deriver deriver(opts);
    auto [node, type] = deriver.term(ctx, r.term);
    r.type = type;
    r.derivation = std::move(node);
    r.obligations = std::move(deriver.obligations);
  } catch (const TypeError& e) {
    r.error = e;
  }
  return r;
}

/// Gamma |- phi eff.
inline TypingResult check_effect(const Context& ctx, const EffectPtr& phi, const CheckOptions& opts) {
  TypingResult r;
  try {
    detail::require_well_formed(ctx);
    detail::Elaborator elab(opts.qubits);
    r.effect = elab.finish(elab.effect(ctx, phi));
    detail::Deriver deriver(opts);
    r.derivation = deriver.effect(ctx, r.effect);
    r.obligations = std::move(deriver.obligations);
  } catch (const TypeError& e) {
    r.error = e;
  }
  return r;
}

/// The type of an elaborated term (inl/inr annotated) in a context that
/// already typechecks it.
inline TypePtr type_of(const Context& ctx, const TermPtr& t) {
  CheckOptions opts;
  opts.resolver = trusting_resolver();
  return detail::Deriver(opts).term(ctx, t).second;
}

}  // namespace qpel
