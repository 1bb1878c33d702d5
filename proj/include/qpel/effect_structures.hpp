#pragma once
// Effect algebras, effect monoids and effect modules as dictionaries of
// functions, with law-checking harnesses that report counterexamples.
//
// Partiality is an explicit std::optional. Laws come in three flavours:
//   Kleene    both sides undefined, or both defined and equal
//   directed  if the left side is defined, the right is defined and equal
//   total     both sides defined and equal

#include "qpel/rational.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace qpel {

template <class T>
struct EffectAlgebra {
  std::string name;
  T zero{};
  std::function<std::optional<T>(const T&, const T&)> ovee;
  std::function<T(const T&)> orth;
  std::function<bool(const T&, const T&)> eq = [](const T& a, const T& b) { return a == b; };
  std::function<std::string(const T&)> show;

  T one() const { return orth(zero); }
};

template <class T>
struct EffectMonoid {
  EffectAlgebra<T> alg;
  std::function<T(const T&, const T&)> mul;
  bool commutative = false;
};

template <class A, class S>
struct EffectModule {
  EffectAlgebra<A> carrier;
  EffectMonoid<S> scalars;
  std::function<A(const S&, const A&)> smul;
};

/// x o+ y, undefined unless x and y are orthogonal.
template <class T>
std::optional<T> partial_sum(const EffectAlgebra<T>& inst, const T& x, const T& y) {
  return inst.ovee(x, y);
}

// ---------------------------------------------------------------------------
// Equality modes

template <class T, class Eq>
bool kleene_equal(const std::optional<T>& a, const std::optional<T>& b, Eq eq) {
  if (a.has_value() != b.has_value()) return false;
  return !a || eq(*a, *b);
}

template <class T, class Eq>
bool directed_equal(const std::optional<T>& lhs, const std::optional<T>& rhs, Eq eq) {
  if (!lhs) return true;
  return rhs && eq(*lhs, *rhs);
}

template <class T, class Eq>
bool total_equal(const std::optional<T>& a, const std::optional<T>& b, Eq eq) {
  return a && b && eq(*a, *b);
}

template <class T, class F>
auto and_then(const std::optional<T>& x, F f) -> decltype(f(*x)) {
  if (!x) return std::nullopt;
  return f(*x);
}

// ---------------------------------------------------------------------------
// Reports

enum class LawKind { Kleene, Directed, Total, Derived };

inline const char* law_kind_name(LawKind k) {
  switch (k) {
    case LawKind::Kleene:
      return "kleene";
    case LawKind::Directed:
      return "directed";
    case LawKind::Total:
      return "total";
    case LawKind::Derived:
      return "derived";
  }
  return "?";
}

struct LawResult {
  std::string law;
  LawKind kind = LawKind::Total;
  bool passed = true;
  std::size_t checked = 0;
  std::optional<std::string> counterexample;
};

struct LawReport {
  std::string instance;
  std::vector<LawResult> laws;

  bool all_passed() const {
    for (const auto& l : laws)
      if (!l.passed) return false;
    return true;
  }
  std::vector<std::string> failed() const {
    std::vector<std::string> out;
    for (const auto& l : laws)
      if (!l.passed) out.push_back(l.law);
    return out;
  }
  const LawResult* find(const std::string& law) const {
    for (const auto& l : laws)
      if (l.law == law) return &l;
    return nullptr;
  }
  void append(const LawReport& other) { laws.insert(laws.end(), other.laws.begin(), other.laws.end()); }

  std::string text() const {
    std::ostringstream os;
    os << instance << "\n";
    for (const auto& l : laws) {
      os << "  " << (l.passed ? "pass" : "FAIL") << "  " << l.law << " (" << law_kind_name(l.kind) << ", "
         << l.checked << " cases)";
      if (l.counterexample) os << "  counterexample: " << *l.counterexample;
      os << "\n";
    }
    return os.str();
  }

  nlohmann::json json() const {
    nlohmann::json j;
    j["instance"] = instance;
    nlohmann::json laws_j = nlohmann::json::object();
    for (const auto& l : laws) {
      nlohmann::json e;
      e["status"] = l.passed ? "pass" : "fail";
      e["kind"] = law_kind_name(l.kind);
      e["checked"] = l.checked;
      if (l.counterexample) e["counterexample"] = *l.counterexample;
      laws_j[l.law] = e;
    }
    j["laws"] = laws_j;
    return j;
  }
};

/// Sample pools: exhaustive over `pool` when random_tuples is 0, otherwise
/// that many tuples drawn uniformly from the pool.
template <class T>
struct Samples {
  std::vector<T> pool;
  std::size_t random_tuples = 0;
  unsigned seed = 1;
};

namespace detail {

template <class T>
std::string show(const EffectAlgebra<T>& inst, const T& x) {
  if (inst.show) return inst.show(x);
  if constexpr (requires(std::ostream& os) { os << x; }) {
    std::ostringstream os;
    os << x;
    return os.str();
  } else {
    return "<value>";
  }
}

template <class T, class F>
void for_tuples(const Samples<T>& s, int arity, F f) {
  const auto& p = s.pool;
  if (p.empty()) return;
  if (s.random_tuples == 0) {
    std::vector<std::size_t> idx(arity, 0);
    for (;;) {
      std::vector<T> t;
      for (auto i : idx) t.push_back(p[i]);
      f(t);
      int k = arity - 1;
      while (k >= 0 && ++idx[k] == p.size()) idx[k--] = 0;
      if (k < 0) return;
    }
  }
  std::mt19937 rng(s.seed);
  std::uniform_int_distribution<std::size_t> d(0, p.size() - 1);
  for (std::size_t n = 0; n < s.random_tuples; ++n) {
    std::vector<T> t;
    for (int i = 0; i < arity; ++i) t.push_back(p[d(rng)]);
    f(t);
  }
}

class LawRecorder {
 public:
  LawRecorder(std::string law, LawKind kind) { r_.law = std::move(law), r_.kind = kind; }
  void record(bool ok, const std::function<std::string()>& witness) {
    ++r_.checked;
    if (!ok && r_.passed) {
      r_.passed = false;
      r_.counterexample = witness();
    }
  }
  LawResult result() const { return r_; }

 private:
  LawResult r_;
};

template <class T>
std::string show_opt(const EffectAlgebra<T>& inst, const std::optional<T>& x) {
  return x ? show(inst, *x) : std::string("undefined");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Harnesses

template <class T>
LawReport check_effect_algebra_laws(const EffectAlgebra<T>& inst, const Samples<T>& s) {
  using detail::LawRecorder;
  auto eq = inst.eq;
  auto sh = [&](const T& x) { return detail::show(inst, x); };
  LawRecorder comm("ovee-comm", LawKind::Kleene), assoc("ovee-assoc", LawKind::Kleene),
      unit("ovee-zero", LawKind::Total), orth("orth-unique", LawKind::Total),
      one_perp("perp-one-is-zero", LawKind::Total), cancel("cancellation", LawKind::Derived);
  const T one = inst.one();

  detail::for_tuples(s, 2, [&](const std::vector<T>& t) {
    const T &x = t[0], &y = t[1];
    comm.record(kleene_equal(inst.ovee(x, y), inst.ovee(y, x), eq), [&] { return "x=" + sh(x) + ", y=" + sh(y); });
    auto xy = inst.ovee(x, y);
    bool is_one = xy && eq(*xy, one);
    bool is_orth = eq(y, inst.orth(x));
    orth.record(is_one == is_orth, [&] {
      return "x=" + sh(x) + ", y=" + sh(y) + ", x o+ y=" + detail::show_opt(inst, xy) + ", orth(x)=" + sh(inst.orth(x));
    });
  });
  detail::for_tuples(s, 1, [&](const std::vector<T>& t) {
    const T& x = t[0];
    unit.record(total_equal(inst.ovee(x, inst.zero), std::optional<T>(x), eq), [&] { return "x=" + sh(x); });
    one_perp.record(!inst.ovee(x, one) || eq(x, inst.zero), [&] { return "x=" + sh(x); });
  });
  detail::for_tuples(s, 3, [&](const std::vector<T>& t) {
    const T &x = t[0], &y = t[1], &z = t[2];
    auto l = and_then(inst.ovee(y, z), [&](const T& yz) { return inst.ovee(x, yz); });
    auto r = and_then(inst.ovee(x, y), [&](const T& xy) { return inst.ovee(xy, z); });
    assoc.record(kleene_equal(l, r, eq), [&] { return "x=" + sh(x) + ", y=" + sh(y) + ", z=" + sh(z); });
    auto a = inst.ovee(x, y), b = inst.ovee(x, z);
    cancel.record(!(a && b && eq(*a, *b)) || eq(y, z),
                  [&] { return "x=" + sh(x) + ", y=" + sh(y) + ", z=" + sh(z); });
  });
  LawReport rep{inst.name, {}};
  for (auto* r : {&comm, &assoc, &unit, &orth, &one_perp, &cancel}) rep.laws.push_back(r->result());
  return rep;
}

template <class T>
LawReport check_effect_monoid_laws(const EffectMonoid<T>& m, const Samples<T>& s) {
  using detail::LawRecorder;
  const auto& inst = m.alg;
  auto eq = inst.eq;
  auto sh = [&](const T& x) { return detail::show(inst, x); };
  LawRecorder dl("dist-left", LawKind::Directed), dr("dist-right", LawKind::Directed),
      unit("mult-unit", LawKind::Total), assoc("mult-assoc", LawKind::Total), zero("mult-zero", LawKind::Derived),
      comm("mult-comm", LawKind::Total);
  const T one = inst.one();
  auto mulo = [&](const std::optional<T>& a, const T& b) {
    return and_then(a, [&](const T& v) { return std::optional<T>(m.mul(v, b)); });
  };
  detail::for_tuples(s, 1, [&](const std::vector<T>& t) {
    const T& x = t[0];
    unit.record(eq(m.mul(one, x), x) && eq(m.mul(x, one), x), [&] { return "x=" + sh(x); });
    zero.record(eq(m.mul(x, inst.zero), inst.zero) && eq(m.mul(inst.zero, x), inst.zero),
                [&] { return "x=" + sh(x); });
  });
  detail::for_tuples(s, 2, [&](const std::vector<T>& t) {
    const T &x = t[0], &y = t[1];
    if (m.commutative) comm.record(eq(m.mul(x, y), m.mul(y, x)), [&] { return "x=" + sh(x) + ", y=" + sh(y); });
  });
  detail::for_tuples(s, 3, [&](const std::vector<T>& t) {
    const T &x = t[0], &y = t[1], &z = t[2];
    auto w = [&] { return "x=" + sh(x) + ", y=" + sh(y) + ", z=" + sh(z); };
    dl.record(directed_equal(mulo(inst.ovee(x, y), z), inst.ovee(m.mul(x, z), m.mul(y, z)), eq), w);
    auto r = and_then(inst.ovee(y, z), [&](const T& yz) { return std::optional<T>(m.mul(x, yz)); });
    dr.record(directed_equal(r, inst.ovee(m.mul(x, y), m.mul(x, z)), eq), w);
    assoc.record(eq(m.mul(x, m.mul(y, z)), m.mul(m.mul(x, y), z)), w);
  });
  LawReport rep{inst.name, {}};
  for (auto* r : {&dl, &dr, &unit, &assoc, &zero}) rep.laws.push_back(r->result());
  if (m.commutative) rep.laws.push_back(comm.result());
  return rep;
}

template <class A, class S>
LawReport check_effect_module_laws(const EffectModule<A, S>& mod, const Samples<A>& xs, const Samples<S>& rs) {
  using detail::LawRecorder;
  const auto& ca = mod.carrier;
  const auto& sa = mod.scalars.alg;
  auto eq = ca.eq;
  LawRecorder dv("smul-dist-vector", LawKind::Directed), ds("smul-dist-scalar", LawKind::Directed),
      assoc("smul-assoc", LawKind::Total), unit("smul-unit", LawKind::Total);
  auto w = [&](const S& r, const S& s2, const A& x, const A& y) {
    return "r=" + detail::show(sa, r) + ", s=" + detail::show(sa, s2) + ", x=" + detail::show(ca, x) +
           ", y=" + detail::show(ca, y);
  };
  // Pair up scalar pairs with vector pairs.
  Samples<std::pair<S, S>> scalar_pairs;
  Samples<std::pair<A, A>> vector_pairs;
  detail::for_tuples(rs, 2, [&](const std::vector<S>& t) { scalar_pairs.pool.push_back({t[0], t[1]}); });
  detail::for_tuples(xs, 2, [&](const std::vector<A>& t) { vector_pairs.pool.push_back({t[0], t[1]}); });
  std::size_t total = scalar_pairs.pool.size() * vector_pairs.pool.size();
  std::size_t budget = std::max(xs.random_tuples, rs.random_tuples);
  std::mt19937 rng(xs.seed + rs.seed);
  auto run = [&](const std::pair<S, S>& rsp, const std::pair<A, A>& xyp) {
    const S &r = rsp.first, &s2 = rsp.second;
    const A &x = xyp.first, &y = xyp.second;
    auto lhs = and_then(ca.ovee(x, y), [&](const A& v) { return std::optional<A>(mod.smul(r, v)); });
    dv.record(directed_equal(lhs, ca.ovee(mod.smul(r, x), mod.smul(r, y)), eq), [&] { return w(r, s2, x, y); });
    auto lhs2 = and_then(sa.ovee(r, s2), [&](const S& v) { return std::optional<A>(mod.smul(v, x)); });
    ds.record(directed_equal(lhs2, ca.ovee(mod.smul(r, x), mod.smul(s2, x)), eq), [&] { return w(r, s2, x, y); });
    assoc.record(eq(mod.smul(mod.scalars.mul(r, s2), x), mod.smul(r, mod.smul(s2, x))),
                 [&] { return w(r, s2, x, y); });
    unit.record(eq(mod.smul(sa.one(), x), x), [&] { return w(r, s2, x, y); });
  };
  if (budget == 0 || total <= budget) {
    for (const auto& a : scalar_pairs.pool)
      for (const auto& b : vector_pairs.pool) run(a, b);
  } else {
    std::uniform_int_distribution<std::size_t> di(0, scalar_pairs.pool.size() - 1), dj(0, vector_pairs.pool.size() - 1);
    for (std::size_t n = 0; n < budget; ++n) run(scalar_pairs.pool[di(rng)], vector_pairs.pool[dj(rng)]);
  }
  LawReport rep{ca.name + " over " + sa.name, {}};
  for (auto* r : {&dv, &ds, &assoc, &unit}) rep.laws.push_back(r->result());
  return rep;
}

/// Checks that `f` is an effect algebra homomorphism, and reports the
/// derived consequence f(0) = 0 separately.
template <class A, class B>
LawReport check_homomorphism(const std::string& name, const std::function<B(const A&)>& f,
                             const EffectAlgebra<A>& src, const EffectAlgebra<B>& dst, const Samples<A>& s) {
  using detail::LawRecorder;
  LawRecorder sum("hom-ovee", LawKind::Directed), orth("hom-orth", LawKind::Total), zero("hom-zero", LawKind::Derived);
  auto fo = [&](const std::optional<A>& a) { return and_then(a, [&](const A& v) { return std::optional<B>(f(v)); }); };
  detail::for_tuples(s, 2, [&](const std::vector<A>& t) {
    const A &x = t[0], &y = t[1];
    sum.record(directed_equal(fo(src.ovee(x, y)), dst.ovee(f(x), f(y)), dst.eq),
               [&] { return "x=" + detail::show(src, x) + ", y=" + detail::show(src, y); });
  });
  detail::for_tuples(s, 1, [&](const std::vector<A>& t) {
    const A& x = t[0];
    orth.record(dst.eq(f(src.orth(x)), dst.orth(f(x))), [&] { return "x=" + detail::show(src, x); });
  });
  zero.record(dst.eq(f(src.zero), dst.zero), [&] { return "f(0)=" + detail::show(dst, f(src.zero)); });
  LawReport rep{name, {}};
  for (auto* r : {&sum, &orth, &zero}) rep.laws.push_back(r->result());
  return rep;
}

// ---------------------------------------------------------------------------
// Shipped instances

inline EffectMonoid<bool> boolean_monoid() {
  EffectMonoid<bool> m;
  m.alg.name = "boolean {0,1}";
  m.alg.zero = false;
  m.alg.ovee = [](bool a, bool b) -> std::optional<bool> {
    if (a && b) return std::nullopt;
    return a || b;
  };
  m.alg.orth = [](bool a) { return !a; };
  m.alg.show = [](bool a) { return std::string(a ? "1" : "0"); };
  m.mul = [](bool a, bool b) { return a && b; };
  m.commutative = true;
  return m;
}

inline EffectMonoid<Rational> rational_interval() {
  EffectMonoid<Rational> m;
  m.alg.name = "rational [0,1]";
  m.alg.zero = 0;
  m.alg.ovee = [](const Rational& a, const Rational& b) -> std::optional<Rational> {
    Rational s = a + b;
    if (s > 1) return std::nullopt;
    return s;
  };
  m.alg.orth = [](const Rational& a) { return Rational(1) - a; };
  m.alg.show = [](const Rational& a) { return to_string(a); };
  m.mul = [](const Rational& a, const Rational& b) { return a * b; };
  m.commutative = true;
  return m;
}

/// The chain {0, 1/2, 1} as an effect algebra. It carries no effect monoid
/// structure: 1/2 . 1/2 would have to be 1/4.
inline EffectAlgebra<Rational> three_chain() {
  EffectAlgebra<Rational> a = rational_interval().alg;
  a.name = "3-chain {0,1/2,1}";
  return a;  // closed on {0, 1/2, 1}: sums leaving the chain exceed 1
}

inline std::vector<Rational> three_chain_elements() { return {Rational(0), Rational(1, 2), Rational(1)}; }

/// The Boolean algebra on two atoms, elements as bit masks 0..3.
inline EffectMonoid<unsigned> four_element_boolean() {
  EffectMonoid<unsigned> m;
  m.alg.name = "boolean algebra 2^2";
  m.alg.zero = 0;
  m.alg.ovee = [](unsigned a, unsigned b) -> std::optional<unsigned> {
    if (a & b) return std::nullopt;
    return a | b;
  };
  m.alg.orth = [](unsigned a) { return ~a & 3u; };
  m.mul = [](unsigned a, unsigned b) { return a & b; };
  m.commutative = true;
  return m;
}

/// Predicates on an n-point set valued in [0,1], pointwise; a module over [0,1].
inline EffectModule<std::vector<Rational>, Rational> rational_predicates(std::size_t n) {
  EffectModule<std::vector<Rational>, Rational> mod;
  using V = std::vector<Rational>;
  mod.carrier.name = "[0,1]^" + std::to_string(n);
  mod.carrier.zero = V(n, Rational(0));
  mod.carrier.ovee = [](const V& a, const V& b) -> std::optional<V> {
    V out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      out[i] = a[i] + b[i];
      if (out[i] > 1) return std::nullopt;
    }
    return out;
  };
  mod.carrier.orth = [](const V& a) {
    V out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = 1 - a[i];
    return out;
  };
  mod.carrier.show = [](const V& a) {
    std::string s = "(";
    for (std::size_t i = 0; i < a.size(); ++i) s += (i ? "," : "") + to_string(a[i]);
    return s + ")";
  };
  mod.scalars = rational_interval();
  mod.smul = [](const Rational& r, const V& a) {
    V out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = r * a[i];
    return out;
  };
  return mod;
}

/// An effect monoid viewed as a module over itself.
template <class T>
EffectModule<T, T> self_module(const EffectMonoid<T>& m) {
  return {m.alg, m, m.mul};
}

/// Rationals in [0,1] with denominators up to `max_den`, without repeats.
inline std::vector<Rational> rational_grid(int max_den) {
  std::vector<Rational> out;
  for (int d = 1; d <= max_den; ++d)
    for (int n = 0; n <= d; ++n) {
      Rational q(n, d);
      if (denominator(q) == d || (n == 0 && d == 1)) out.push_back(q);
    }
  return out;
}

}  // namespace qpel
