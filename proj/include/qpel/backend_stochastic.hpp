#pragma once
// Stochastic backend: the Kleisli category of the distribution monad over
// rational [0,1]. A morphism X -> Y is a row-stochastic matrix with exact
// rational entries; P(X) = X -> [0,1]; S(X) = distributions on X.

#include "qpel/triangle.hpp"

#include <cstddef>

namespace qpel {

class StochasticBackend {
 public:
  using Obj = std::size_t;
  struct Mor {
    Obj dom = 1, cod = 1;
    std::vector<Rational> m;  // m[x * cod + y] = f(x)(y)

    const Rational& at(std::size_t x, std::size_t y) const { return m[x * cod + y]; }
    Rational& at(std::size_t x, std::size_t y) { return m[x * cod + y]; }
  };
  using Pred = std::vector<Rational>;
  using State = std::vector<Rational>;
  using Scalar = Rational;

  std::string name() const { return "stochastic"; }

  Obj unit_obj() const { return 1; }
  Obj tensor(Obj a, Obj b) const { return a * b; }
  Obj coproduct(Obj a, Obj b) const { return a + b; }
  Obj dom(const Mor& f) const { return f.dom; }
  Obj cod(const Mor& f) const { return f.cod; }

  static Mor zeros(Obj a, Obj b) { return Mor{a, b, std::vector<Rational>(a * b, Rational(0))}; }

  /// The deterministic morphism of a function table.
  static Mor from_function(Obj a, Obj b, const std::vector<std::size_t>& table) {
    Mor f = zeros(a, b);
    for (std::size_t x = 0; x < a; ++x) f.at(x, table[x]) = 1;
    return f;
  }

  Mor identity(Obj a) const {
    Mor f = zeros(a, a);
    for (std::size_t i = 0; i < a; ++i) f.at(i, i) = 1;
    return f;
  }
  Mor compose(const Mor& g, const Mor& f) const {
    require(f.cod == g.dom, "compose: codomain/domain mismatch");
    Mor h = zeros(f.dom, g.cod);
    for (std::size_t x = 0; x < f.dom; ++x)
      for (std::size_t y = 0; y < f.cod; ++y) {
        const Rational& w = f.at(x, y);
        if (w == 0) continue;
        for (std::size_t z = 0; z < g.cod; ++z)
          if (g.at(y, z) != 0) h.at(x, z) += w * g.at(y, z);
      }
    return h;
  }
  Mor tensor_mor(const Mor& f, const Mor& g) const {
    Mor h = zeros(f.dom * g.dom, f.cod * g.cod);
    for (std::size_t i = 0; i < f.dom; ++i)
      for (std::size_t j = 0; j < g.dom; ++j)
        for (std::size_t k = 0; k < f.cod; ++k) {
          if (f.at(i, k) == 0) continue;
          for (std::size_t l = 0; l < g.cod; ++l) h.at(i * g.dom + j, k * g.cod + l) = f.at(i, k) * g.at(j, l);
        }
    return h;
  }
  Mor symmetry(Obj a, Obj b) const {
    std::vector<std::size_t> t(a * b);
    for (std::size_t i = 0; i < a; ++i)
      for (std::size_t j = 0; j < b; ++j) t[i * b + j] = j * a + i;
    return from_function(a * b, a * b, t);
  }
  Mor terminal(Obj a) const { return from_function(a, 1, std::vector<std::size_t>(a, 0)); }
  Mor inl(Obj a, Obj b) const {
    std::vector<std::size_t> t(a);
    for (std::size_t i = 0; i < a; ++i) t[i] = i;
    return from_function(a, a + b, t);
  }
  Mor inr(Obj a, Obj b) const {
    std::vector<std::size_t> t(b);
    for (std::size_t j = 0; j < b; ++j) t[j] = a + j;
    return from_function(b, a + b, t);
  }
  Mor cotuple(const Mor& f, const Mor& g) const {
    require(f.cod == g.cod, "cotuple: codomain mismatch");
    Mor h{f.dom + g.dom, f.cod, f.m};
    h.m.insert(h.m.end(), g.m.begin(), g.m.end());
    return h;
  }
  Mor distribute(Obj a, Obj b, Obj c) const {
    std::vector<std::size_t> t(a * (b + c));
    for (std::size_t i = 0; i < a; ++i)
      for (std::size_t j = 0; j < b + c; ++j) t[i * (b + c) + j] = j < b ? i * b + j : a * b + i * c + (j - b);
    return from_function(t.size(), t.size(), t);
  }
  Mor meas(Obj a, const std::vector<Pred>& rs) const {
    Mor h = zeros(a, rs.size());
    for (std::size_t x = 0; x < a; ++x) {
      Rational total = 0;
      for (std::size_t k = 0; k < rs.size(); ++k) {
        h.at(x, k) = rs[k].at(x);
        total += rs[k][x];
      }
      require(total == 1, "meas: predicates do not sum to 1");
    }
    return h;
  }
  bool mor_equal(const Mor& f, const Mor& g) const { return f.dom == g.dom && f.cod == g.cod && f.m == g.m; }

  bool is_stochastic(const Mor& f) const {
    for (std::size_t x = 0; x < f.dom; ++x) {
      Rational s = 0;
      for (std::size_t y = 0; y < f.cod; ++y) {
        if (f.at(x, y) < 0) return false;
        s += f.at(x, y);
      }
      if (s != 1) return false;
    }
    return true;
  }

  Pred p_zero(Obj a) const { return Pred(a, Rational(0)); }
  Pred p_one(Obj a) const { return Pred(a, Rational(1)); }
  Pred p_orth(const Pred& p) const {
    Pred q(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) q[i] = 1 - p[i];
    return q;
  }
  std::optional<Pred> p_ovee(const Pred& p, const Pred& q) const {
    require(p.size() == q.size(), "ovee: shape mismatch");
    Pred r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      r[i] = p[i] + q[i];
      if (r[i] > 1) return std::nullopt;
    }
    return r;
  }
  Pred p_scale(const Pred& s, const Pred& p) const {
    Rational r = to_scalar(s);
    Pred q(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) q[i] = r * p[i];
    return q;
  }
  Pred p_const(Obj a, const Rational& q) const { return Pred(a, q); }
  Scalar to_scalar(const Pred& p) const {
    require(p.size() == 1, "to_scalar: predicate not on I");
    return p[0];
  }
  Pred p_copair(const Pred& p, const Pred& q) const {
    Pred r = p;
    r.insert(r.end(), q.begin(), q.end());
    return r;
  }
  Pred apply_p(const Mor& f, const Pred& q) const {
    require(q.size() == f.cod, "apply_p: shape mismatch");
    Pred r(f.dom, Rational(0));
    for (std::size_t x = 0; x < f.dom; ++x)
      for (std::size_t y = 0; y < f.cod; ++y)
        if (f.at(x, y) != 0) r[x] += f.at(x, y) * q[y];
    return r;
  }
  bool p_leq(const Pred& p, const Pred& q) const {
    if (p.size() != q.size()) return false;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p[i] > q[i]) return false;
    return true;
  }
  bool p_equal(const Pred& p, const Pred& q) const { return p == q; }

  State apply_s(const Mor& f, const State& s) const {
    require(s.size() == f.dom, "apply_s: shape mismatch");
    State r(f.cod, Rational(0));
    for (std::size_t x = 0; x < f.dom; ++x)
      if (s[x] != 0)
        for (std::size_t y = 0; y < f.cod; ++y) r[y] += s[x] * f.at(x, y);
    return r;
  }
  Scalar validity(const Pred& p, const State& s) const {
    Rational v = 0;
    for (std::size_t i = 0; i < p.size(); ++i) v += p[i] * s.at(i);
    return v;
  }
  State pair_states(const State& s, const State& t) const {
    State r;
    for (const auto& a : s)
      for (const auto& b : t) r.push_back(a * b);
    return r;
  }

  Obj qbit() const { throw Unsupported("stochastic backend has no qubits"); }
  Mor new_plus() const { return qbit(), Mor{}; }
  Mor pauli_x() const { return qbit(), Mor{}; }
  Mor pauli_z() const { return qbit(), Mor{}; }
  Mor cz() const { return qbit(), Mor{}; }
  Pred proj_plus(const Angle&) const { return qbit(), Pred{}; }

 private:
  static void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  }
};

static_assert(TriangleBackend<StochasticBackend>);

}  // namespace qpel
