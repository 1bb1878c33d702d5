#pragma once
// Set backend: finite sets and functions. P(A) is the power set of A, S(A)
// is A itself, scalars are {0,1}.

#include "qpel/triangle.hpp"

#include <algorithm>
#include <cstddef>

namespace qpel {

class SetBackend {
 public:
  using Obj = std::size_t;  // number of points; points are 0..n-1
  struct Mor {
    Obj dom = 1, cod = 1;
    std::vector<std::size_t> table;  // table[x] = f(x)
  };
  using Pred = std::vector<char>;  // indicator
  struct State {
    std::size_t point = 0;
    Obj of = 1;
    bool operator==(const State&) const = default;
  };
  using Scalar = bool;

  std::string name() const { return "set"; }

  Obj unit_obj() const { return 1; }
  Obj tensor(Obj a, Obj b) const { return a * b; }
  Obj coproduct(Obj a, Obj b) const { return a + b; }
  Obj dom(const Mor& f) const { return f.dom; }
  Obj cod(const Mor& f) const { return f.cod; }

  Mor identity(Obj a) const {
    Mor f{a, a, std::vector<std::size_t>(a)};
    for (std::size_t i = 0; i < a; ++i) f.table[i] = i;
    return f;
  }
  Mor compose(const Mor& g, const Mor& f) const {
    require(f.cod == g.dom, "compose: codomain/domain mismatch");
    Mor h{f.dom, g.cod, std::vector<std::size_t>(f.dom)};
    for (std::size_t i = 0; i < f.dom; ++i) h.table[i] = g.table[f.table[i]];
    return h;
  }
  Mor tensor_mor(const Mor& f, const Mor& g) const {
    Mor h{f.dom * g.dom, f.cod * g.cod, std::vector<std::size_t>(f.dom * g.dom)};
    for (std::size_t i = 0; i < f.dom; ++i)
      for (std::size_t j = 0; j < g.dom; ++j) h.table[i * g.dom + j] = f.table[i] * g.cod + g.table[j];
    return h;
  }
  Mor symmetry(Obj a, Obj b) const {
    Mor h{a * b, b * a, std::vector<std::size_t>(a * b)};
    for (std::size_t i = 0; i < a; ++i)
      for (std::size_t j = 0; j < b; ++j) h.table[i * b + j] = j * a + i;
    return h;
  }
  Mor terminal(Obj a) const { return Mor{a, 1, std::vector<std::size_t>(a, 0)}; }
  Mor inl(Obj a, Obj b) const {
    Mor h = identity(a);
    h.cod = a + b;
    return h;
  }
  Mor inr(Obj a, Obj b) const {
    Mor h{b, a + b, std::vector<std::size_t>(b)};
    for (std::size_t j = 0; j < b; ++j) h.table[j] = a + j;
    return h;
  }
  Mor cotuple(const Mor& f, const Mor& g) const {
    require(f.cod == g.cod, "cotuple: codomain mismatch");
    Mor h{f.dom + g.dom, f.cod, f.table};
    h.table.insert(h.table.end(), g.table.begin(), g.table.end());
    return h;
  }
  /// A (x) (B + C) -> A (x) B + A (x) C
  Mor distribute(Obj a, Obj b, Obj c) const {
    Mor h{a * (b + c), a * (b + c), std::vector<std::size_t>(a * (b + c))};
    for (std::size_t i = 0; i < a; ++i)
      for (std::size_t j = 0; j < b + c; ++j) h.table[i * (b + c) + j] = j < b ? i * b + j : a * b + i * c + (j - b);
    return h;
  }
  Mor meas(Obj a, const std::vector<Pred>& rs) const {
    Mor h{a, rs.size(), std::vector<std::size_t>(a)};
    for (std::size_t x = 0; x < a; ++x) {
      int hits = 0;
      for (std::size_t k = 0; k < rs.size(); ++k)
        if (rs[k].at(x)) h.table[x] = k, ++hits;
      require(hits == 1, "meas: predicates do not sum to 1");
    }
    return h;
  }
  bool mor_equal(const Mor& f, const Mor& g) const {
    return f.dom == g.dom && f.cod == g.cod && f.table == g.table;
  }

  Pred p_zero(Obj a) const { return Pred(a, 0); }
  Pred p_one(Obj a) const { return Pred(a, 1); }
  Pred p_orth(const Pred& p) const {
    Pred q(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) q[i] = !p[i];
    return q;
  }
  std::optional<Pred> p_ovee(const Pred& p, const Pred& q) const {
    require(p.size() == q.size(), "ovee: shape mismatch");
    Pred r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] && q[i]) return std::nullopt;
      r[i] = p[i] || q[i];
    }
    return r;
  }
  Pred p_scale(const Pred& s, const Pred& p) const { return to_scalar(s) ? p : p_zero(p.size()); }
  Pred p_const(Obj a, const Rational& q) const {
    if (q != 0 && q != 1) throw Unsupported("set backend: scalar " + to_string(q) + " is not 0 or 1");
    return Pred(a, q == 1);
  }
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
    Pred r(f.dom);
    for (std::size_t x = 0; x < f.dom; ++x) r[x] = q[f.table[x]];
    return r;
  }
  bool p_leq(const Pred& p, const Pred& q) const {
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p[i] && !q[i]) return false;
    return p.size() == q.size();
  }
  bool p_equal(const Pred& p, const Pred& q) const { return p == q; }

  State apply_s(const Mor& f, const State& s) const {
    require(s.of == f.dom, "apply_s: shape mismatch");
    return {f.table.at(s.point), f.cod};
  }
  Scalar validity(const Pred& p, const State& s) const { return p.at(s.point); }
  State pair_states(const State& s, const State& t) const { return {s.point * t.of + t.point, s.of * t.of}; }

  Obj qbit() const { throw Unsupported("set backend has no qubits"); }
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

static_assert(TriangleBackend<SetBackend>);

}  // namespace qpel
