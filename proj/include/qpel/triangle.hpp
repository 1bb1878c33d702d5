#pragma once
// The state-and-effect triangle interface shared by the set, stochastic and
// quantum backends, plus generic constructions built from its primitives.
//
// Every backend represents objects so that the monoidal structure is strict:
// I (x) A and A (x) I are literally A, and (A (x) B) (x) C is A (x) (B (x) C).
// The same holds for coproducts. Only the symmetry is a non-trivial iso.

#include "qpel/rational.hpp"

#include <concepts>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpel {

/// Raised when a backend lacks a primitive (e.g. qubits in the set backend).
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class B>
concept TriangleBackend = requires(const B& b, const typename B::Obj& o, const typename B::Mor& f,
                                   const typename B::Pred& p, const typename B::State& s,
                                   const std::vector<typename B::Pred>& ps, const Rational& q, const Angle& a) {
  { b.name() } -> std::convertible_to<std::string>;
  { b.unit_obj() } -> std::same_as<typename B::Obj>;
  { b.tensor(o, o) } -> std::same_as<typename B::Obj>;
  { b.coproduct(o, o) } -> std::same_as<typename B::Obj>;
  { b.dom(f) } -> std::same_as<typename B::Obj>;
  { b.cod(f) } -> std::same_as<typename B::Obj>;
  { b.identity(o) } -> std::same_as<typename B::Mor>;
  { b.compose(f, f) } -> std::same_as<typename B::Mor>;
  { b.tensor_mor(f, f) } -> std::same_as<typename B::Mor>;
  { b.symmetry(o, o) } -> std::same_as<typename B::Mor>;
  { b.terminal(o) } -> std::same_as<typename B::Mor>;
  { b.inl(o, o) } -> std::same_as<typename B::Mor>;
  { b.inr(o, o) } -> std::same_as<typename B::Mor>;
  { b.cotuple(f, f) } -> std::same_as<typename B::Mor>;
  { b.distribute(o, o, o) } -> std::same_as<typename B::Mor>;
  { b.meas(o, ps) } -> std::same_as<typename B::Mor>;
  { b.mor_equal(f, f) } -> std::same_as<bool>;
  { b.p_zero(o) } -> std::same_as<typename B::Pred>;
  { b.p_one(o) } -> std::same_as<typename B::Pred>;
  { b.p_orth(p) } -> std::same_as<typename B::Pred>;
  { b.p_ovee(p, p) } -> std::same_as<std::optional<typename B::Pred>>;
  { b.p_scale(p, p) } -> std::same_as<typename B::Pred>;
  { b.p_const(o, q) } -> std::same_as<typename B::Pred>;
  { b.to_scalar(p) } -> std::same_as<typename B::Scalar>;
  { b.p_copair(p, p) } -> std::same_as<typename B::Pred>;
  { b.apply_p(f, p) } -> std::same_as<typename B::Pred>;
  { b.p_leq(p, p) } -> std::same_as<bool>;
  { b.p_equal(p, p) } -> std::same_as<bool>;
  { b.apply_s(f, s) } -> std::same_as<typename B::State>;
  { b.validity(p, s) } -> std::same_as<typename B::Scalar>;
  { b.pair_states(s, s) } -> std::same_as<typename B::State>;
  { b.qbit() } -> std::same_as<typename B::Obj>;
  { b.new_plus() } -> std::same_as<typename B::Mor>;
  { b.pauli_x() } -> std::same_as<typename B::Mor>;
  { b.pauli_z() } -> std::same_as<typename B::Mor>;
  { b.cz() } -> std::same_as<typename B::Mor>;
  { b.proj_plus(a) } -> std::same_as<typename B::Pred>;
};

// ---------------------------------------------------------------------------
// Generic constructions

template <TriangleBackend B>
typename B::Obj tensor_all(const B& b, const std::vector<typename B::Obj>& objs) {
  typename B::Obj acc = b.unit_obj();
  for (const auto& o : objs) acc = b.tensor(acc, o);
  return acc;
}

template <TriangleBackend B>
typename B::Mor tensor_mors(const B& b, const std::vector<typename B::Mor>& fs) {
  typename B::Mor acc = b.identity(b.unit_obj());
  for (const auto& f : fs) acc = b.tensor_mor(acc, f);
  return acc;
}

/// n . I as the n-fold coproduct of the unit.
template <TriangleBackend B>
typename B::Obj copies(const B& b, const typename B::Obj& o, std::size_t n) {
  if (n == 0) throw std::invalid_argument("copies: n must be positive");
  typename B::Obj acc = o;
  for (std::size_t i = 1; i < n; ++i) acc = b.coproduct(acc, o);
  return acc;
}

/// [f1, ..., fn] : A1 + ... + An -> C, with the coproduct associated left.
template <TriangleBackend B>
typename B::Mor cotuple_all(const B& b, const std::vector<typename B::Mor>& fs) {
  if (fs.empty()) throw std::invalid_argument("cotuple of no morphisms");
  typename B::Mor acc = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) acc = b.cotuple(acc, fs[i]);
  return acc;
}

/// The i-th injection (0-based) into n . A.
template <TriangleBackend B>
typename B::Mor injection(const B& b, const typename B::Obj& a, std::size_t i, std::size_t n) {
  typename B::Mor f = b.identity(a);
  typename B::Obj acc = a;
  if (i > 0) {
    acc = copies(b, a, i);
    f = b.inr(acc, a);
    acc = b.coproduct(acc, a);
  }
  for (std::size_t k = i + 1; k < n; ++k) {
    f = b.compose(b.inl(acc, a), f);
    acc = b.coproduct(acc, a);
  }
  return f;
}

/// Reorders tensor factors: the result has factors objs[order[0]], objs[order[1]], ...
/// Built from adjacent symmetries only.
template <TriangleBackend B>
typename B::Mor permute_factors(const B& b, const std::vector<typename B::Obj>& objs,
                                const std::vector<std::size_t>& order) {
  std::vector<std::size_t> cur(objs.size());
  for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = i;
  typename B::Mor acc = b.identity(tensor_all(b, objs));
  // Selection by adjacent swaps: bring order[k] to position k.
  for (std::size_t k = 0; k < order.size(); ++k) {
    std::size_t pos = k;
    while (cur[pos] != order[k]) ++pos;
    while (pos > k) {
      std::vector<typename B::Obj> before, after;
      for (std::size_t j = 0; j + 1 < pos; ++j) before.push_back(objs[cur[j]]);
      for (std::size_t j = pos + 1; j < cur.size(); ++j) after.push_back(objs[cur[j]]);
      typename B::Mor swap = b.tensor_mor(b.tensor_mor(b.identity(tensor_all(b, before)),
                                                       b.symmetry(objs[cur[pos - 1]], objs[cur[pos]])),
                                          b.identity(tensor_all(b, after)));
      acc = b.compose(swap, acc);
      std::swap(cur[pos - 1], cur[pos]);
      --pos;
    }
  }
  return acc;
}

/// The map n . I -> n . I sending outcome p(i) to outcome i (1-based p).
template <TriangleBackend B>
typename B::Mor outcome_permutation(const B& b, const std::vector<int>& p) {
  std::size_t n = p.size();
  std::vector<typename B::Mor> legs(n);
  auto inv = std::vector<std::size_t>(n);
  for (std::size_t i = 0; i < n; ++i) inv[static_cast<std::size_t>(p[i] - 1)] = i;
  for (std::size_t j = 0; j < n; ++j) legs[j] = injection(b, b.unit_obj(), inv[j], n);
  return cotuple_all(b, legs);
}

}  // namespace qpel
