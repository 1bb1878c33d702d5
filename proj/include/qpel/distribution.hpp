#pragma once
// Finitely supported distributions with weights in an effect monoid E, and
// the monad structure (unit, map, multiplication, strength) on them.

#include "qpel/effect_structures.hpp"

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qpel {

template <class X, class E>
struct Distribution {
  std::map<X, E> weights;  // zero weights are never stored

  bool operator==(const Distribution& o) const { return weights == o.weights; }
  bool operator<(const Distribution& o) const { return weights < o.weights; }
};

template <class E>
class DistMonad {
 public:
  explicit DistMonad(EffectMonoid<E> m) : m_(std::move(m)) {}

  const EffectMonoid<E>& scalars() const { return m_; }

  template <class X>
  E weight(const Distribution<X, E>& d, const X& x) const {
    auto it = d.weights.find(x);
    return it == d.weights.end() ? m_.alg.zero : it->second;
  }

  /// Total mass, undefined when the weights are not summable.
  template <class X>
  std::optional<E> mass(const Distribution<X, E>& d) const {
    std::optional<E> acc = m_.alg.zero;
    for (const auto& [x, w] : d.weights) {
      acc = m_.alg.ovee(*acc, w);
      if (!acc) return std::nullopt;
    }
    return acc;
  }

  template <class X>
  bool is_distribution(const Distribution<X, E>& d) const {
    auto s = mass(d);
    return s && m_.alg.eq(*s, m_.alg.one());
  }

  /// Builds a distribution from weighted points, merging repeats.
  template <class X>
  Distribution<X, E> make(const std::vector<std::pair<X, E>>& points) const {
    Distribution<X, E> d;
    for (const auto& [x, w] : points) add(d, x, w);
    return d;
  }

  template <class X>
  Distribution<X, E> unit(const X& a) const {
    Distribution<X, E> d;
    d.weights.emplace(a, m_.alg.one());
    return d;
  }

  template <class Y, class X, class F>
  Distribution<Y, E> map(F f, const Distribution<X, E>& d) const {
    Distribution<Y, E> out;
    for (const auto& [x, w] : d.weights) add(out, Y(f(x)), w);
    return out;
  }

  template <class X>
  Distribution<X, E> mult(const Distribution<Distribution<X, E>, E>& big) const {
    Distribution<X, E> out;
    for (const auto& [inner, w] : big.weights)
      for (const auto& [x, v] : inner.weights) add(out, x, m_.mul(w, v));
    return out;
  }

  /// Kleisli extension: mult after map.
  template <class Y, class X, class F>
  Distribution<Y, E> bind(const Distribution<X, E>& d, F f) const {
    Distribution<Y, E> out;
    for (const auto& [x, w] : d.weights) {
      Distribution<Y, E> k = f(x);
      for (const auto& [y, v] : k.weights) add(out, y, m_.mul(w, v));
    }
    return out;
  }

  /// t(a, phi)(a', b) = phi(b) if a = a', else 0.
  template <class A, class B>
  Distribution<std::pair<A, B>, E> strength(const A& a, const Distribution<B, E>& phi) const {
    Distribution<std::pair<A, B>, E> out;
    for (const auto& [b, w] : phi.weights) add(out, std::pair<A, B>(a, b), w);
    return out;
  }

  /// The mirror strength t'(phi, b)(a, b') = phi(a) if b = b'.
  template <class A, class B>
  Distribution<std::pair<A, B>, E> costrength(const Distribution<A, E>& phi, const B& b) const {
    Distribution<std::pair<A, B>, E> out;
    for (const auto& [a, w] : phi.weights) add(out, std::pair<A, B>(a, b), w);
    return out;
  }

  /// Double strength sequencing the left argument first.
  template <class A, class B>
  Distribution<std::pair<A, B>, E> pair_left_first(const Distribution<A, E>& phi, const Distribution<B, E>& psi) const {
    return bind<std::pair<A, B>>(phi, [&](const A& a) { return strength(a, psi); });
  }

  /// Double strength sequencing the right argument first.
  template <class A, class B>
  Distribution<std::pair<A, B>, E> pair_right_first(const Distribution<A, E>& phi, const Distribution<B, E>& psi) const {
    return bind<std::pair<A, B>>(psi, [&](const B& b) { return costrength(phi, b); });
  }

 private:
  template <class X>
  void add(Distribution<X, E>& d, const X& x, const E& w) const {
    if (m_.alg.eq(w, m_.alg.zero)) return;
    auto it = d.weights.find(x);
    if (it == d.weights.end()) {
      d.weights.emplace(x, w);
      return;
    }
    auto s = m_.alg.ovee(it->second, w);
    if (!s) throw std::domain_error("distribution weights are not summable");
    it->second = *s;
  }

  EffectMonoid<E> m_;
};

}  // namespace qpel
