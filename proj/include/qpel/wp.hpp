#pragma once
// Weakest preconditions of quantum programs: the Heisenberg adjoint of the
// channel, i.e. the unique P with Tr(P rho) = Tr(Q f(rho)) for every rho.

#include "qpel/backend_quantum.hpp"
#include "qpel/interpreter.hpp"

#include <algorithm>
#include <cmath>

namespace qpel {

inline QuantumBackend::Pred weakest_precondition(const QuantumBackend& q, const QuantumBackend::Mor& f,
                                                 const QuantumBackend::Pred& post) {
  if (QuantumBackend::shape(post) != f.cod) throw std::invalid_argument("wp: postcondition does not match the codomain");
  return q.apply_p(f, post);
}

struct WpResult {
  QuantumBackend::Pred pre;
  std::optional<QuantumBackend::Pred> substituted;  // [[ [M/x]phi ]] when cross-checked
  double deviation = 0;                             // max absolute entry difference
};

inline double max_abs_deviation(const QuantumBackend::Block& a, const QuantumBackend::Block& b) {
  if (QuantumBackend::shape(a) != QuantumBackend::shape(b)) return INFINITY;
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].size() > 0) d = std::max(d, (a[i] - b[i]).cwiseAbs().maxCoeff());
  return d;
}

/// wp([[Gamma |- M : A]])([[x : A |- phi]]), optionally compared with
/// [[Gamma |- [M/x]phi]]. phi may mention no variable but x.
inline WpResult wp_of(const QuantumBackend& q, const Context& ctx, const TermPtr& m, const std::string& x,
                      const TypePtr& a, const EffectPtr& phi, bool cross_check) {
  auto f = interp_term(q, ctx, m, a);
  auto post = interp_effect(q, Context{{x, f.type}}, phi);
  WpResult r{weakest_precondition(q, f.mor, post.pred), std::nullopt, 0};
  if (cross_check) {
    r.substituted = interp_effect(q, ctx, substitute_effect(phi, x, m)).pred;
    r.deviation = max_abs_deviation(r.pre, *r.substituted);
  }
  return r;
}

}  // namespace qpel
