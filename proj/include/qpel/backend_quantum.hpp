#pragma once
// Quantum backend: finite direct sums of matrix algebras and completely
// positive maps between them.
//
// An object [d1, ..., dk] is the block-diagonal algebra Mat(d1) + ... + Mat(dk).
// A morphism is stored as its transfer matrix acting on the concatenated
// column-major vectorisations of the blocks (Schroedinger picture). The Choi
// matrix of each block pair is recoverable with choi(); the two carry the same
// entries up to a fixed permutation, so Frobenius distances agree.

#include "qpel/triangle.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <complex>

namespace qpel {

class QuantumBackend {
 public:
  using Obj = std::vector<int>;
  using Matrix = Eigen::MatrixXcd;
  using Block = std::vector<Matrix>;
  struct Mor {
    Obj dom{1}, cod{1};
    Matrix t;  // vec_dim(cod) x vec_dim(dom)
  };
  using Pred = Block;
  using State = Block;
  using Scalar = double;

  static constexpr double kTolerance = 1e-9;

  std::string name() const { return "quantum"; }

  // -- vectorisation ---------------------------------------------------------

  static Eigen::Index vec_dim(const Obj& a) {
    Eigen::Index n = 0;
    for (int d : a) n += static_cast<Eigen::Index>(d) * d;
    return n;
  }
  static Eigen::Index offset(const Obj& a, std::size_t block) {
    Eigen::Index n = 0;
    for (std::size_t i = 0; i < block; ++i) n += static_cast<Eigen::Index>(a[i]) * a[i];
    return n;
  }
  static Eigen::VectorXcd to_vec(const Block& b) {
    Eigen::Index n = 0;
    for (const auto& m : b) n += m.size();
    Eigen::VectorXcd v(n);
    Eigen::Index k = 0;
    for (const auto& m : b)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r) v(k++) = m(r, c);
    return v;
  }
  static Block from_vec(const Obj& a, const Eigen::VectorXcd& v) {
    Block b;
    Eigen::Index k = 0;
    for (int d : a) {
      Matrix m(d, d);
      for (Eigen::Index c = 0; c < d; ++c)
        for (Eigen::Index r = 0; r < d; ++r) m(r, c) = v(k++);
      b.push_back(std::move(m));
    }
    return b;
  }
  static Block zero_block(const Obj& a) {
    Block b;
    for (int d : a) b.push_back(Matrix::Zero(d, d));
    return b;
  }
  static Block identity_block(const Obj& a) {
    Block b;
    for (int d : a) b.push_back(Matrix::Identity(d, d));
    return b;
  }

  /// Builds a morphism from its action on the matrix units E_rc of each block.
  template <class F>
  static Mor build(const Obj& dom, const Obj& cod, F on_unit) {
    Mor f{dom, cod, Matrix::Zero(vec_dim(cod), vec_dim(dom))};
    for (std::size_t i = 0; i < dom.size(); ++i)
      for (int c = 0; c < dom[i]; ++c)
        for (int r = 0; r < dom[i]; ++r) f.t.col(offset(dom, i) + c * dom[i] + r) = to_vec(on_unit(i, r, c));
    return f;
  }

  /// f applied to the unit E_rc of input block i.
  Block on_unit(const Mor& f, std::size_t i, int r, int c) const {
    return from_vec(f.cod, f.t.col(offset(f.dom, i) + c * f.dom[i] + r));
  }

  // -- category --------------------------------------------------------------

  Obj unit_obj() const { return {1}; }
  Obj tensor(const Obj& a, const Obj& b) const {
    Obj o;
    for (int x : a)
      for (int y : b) o.push_back(x * y);
    return o;
  }
  Obj coproduct(const Obj& a, const Obj& b) const {
    Obj o = a;
    o.insert(o.end(), b.begin(), b.end());
    return o;
  }
  Obj dom(const Mor& f) const { return f.dom; }
  Obj cod(const Mor& f) const { return f.cod; }

  Mor identity(const Obj& a) const {
    return Mor{a, a, Matrix::Identity(vec_dim(a), vec_dim(a))};
  }
  Mor compose(const Mor& g, const Mor& f) const {
    require(f.cod == g.dom, "compose: codomain/domain mismatch");
    return Mor{f.dom, g.cod, g.t * f.t};
  }
  Mor tensor_mor(const Mor& f, const Mor& g) const {
    const Obj &a = f.dom, &b = g.dom;
    const Obj &a2 = f.cod, &b2 = g.cod;
    return build(tensor(a, b), tensor(a2, b2), [&](std::size_t ij, int r, int c) {
      std::size_t i = ij / b.size(), j = ij % b.size();
      int bj = b[j];
      Block fo = on_unit(f, i, r / bj, c / bj);
      Block go = on_unit(g, j, r % bj, c % bj);
      Block out;
      for (const auto& x : fo)
        for (const auto& y : go) out.push_back(Eigen::kroneckerProduct(x, y));
      return out;
    });
  }
  Mor symmetry(const Obj& a, const Obj& b) const {
    Obj ab = tensor(a, b), ba = tensor(b, a);
    return build(ab, ba, [&](std::size_t ij, int r, int c) {
      std::size_t i = ij / b.size(), j = ij % b.size();
      int bj = b[j], ai = a[i];
      Block out = zero_block(ba);
      out[j * a.size() + i]((r % bj) * ai + r / bj, (c % bj) * ai + c / bj) = 1;
      return out;
    });
  }
  Mor terminal(const Obj& a) const {
    return build(a, unit_obj(), [&](std::size_t, int r, int c) {
      Block out = zero_block(unit_obj());
      out[0](0, 0) = r == c ? 1.0 : 0.0;
      return out;
    });
  }
  Mor inl(const Obj& a, const Obj& b) const { return embed(a, coproduct(a, b), 0); }
  Mor inr(const Obj& a, const Obj& b) const { return embed(b, coproduct(a, b), a.size()); }
  Mor cotuple(const Mor& f, const Mor& g) const {
    require(f.cod == g.cod, "cotuple: codomain mismatch");
    Mor h{coproduct(f.dom, g.dom), f.cod, Matrix(f.t.rows(), f.t.cols() + g.t.cols())};
    h.t << f.t, g.t;
    return h;
  }
  Mor distribute(const Obj& a, const Obj& b, const Obj& c) const {
    Obj src = tensor(a, coproduct(b, c));
    Obj dst = coproduct(tensor(a, b), tensor(a, c));
    std::size_t nb = b.size(), nc = c.size();
    return build(src, dst, [&](std::size_t ij, int r, int col) {
      std::size_t i = ij / (nb + nc), j = ij % (nb + nc);
      std::size_t target = j < nb ? i * nb + j : a.size() * nb + i * nc + (j - nb);
      Block out = zero_block(dst);
      out[target](r, col) = 1;
      return out;
    });
  }
  Mor meas(const Obj& a, const std::vector<Pred>& es) const {
    Pred total = zero_block(a);
    for (const auto& e : es)
      for (std::size_t i = 0; i < a.size(); ++i) total[i] += e.at(i);
    require(block_distance(total, identity_block(a)) <= kTolerance, "meas: effects do not sum to 1");
    Obj out(es.size(), 1);
    return build(a, out, [&](std::size_t i, int r, int c) {
      Block o = zero_block(out);
      for (std::size_t k = 0; k < es.size(); ++k) o[k](0, 0) = es[k][i](c, r);
      return o;
    });
  }
  bool mor_equal(const Mor& f, const Mor& g) const { return distance(f, g) <= kTolerance; }
  double distance(const Mor& f, const Mor& g) const {
    if (f.dom != g.dom || f.cod != g.cod) return INFINITY;
    return (f.t - g.t).norm();
  }

  // -- predicates ------------------------------------------------------------

  Pred p_zero(const Obj& a) const { return zero_block(a); }
  Pred p_one(const Obj& a) const { return identity_block(a); }
  Pred p_orth(const Pred& p) const {
    Pred q;
    for (const auto& m : p) q.push_back(Matrix::Identity(m.rows(), m.cols()) - m);
    return q;
  }
  std::optional<Pred> p_ovee(const Pred& p, const Pred& q) const {
    require(p.size() == q.size(), "ovee: shape mismatch");
    Pred s;
    for (std::size_t i = 0; i < p.size(); ++i) s.push_back(p[i] + q[i]);
    if (!p_leq(s, p_one(shape(s)))) return std::nullopt;
    return s;
  }
  Pred p_scale(const Pred& s, const Pred& p) const {
    double r = to_scalar(s);
    Pred q;
    for (const auto& m : p) q.push_back(r * m);
    return q;
  }
  Pred p_const(const Obj& a, const Rational& q) const {
    Pred p = identity_block(a);
    for (auto& m : p) m *= to_double(q);
    return p;
  }
  Scalar to_scalar(const Pred& p) const {
    require(p.size() == 1 && p[0].rows() == 1, "to_scalar: predicate not on I");
    return p[0](0, 0).real();
  }
  Pred p_copair(const Pred& p, const Pred& q) const {
    Pred r = p;
    r.insert(r.end(), q.begin(), q.end());
    return r;
  }
  /// Heisenberg picture: the unique e' with Tr(e' rho) = Tr(e f(rho)).
  Pred apply_p(const Mor& f, const Pred& e) const {
    require(shape(e) == f.cod, "apply_p: shape mismatch");
    return from_vec(f.dom, f.t.adjoint() * to_vec(e));
  }
  bool p_leq(const Pred& p, const Pred& q) const {
    if (p.size() != q.size()) return false;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (min_eigenvalue(q[i] - p[i]) < -kTolerance) return false;
    return true;
  }
  bool p_equal(const Pred& p, const Pred& q) const { return block_distance(p, q) <= kTolerance; }
  bool is_effect(const Pred& p) const { return p_leq(p_zero(shape(p)), p) && p_leq(p, p_one(shape(p))); }

  // -- states ----------------------------------------------------------------

  State apply_s(const Mor& f, const State& s) const {
    require(shape(s) == f.dom, "apply_s: shape mismatch");
    return from_vec(f.cod, f.t * to_vec(s));
  }
  Scalar validity(const Pred& e, const State& s) const {
    std::complex<double> v = 0;
    for (std::size_t i = 0; i < e.size(); ++i) v += (e[i] * s.at(i)).trace();
    return v.real();
  }
  State pair_states(const State& s, const State& t) const {
    State r;
    for (const auto& x : s)
      for (const auto& y : t) r.push_back(Eigen::kroneckerProduct(x, y));
    return r;
  }
  bool is_density(const State& s) const {
    std::complex<double> tr = 0;
    for (const auto& m : s) {
      if (min_eigenvalue(m) < -kTolerance) return false;
      tr += m.trace();
    }
    return std::abs(tr - 1.0) <= kTolerance;
  }

  // -- qubits ----------------------------------------------------------------

  Obj qbit() const { return {2}; }
  Mor new_plus() const {
    return build(unit_obj(), qbit(), [&](std::size_t, int, int) {
      return Block{Matrix::Constant(2, 2, 0.5)};
    });
  }
  Mor pauli_x() const {
    Matrix u(2, 2);
    u << 0, 1, 1, 0;
    return unitary(u);
  }
  Mor pauli_z() const {
    Matrix u(2, 2);
    u << 1, 0, 0, -1;
    return unitary(u);
  }
  Mor cz() const {
    Matrix u = Matrix::Identity(4, 4);
    u(3, 3) = -1;
    return unitary(u);
  }
  /// The projector onto (|0> + e^{i a}|1>)/sqrt 2.
  Pred proj_plus(const Angle& a) const {
    const std::complex<double> ph = std::polar(1.0, a.radians());
    Matrix m(2, 2);
    m << 0.5, 0.5 * std::conj(ph), 0.5 * ph, 0.5;
    return {m};
  }

  /// rho -> U rho U^dagger on a single block.
  Mor unitary(const Matrix& u) const {
    Obj a{static_cast<int>(u.rows())};
    return build(a, a, [&](std::size_t, int r, int c) { return Block{u.col(r) * u.col(c).adjoint()}; });
  }

  // -- diagnostics -----------------------------------------------------------

  /// Choi matrix sum_rc E_rc (x) f(E_rc) restricted to an input/output block pair.
  Matrix choi(const Mor& f, std::size_t in_block, std::size_t out_block) const {
    int d = f.dom[in_block], e = f.cod[out_block];
    Matrix j = Matrix::Zero(d * e, d * e);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) j.block(r * e, c * e, e, e) = on_unit(f, in_block, r, c)[out_block];
    return j;
  }
  bool is_completely_positive(const Mor& f) const {
    for (std::size_t i = 0; i < f.dom.size(); ++i)
      for (std::size_t k = 0; k < f.cod.size(); ++k)
        if (min_eigenvalue(choi(f, i, k)) < -kTolerance) return false;
    return true;
  }
  bool is_trace_preserving(const Mor& f) const {
    return distance(compose(terminal(f.cod), f), terminal(f.dom)) <= kTolerance;
  }

  static Obj shape(const Block& b) {
    Obj o;
    for (const auto& m : b) o.push_back(static_cast<int>(m.rows()));
    return o;
  }
  static double block_distance(const Block& p, const Block& q) {
    if (shape(p) != shape(q)) return INFINITY;
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - q[i]).squaredNorm();
    return std::sqrt(s);
  }
  static double min_eigenvalue(const Matrix& m) {
    if (m.rows() == 0) return 0;
    Matrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

 private:
  Mor embed(const Obj& a, const Obj& target, std::size_t first) const {
    return build(a, target, [&](std::size_t i, int r, int c) {
      Block out = zero_block(target);
      out[first + i](r, c) = 1;
      return out;
    });
  }
  static void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  }
};

static_assert(TriangleBackend<QuantumBackend>);

}  // namespace qpel
