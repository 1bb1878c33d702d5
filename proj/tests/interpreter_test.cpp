#include "qpel/backend_set.hpp"
#include "qpel/backend_stochastic.hpp"
#include "qpel/derivation.hpp"
#include "qpel/parser.hpp"
#include "qpel/wp.hpp"
#include "support/random_backend.hpp"
#include "support/typed_syntax.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

namespace qpel {
namespace {

using Q = QuantumBackend;
using Matrix = Q::Matrix;

Context C(const std::string& s) { return parse_context_text("(" + s + ")"); }
EffectPtr E(const std::string& s) { return parse_effect_text(s); }
TermPtr T(const std::string& s) { return parse_term_text(s); }
TypePtr Ty(const std::string& s) { return parse_type_text(s); }

SourceFile load(const std::string& name) {
  std::ifstream in(std::string(QPEL_CORPUS_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool is_mutant(const std::string& n) { return n.size() > 4 && n.substr(n.size() - 4) == "_bad"; }

Matrix m2(std::complex<double> a, std::complex<double> b, std::complex<double> c, std::complex<double> d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

// vec(U A U*) = (conj(U) (x) U) vec(A) for column-major vec; independent of
// the backend's own construction.
Matrix channel_of(const Matrix& u) {
  Matrix t(u.rows() * u.rows(), u.rows() * u.rows());
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    for (Eigen::Index j = 0; j < u.cols(); ++j) t.block(i * u.rows(), j * u.rows(), u.rows(), u.rows()) = std::conj(u(i, j)) * u;
  return t;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

const Matrix kX = m2(0, 1, 1, 0);
const Matrix kZ = m2(1, 0, 0, -1);
const Matrix kI = Matrix::Identity(2, 2);

/// |+_a><+_a| with |+_a> = (|0> + e^{i a pi}|1>)/sqrt 2.
Matrix plus_proj(double turns) {
  std::complex<double> ph = std::polar(1.0, turns * M_PI);
  return 0.5 * m2(1, std::conj(ph), ph, 1);
}

// ---------------------------------------------------------------------------
// Worked examples

TEST(Examples, VariableIsIdentity) {
  SetBackend s;
  StochasticBackend st;
  Q q;
  auto ctx = C("x : I + I * (I + I)");
  EXPECT_TRUE(s.mor_equal(interp_term(s, ctx, T("x")).mor, s.identity(3)));
  EXPECT_TRUE(st.mor_equal(interp_term(st, ctx, T("x")).mor, st.identity(3)));
  auto qc = C("x : qbit + I");
  EXPECT_TRUE(q.mor_equal(interp_term(q, qc, T("x")).mor, q.identity({2, 1})));
}

TEST(Examples, FairCoin) {
  StochasticBackend st;
  auto d = interp_term(st, {}, T("measure { scalar(1/2) -> inl unit | scalar(1/2) -> inr unit }"), Ty("I + I"));
  // meas(1/2, 1/2) : I -> 2.I followed by [inl <>, inr <>] is the row (1/2, 1/2).
  ASSERT_EQ(d.mor.dom, 1u);
  ASSERT_EQ(d.mor.cod, 2u);
  EXPECT_EQ(d.mor.at(0, 0), Rational(1, 2));
  EXPECT_EQ(d.mor.at(0, 1), Rational(1, 2));
  EXPECT_EQ(d.backend, "stochastic");
}

TEST(Examples, BiasedCoinBranchesFollowTheirEffects) {
  StochasticBackend st;
  auto d = interp_term(st, {}, T("measure { scalar(1/3) -> inr unit | scalar(2/3) -> inl unit }"), Ty("I + I"));
  EXPECT_EQ(d.mor.at(0, 0), Rational(2, 3));
  EXPECT_EQ(d.mor.at(0, 1), Rational(1, 3));
}

TEST(Examples, PauliXChannel) {
  Q q;
  auto d = interp_term(q, C("x : qbit"), T("X x"));
  EXPECT_LE((d.mor.t - channel_of(kX)).norm(), 1e-12);
  // Choi matrix: sum E_rc (x) X E_rc X.
  Matrix j = Matrix::Zero(4, 4);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      Matrix e = Matrix::Zero(2, 2);
      e(r, c) = 1;
      j += kron(e, kX * e * kX);
    }
  EXPECT_LE((q.choi(d.mor, 0, 0) - j).norm(), 1e-12);
}

TEST(Examples, CaseIndicator) {
  StochasticBackend st;
  auto p = interp_effect(st, C("x : I + I"), E("caseE x of inl u -> 1 | inr v -> 0")).pred;
  EXPECT_EQ(p, (StochasticBackend::Pred{1, 0}));
  SetBackend s;
  auto ps = interp_effect(s, C("x : I + I"), E("caseE x of inl u -> 1 | inr v -> 0")).pred;
  EXPECT_EQ(ps, (SetBackend::Pred{1, 0}));
}

TEST(Examples, CaseEffectKeepsTheOtherVariables) {
  // y : I + I stays available in both branches.
  StochasticBackend st;
  auto p = interp_effect(st, C("y : I + I, x : I + I"),
                         E("caseE x of inl u -> (caseE y of inl a -> 1 | inr b -> 0) | inr v -> scalar(1/2)"))
               .pred;
  // Points of (I+I) (x) (I+I) in order (y, x): (l,l) (l,r) (r,l) (r,r).
  EXPECT_EQ(p, (StochasticBackend::Pred{1, Rational(1, 2), 0, Rational(1, 2)}));
}

TEST(Examples, MinusProjector) {
  Q q;
  auto p = interp_effect(q, C("x : qbit"), E("bot(proj(x, 0))")).pred;
  ASSERT_EQ(p.size(), 1u);
  EXPECT_LE((p[0] - m2(0.5, -0.5, -0.5, 0.5)).norm(), 1e-12);
}

TEST(Examples, TopAndFalseJudgement) {
  StochasticBackend st;
  auto ctx = C("x : I + (I + I)");
  EXPECT_EQ(interp_effect(st, ctx, E("1")).pred, StochasticBackend::Pred(3, 1));
  EXPECT_FALSE(judgement_true(st, Judgement::leq(C("x : I"), E("1"), E("0"))));
  EXPECT_TRUE(judgement_true(st, Judgement::leq(C("x : I"), E("0"), E("1"))));
}

TEST(Examples, MeasureOneInEveryBackend) {
  Judgement j = Judgement::term_eq(C("y : I + I"), T("measure { bot(0) -> y }"), T("y"), Ty("I + I"));
  EXPECT_TRUE(judgement_true(SetBackend{}, j));
  EXPECT_TRUE(judgement_true(StochasticBackend{}, j));
  EXPECT_TRUE(judgement_true(Q{}, j));
}

TEST(Examples, SetBackendRejectsFractionsAndQubits) {
  SetBackend s;
  EXPECT_THROW(interp_effect(s, {}, E("scalar(1/2)")), Unsupported);
  EXPECT_THROW(interp_term(s, {}, T("plus")), Unsupported);
  EXPECT_THROW(interp_effect(StochasticBackend{}, C("x : qbit"), E("proj(x, 0)")), Unsupported);
}

TEST(Examples, ShadowedBinderKeepsTheOuterValue) {
  // The inr branch uses the outer x; the inl branch binds its own x.
  StochasticBackend st;
  auto d = interp_term(st, C("x : I + I, s : I + I"), T("case s of inl x -> inr unit | inr z -> x"));
  // Domain (x, s): (l,l) (l,r) (r,l) (r,r).
  auto expected = StochasticBackend::from_function(4, 2, {1, 0, 1, 1});
  EXPECT_TRUE(st.mor_equal(d.mor, expected));
}

TEST(Examples, LetSwapsThePair) {
  StochasticBackend st;
  auto d = interp_term(st, C("p : (I + I) * (I + (I + I))"), T("let a * b = p in b * a"));
  EXPECT_TRUE(st.mor_equal(d.mor, st.symmetry(2, 3)));
}

TEST(Examples, MeasurementOfAVariable) {
  // measure {is_left -> inr | is_right -> inl} negates a bit.
  StochasticBackend st;
  auto d = interp_term(
      st, C("b : I + I"),
      T("measure { (caseE b of inl u -> 1 | inr v -> 0) -> inr unit | (caseE b of inl u -> 0 | inr v -> 1) -> inl unit }"),
      Ty("I + I"));
  EXPECT_TRUE(st.mor_equal(d.mor, StochasticBackend::from_function(2, 2, {1, 0})));
}

TEST(Examples, ScalarMultiplication) {
  StochasticBackend st;
  auto p = interp_effect(st, C("x : I + I"), E("scalar(1/2) . (caseE x of inl u -> 1 | inr v -> scalar(1/3))")).pred;
  EXPECT_EQ(p, (StochasticBackend::Pred{Rational(1, 2), Rational(1, 6)}));
}

TEST(Examples, UndefinedSumIsASemanticError) {
  StochasticBackend st;
  Interpreter<StochasticBackend> in(st);
  EXPECT_THROW(in.effect({}, mk::ovee(mk::scalar(Rational(2, 3)), mk::scalar(Rational(2, 3)))), SemanticError);
}

// ---------------------------------------------------------------------------
// Qubit identities as channel equalities

TEST(Qubits, CzCommutesPastPaulis) {
  Q q;
  auto ctx = C("q : qbit, r : qbit");
  Matrix cz = Matrix::Identity(4, 4);
  cz(3, 3) = -1;
  auto lhs = interp_term(q, ctx, T("E (X q) r")).mor;
  EXPECT_LE((lhs.t - channel_of(cz * kron(kX, kI))).norm(), 1e-9);
  EXPECT_LE((lhs.t - channel_of(kron(kX, kZ) * cz)).norm(), 1e-9);
  auto rhs = interp_term(q, ctx, T("let a * c = E q r in X a * Z c")).mor;
  EXPECT_TRUE(q.mor_equal(lhs, rhs));
}

TEST(Qubits, SevenEquationalRules) {
  Q q;
  auto one = C("q : qbit");
  auto two = C("q : qbit, r : qbit");
  auto eq = [&](const Context& c, const char* l, const char* r, const char* ty) {
    return judgement_true(q, Judgement::term_eq(c, T(l), T(r), Ty(ty)));
  };
  EXPECT_TRUE(eq(two, "E (X q) r", "let a * c = E q r in X a * Z c", "qbit * qbit"));
  EXPECT_TRUE(eq(two, "E (Z q) r", "let a * c = E q r in Z a * c", "qbit * qbit"));
  EXPECT_TRUE(eq(one, "X (X q)", "q", "qbit"));
  EXPECT_TRUE(eq(one, "Z (Z q)", "q", "qbit"));
  EXPECT_TRUE(eq(one, "X (Z q)", "Z (X q)", "qbit"));
  for (const char* a : {"0", "1/4", "1", "7/4"})
    EXPECT_TRUE(judgement_true(q, Judgement::equiv(one, E(std::string("proj(X (Z q), ") + a + ")"),
                                                  E(std::string("proj(Z (X q), ") + a + ")"))));
  for (int k = 0; k < 8; ++k) {
    Angle a(Rational(k, 4));
    std::string s = to_string(a.over_pi());
    std::string neg = to_string(a.negated().over_pi());
    std::string shifted = to_string(a.shifted(-1).over_pi());
    auto x_proj = Judgement::equiv(one, E("proj(X q, " + s + ")"), E("proj(q, " + neg + ")"));
    auto z_proj = Judgement::equiv(one, E("proj(Z q, " + s + ")"), E("proj(q, " + shifted + ")"));
    EXPECT_TRUE(judgement_true(q, x_proj)) << s;
    EXPECT_TRUE(judgement_true(q, z_proj)) << s;
  }
  EXPECT_FALSE(eq(one, "X (X q)", "X q", "qbit"));
  EXPECT_FALSE(eq(two, "E (Z q) r", "let a * c = E q r in Z a * Z c", "qbit * qbit"));
}

TEST(Qubits, PlusIsTheUniformState) {
  Q q;
  auto d = interp_term(q, {}, T("plus"));
  auto rho = q.apply_s(d.mor, {Matrix::Identity(1, 1)});
  EXPECT_LE((rho[0] - Matrix::Constant(2, 2, 0.5)).norm(), 1e-12);
}

// ---------------------------------------------------------------------------
// Semantic substitution lemma

template <class Backend>
struct SubstitutionRun {
  int terms = 0, effects = 0;
};

// Gamma = g0, g1; Delta = d0; the substituted variable is s. The
// generator's binder pool never produces these names.
template <class Backend>
SubstitutionRun<Backend> substitution_lemma(const Backend& b, testing::TypedGenConfig cfg, unsigned seed, int want,
                                            int max_dim) {
  SubstitutionRun<Backend> run;
  testing::TypedGen gen(seed, cfg);
  Interpreter<Backend> in(b);
  for (int iter = 0; iter < 20 * want && (run.terms < want || run.effects < want); ++iter) {
    Context gamma{{"g0", gen.type(1)}, {"g1", gen.type(1)}};
    Context delta{{"d0", gen.type(1)}};
    TypePtr a = gen.type(1);
    Context outer = gamma;
    outer.insert(outer.end(), delta.begin(), delta.end());
    Context with_s = gamma;
    with_s.push_back({"s", a});
    if constexpr (std::is_same_v<Backend, Q>) {
      if (Q::vec_dim(in.object(outer)) > max_dim || Q::vec_dim(in.object(with_s)) > max_dim) continue;
    }
    TermPtr m = gen.term(delta, a, 2);
    auto fm = interp_term(b, delta, m, a).mor;
    auto lift = b.tensor_mor(b.identity(in.object(gamma)), fm);

    EffectPtr phi = gen.effect(with_s, 3);
    auto lhs = interp_effect(b, outer, substitute_effect(phi, "s", m)).pred;
    auto rhs = b.apply_p(lift, interp_effect(b, with_s, phi).pred);
    EXPECT_TRUE(b.p_equal(lhs, rhs)) << print(phi) << " with s := " << print(m);
    ++run.effects;

    TypePtr c = gen.type(1);
    TermPtr n = gen.term(with_s, c, 2);
    auto tl = interp_term(b, outer, substitute_term(n, "s", m), c).mor;
    auto tr = b.compose(interp_term(b, with_s, n, c).mor, lift);
    EXPECT_TRUE(b.mor_equal(tl, tr)) << print(n) << " with s := " << print(m);
    ++run.terms;
  }
  EXPECT_GE(run.terms, want);
  EXPECT_GE(run.effects, want);
  return run;
}

TEST(Substitution, Set) {
  testing::TypedGenConfig cfg;
  cfg.qubits = false;
  cfg.fractions = false;
  substitution_lemma(SetBackend{}, cfg, 11, 150, 0);
}

TEST(Substitution, Stochastic) {
  testing::TypedGenConfig cfg;
  cfg.qubits = false;
  substitution_lemma(StochasticBackend{}, cfg, 12, 150, 0);
}

TEST(Substitution, Quantum) {
  testing::TypedGenConfig cfg;
  cfg.max_qubits = 1;
  substitution_lemma(Q{}, cfg, 13, 120, 300);
}

// ---------------------------------------------------------------------------
// Properties

TEST(Properties, AlphaEquivalentInputsAgree) {
  StochasticBackend st;
  auto ctx = C("p : (I + I) * (I + I)");
  auto a = interp_term(st, ctx, T("let x * y = p in case x of inl u -> y | inr v -> inl v")).mor;
  auto b = interp_term(st, ctx, T("let a * b = p in case a of inl w -> b | inr z -> inl z")).mor;
  EXPECT_TRUE(st.mor_equal(a, b));
  Q q;
  auto e1 = interp_effect(q, C("r : qbit + I"), E("caseE r of inl x -> proj(x, 1/2) | inr y -> 0")).pred;
  auto e2 = interp_effect(q, C("r : qbit + I"), E("caseE r of inl z -> proj(z, 1/2) | inr w -> 0")).pred;
  EXPECT_TRUE(q.p_equal(e1, e2));
}

TEST(Properties, ValidityIsAdditive) {
  testing::RandomStochastic rs(5);
  StochasticBackend st;
  auto ctx = C("x : I + (I + I)");
  auto phi = E("caseE x of inl u -> scalar(1/3) | inr v -> (caseE v of inl a -> 0 | inr b -> scalar(1/2))");
  auto psi = E("caseE x of inl u -> scalar(1/2) | inr v -> scalar(1/4)");
  auto p = interp_effect(st, ctx, phi).pred, q = interp_effect(st, ctx, psi).pred;
  auto sum = interp_effect(st, ctx, mk::ovee(phi, psi)).pred;
  for (int i = 0; i < 50; ++i) {
    auto s = rs.state(3);
    EXPECT_EQ(st.validity(sum, s), st.validity(p, s) + st.validity(q, s));
  }
  testing::RandomQuantum rq(6);
  Q qb;
  auto qc = C("x : qbit");
  auto qphi = E("scalar(1/3) . proj(x, 1/4)"), qpsi = E("scalar(1/2) . proj(Z x, 1/2)");
  auto qp = interp_effect(qb, qc, qphi).pred, qq = interp_effect(qb, qc, qpsi).pred;
  auto qsum = interp_effect(qb, qc, mk::ovee(qphi, qpsi)).pred;
  for (int i = 0; i < 50; ++i) {
    auto s = rq.state({2});
    EXPECT_NEAR(qb.validity(qsum, s), qb.validity(qp, s) + qb.validity(qq, s), 1e-12);
  }
}

TEST(Properties, DenotationsAreChannels) {
  testing::TypedGenConfig cfg;
  cfg.max_qubits = 1;
  testing::TypedGen gen(21, cfg);
  Q q;
  Interpreter<Q> in(q);
  int seen = 0;
  for (int i = 0; i < 200 && seen < 60; ++i) {
    Context ctx{{"g0", gen.type(1)}, {"g1", gen.type(1)}};
    TypePtr a = gen.type(1);
    if (Q::vec_dim(in.object(ctx)) > 100 || Q::vec_dim(in.object(a)) > 100) continue;
    auto f = interp_term(q, ctx, gen.term(ctx, a, 3), a).mor;
    EXPECT_TRUE(q.is_completely_positive(f));
    EXPECT_TRUE(q.is_trace_preserving(f));
    auto e = interp_effect(q, ctx, gen.effect(ctx, 3)).pred;
    EXPECT_TRUE(q.is_effect(e));
    ++seen;
  }
  EXPECT_GE(seen, 60);
}

// ---------------------------------------------------------------------------
// Soundness over the lemma corpus

bool mentions_qubits(const Judgement& j) {
  for (const auto& b : j.ctx)
    if (type_mentions_qbit(b.type)) return true;
  return (j.lhs && term_mentions_qubits(j.lhs)) || (j.rhs && term_mentions_qubits(j.rhs)) ||
         (j.elhs && effect_mentions_qubits(j.elhs)) || (j.erhs && effect_mentions_qubits(j.erhs)) ||
         type_mentions_qbit(j.type);
}

struct Verdicts {
  int checked = 0, skipped = 0;
};

template <class Backend>
void verify(const Backend& b, const LemmaDecl& l, Verdicts& v) {
  try {
    EXPECT_TRUE(judgement_true(b, l.goal)) << l.name << " in " << b.name() << ": " << print(l.goal);
    ++v.checked;
  } catch (const Unsupported&) {
    ++v.skipped;
  } catch (const std::exception& e) {
    ADD_FAILURE() << l.name << " in " << b.name() << ": " << e.what();
  }
}

TEST(Soundness, RuleCorpusIsTrueEverywhere) {
  DerivationChecker ck;
  Verdicts set, st, qu;
  int qubit_lemmas = 0;
  for (const auto& d : load("rules.qpel").decls) {
    const auto* l = std::get_if<LemmaDecl>(&d.body);
    if (!l || is_mutant(l->name)) continue;
    ASSERT_NO_THROW(ck.check(l->proofs, l->goal)) << l->name;
    if (mentions_qubits(l->goal)) ++qubit_lemmas;
    verify(SetBackend{}, *l, set);
    verify(StochasticBackend{}, *l, st);
    verify(Q{}, *l, qu);
  }
  // Only qubit lemmas are out of reach of the classical backends; the set
  // backend also skips fractional scalars.
  EXPECT_EQ(st.skipped, qubit_lemmas);
  EXPECT_GE(set.skipped, qubit_lemmas);
  EXPECT_GT(set.checked, 100);
  EXPECT_GT(st.checked, 140);
  EXPECT_EQ(qu.skipped, 0);
  EXPECT_EQ(qu.checked, st.checked + st.skipped);
}

TEST(Soundness, BetaIsoInstancesHoldInQuantum) {
  DerivationConfig cfg;
  cfg.beta_iso = true;
  DerivationChecker ck(cfg);
  Verdicts qu;
  for (const auto& d : load("beta_iso.qpel").decls) {
    const auto* l = std::get_if<LemmaDecl>(&d.body);
    if (!l || is_mutant(l->name)) continue;
    ASSERT_NO_THROW(ck.check(l->proofs, l->goal)) << l->name;
    verify(Q{}, *l, qu);
  }
  EXPECT_GE(qu.checked, 3);
}

// ---------------------------------------------------------------------------
// Weakest preconditions

TEST(Wp, IdentityIsIdentity) {
  Q q;
  testing::RandomQuantum rq(3);
  for (const auto& o : std::vector<Q::Obj>{{2}, {2, 1}, {1, 1}, {4}}) {
    auto e = rq.pred(o);
    EXPECT_TRUE(q.p_equal(weakest_precondition(q, q.identity(o), e), e));
  }
}

TEST(Wp, PauliXReflectsTheAngle) {
  Q q;
  for (int k = 0; k < 8; ++k) {
    auto r = wp_of(q, C("x : qbit"), T("X x"), "x", Ty("qbit"), E("proj(x, " + std::to_string(k) + "/4)"), true);
    EXPECT_LE((r.pre[0] - plus_proj(-k / 4.0)).norm(), 1e-12) << k;
    EXPECT_LE(r.deviation, 1e-9);
  }
}

TEST(Wp, PauliZShiftsByPi) {
  Q q;
  auto r = wp_of(q, C("x : qbit"), T("Z x"), "x", Ty("qbit"), E("proj(x, 1/2)"), true);
  EXPECT_LE((r.pre[0] - plus_proj(1.5)).norm(), 1e-12);
  auto fixed = wp_of(q, C("x : qbit"), T("X x"), "x", Ty("qbit"), E("proj(x, 0)"), false);
  EXPECT_LE((fixed.pre[0] - plus_proj(0)).norm(), 1e-12);
}

TEST(Wp, TraceDuality) {
  Q q;
  testing::RandomQuantum rq(8);
  auto f = interp_term(q, C("a : qbit, b : qbit"),
                       T("measure { proj(a, 1/2) -> X b | bot(proj(a, 1/2)) -> Z b }"), Ty("qbit"));
  auto post = interp_effect(q, C("x : qbit"), E("proj(x, 1/4)")).pred;
  auto pre = weakest_precondition(q, f.mor, post);
  for (int i = 0; i < 20; ++i) {
    auto rho = rq.state({4});
    EXPECT_NEAR(q.validity(pre, rho), q.validity(post, q.apply_s(f.mor, rho)), 1e-12);
  }
  EXPECT_THROW(weakest_precondition(q, f.mor, q.p_one({2, 1})), std::invalid_argument);
}

TEST(Wp, CrossCheckOnRandomPairs) {
  testing::TypedGenConfig cfg;
  cfg.max_qubits = 1;
  testing::TypedGen gen(31, cfg);
  Q q;
  Interpreter<Q> in(q);
  int with_measure = 0, total = 0;
  for (int i = 0; i < 400 && total < 60; ++i) {
    Context ctx{{"g0", gen.type(1)}, {"g1", gen.type(1)}};
    TypePtr a = gen.type(1);
    if (Q::vec_dim(in.object(ctx)) > 100) continue;
    TermPtr m = gen.term(ctx, a, 3);
    EffectPtr phi = gen.effect({{"s", a}}, 3);
    auto r = wp_of(q, ctx, m, "s", a, phi, true);
    EXPECT_LE(r.deviation, 1e-9) << print(m) << " / " << print(phi);
    if (print(m).find("measure") != std::string::npos) ++with_measure;
    ++total;
  }
  EXPECT_GE(total, 60);
  EXPECT_GE(with_measure, 5);
}

}  // namespace
}  // namespace qpel
