// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. argv[1] is the path of the qpel executable.

#include "qpel/backend_set.hpp"
#include "qpel/backend_stochastic.hpp"
#include "qpel/derivation.hpp"
#include "qpel/distribution.hpp"
#include "qpel/effect_structures.hpp"
#include "qpel/parser.hpp"
#include "qpel/printer.hpp"
#include "qpel/typecheck.hpp"
#include "qpel/wp.hpp"
#include "support/mutants.hpp"
#include "support/random_backend.hpp"
#include "support/random_syntax.hpp"
#include "support/typed_syntax.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

using namespace qpel;

namespace {

using Q = QuantumBackend;
using Matrix = Q::Matrix;

std::string g_cli;

// Collects failures for one criterion; the first few are printed.
struct Outcome {
  std::vector<std::string> failures;
  std::string summary;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string corpus(const std::string& name) { return std::string(QPEL_CORPUS_DIR) + "/" + name; }

SourceFile load(const std::string& name) { return parse(slurp(corpus(name))); }

std::vector<LemmaDecl> lemmas(const SourceFile& f) {
  std::vector<LemmaDecl> out;
  for (const auto& d : f.decls)
    if (const auto* l = std::get_if<LemmaDecl>(&d.body)) out.push_back(*l);
  return out;
}

bool is_mutant(const std::string& n) { return n.size() > 4 && n.substr(n.size() - 4) == "_bad"; }

Context C(const std::string& s) { return parse_context_text("(" + s + ")"); }
EffectPtr E(const std::string& s) { return parse_effect_text(s); }
TermPtr T(const std::string& s) { return parse_term_text(s); }
TypePtr Ty(const std::string& s) { return parse_type_text(s); }

CheckOptions trusting() {
  CheckOptions o;
  o.resolver = trusting_resolver();
  return o;
}

bool mentions_qubits(const Judgement& j) {
  for (const auto& b : j.ctx)
    if (type_mentions_qbit(b.type)) return true;
  return (j.lhs && term_mentions_qubits(j.lhs)) || (j.rhs && term_mentions_qubits(j.rhs)) ||
         (j.elhs && effect_mentions_qubits(j.elhs)) || (j.erhs && effect_mentions_qubits(j.erhs)) ||
         (j.type && type_mentions_qbit(j.type));
}

bool accepted(DerivationChecker& ck, const LemmaDecl& l, const Judgement& goal) {
  try {
    ck.check(l.proofs, goal);
    return true;
  } catch (const ProofError&) {
    return false;
  } catch (const TypeError&) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// 1. Effect-algebra, monoid and module laws

Outcome algebra_laws() {
  Outcome o;
  auto boolean = boolean_monoid();
  Samples<bool> bs{{false, true}};
  auto b1 = check_effect_algebra_laws(boolean.alg, bs);
  b1.append(check_effect_monoid_laws(boolean, bs));
  b1.append(check_effect_module_laws(self_module(boolean), bs, bs));
  o.expect(b1.all_passed(), "boolean: " + b1.text());

  auto chain = check_effect_algebra_laws(three_chain(), Samples<Rational>{three_chain_elements()});
  o.expect(chain.all_passed(), "3-chain: " + chain.text());
  o.expect(chain.find("ovee-assoc") && chain.find("ovee-assoc")->checked == 27, "3-chain not exhaustive");

  auto unit = rational_interval();
  Samples<Rational> random{rational_grid(24), 10000, 3};
  auto r = check_effect_algebra_laws(unit.alg, random);
  r.append(check_effect_monoid_laws(unit, random));
  r.append(check_effect_module_laws(self_module(unit), random, random));
  o.expect(r.all_passed(), "[0,1]: " + r.text());
  o.expect(r.find("ovee-assoc") && r.find("ovee-assoc")->checked >= 10000, "fewer than 10^4 random tuples");

  auto orth = check_effect_algebra_laws(testing::mutant_orth(), Samples<Rational>{rational_grid(24), 10000, 5});
  o.expect(orth.failed() == std::vector<std::string>{"orth-unique"}, "orth mutant: " + orth.text());
  auto min = check_effect_monoid_laws(testing::mutant_min(), Samples<Rational>{rational_grid(24), 10000, 7});
  o.expect(min.failed() == (std::vector<std::string>{"dist-left", "dist-right"}), "min mutant: " + min.text());
  std::vector<std::vector<Rational>> preds;
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; j <= 4; ++j) preds.push_back({Rational(i, 4), Rational(j, 4)});
  auto sq = check_effect_module_laws(testing::mutant_square_action(), Samples<std::vector<Rational>>{preds},
                                     Samples<Rational>{rational_grid(6)});
  o.expect(sq.failed() == std::vector<std::string>{"smul-dist-scalar"}, "square-action mutant: " + sq.text());
  o.summary = "boolean, 3-chain exhaustive; " + std::to_string(r.find("ovee-assoc")->checked) +
              " random [0,1] tuples; mutants rejected by orth-unique, dist-left/dist-right, smul-dist-scalar";
  return o;
}

// ---------------------------------------------------------------------------
// 2. Distribution monad

const DistMonad<Rational> kMonad{rational_interval()};

template <class X>
std::vector<Distribution<X, Rational>> chain_distributions(const std::vector<X>& xs) {
  // Every distribution over xs with weights in {0, 1/2, 1}.
  std::vector<Distribution<X, Rational>> out;
  for (const auto& x : xs) out.push_back(kMonad.unit(x));
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      out.push_back(kMonad.make<X>({{xs[i], Rational(1, 2)}, {xs[j], Rational(1, 2)}}));
  return out;
}

std::vector<int> points(int n) {
  std::vector<int> v;
  for (int i = 0; i < n; ++i) v.push_back(i);
  return v;
}

Outcome monad_laws() {
  using D = Distribution<int, Rational>;
  using DD = Distribution<D, Rational>;
  Outcome o;
  long checks = 0;
  for (int n = 1; n <= 4; ++n) {
    auto ds = chain_distributions(points(n));
    for (const auto& d : ds) {
      o.expect(kMonad.mult(kMonad.unit(d)) == d, "mu . eta /= id");
      o.expect(kMonad.mult(kMonad.map<D>([](int x) { return kMonad.unit(x); }, d)) == d, "mu . D eta /= id");
      checks += 2;
    }
    auto dds = chain_distributions(ds);
    for (const auto& big : chain_distributions(dds)) {
      D lhs = kMonad.mult(kMonad.mult(big));
      D rhs = kMonad.mult(kMonad.map<D>([](const DD& x) { return kMonad.mult(x); }, big));
      o.expect(lhs == rhs, "associativity fails on a carrier of size " + std::to_string(n));
      ++checks;
    }
    for (const auto& phi : ds)
      for (int a = 0; a < n; ++a) {
        auto t = kMonad.strength(a, phi);
        for (int a2 = 0; a2 < n; ++a2)
          for (int b = 0; b < n; ++b)
            o.expect(kMonad.weight(t, std::pair{a2, b}) == (a == a2 ? kMonad.weight(phi, b) : Rational(0)),
                     "strength formula");
        ++checks;
      }
    for (const auto& phi : ds)
      for (const auto& psi : ds) {
        o.expect(kMonad.pair_left_first(phi, psi) == kMonad.pair_right_first(phi, psi), "strength composites differ");
        ++checks;
      }
  }
  o.summary = std::to_string(checks) + " exhaustive checks on carriers of size 1..4 with weights in {0, 1/2, 1}";
  return o;
}

// ---------------------------------------------------------------------------
// 3. Rule inventory, corpus instances and mutated conclusions

const std::vector<std::string> kInventory = {
    "exch", "var", "tensor", "let", "unit", "inl", "inr", "case", "measure", "ref", "sym", "trans", "tensor-eq",
    "let-eq", "inl-eq", "inr-eq", "case-eq", "measure-eq", "beta-tensor", "beta-plus-1", "beta-plus-2",
    "eta-tensor", "eta-unit", "eta-plus", "let-commute", "let-case", "let-tensor", "case-commute",
    "case-tensor", "measure-perm", "measure-0", "measure-1", "measure-plus", "measure-case", "eff-0",
    "eff-bot", "eff-ovee", "eff-mult", "eff-case", "leq-ref", "leq-trans", "zero-leq", "bot-antitone",
    "bot-bot", "leq-ovee", "ovee-mono", "ovee-comm", "perp-rotate", "ovee-assoc", "ovee-0", "ortho-1",
    "ortho-2", "dist-l", "dist-r", "unit-l", "unit-r", "assoc", "comm", "case-cong", "case-mono",
    "beta-plus-1-eff", "beta-plus-2-eff", "eta-plus-eff", "case-ovee", "case-bot", "case-leq", "case-times",
    "qbit-new", "qbit-x", "qbit-z", "qbit-cz", "qbit-proj", "qbit-cz-x", "qbit-cz-z", "qbit-x-proj",
    "qbit-z-proj", "qbit-xx", "qbit-zz", "qbit-xz-zx", "beta-iso"};

// All single-node mutations. Each replaces exactly one subterm; the
// unbound name zz makes a mutant ill-formed wherever it lands.
std::vector<EffectPtr> mutate(const EffectPtr& e);

std::vector<TermPtr> mutate(const TermPtr& t) {
  using K = Term::Kind;
  std::vector<TermPtr> out;
  auto with = [&](auto edit) {
    Term n = *t;
    edit(n);
    out.push_back(std::make_shared<const Term>(std::move(n)));
  };
  switch (t->kind) {
    case K::Var: with([](Term& n) { n.name = "zz"; }); break;
    case K::Inl: with([](Term& n) { n.kind = K::Inr; }); break;
    case K::Inr: with([](Term& n) { n.kind = K::Inl; }); break;
    case K::PauliX: with([](Term& n) { n.kind = K::PauliZ; }); break;
    case K::PauliZ: with([](Term& n) { n.kind = K::PauliX; }); break;
    case K::NewPlus:
      out.push_back(mk::pauli_z(t));
      out.push_back(mk::var("zz"));
      break;
    case K::Unit: out.push_back(mk::var("zz")); break;
    case K::Pair: with([](Term& n) { std::swap(n.a, n.b); }); break;
    case K::LetPair: with([](Term& n) { std::swap(n.x, n.y); }); break;
    case K::Case:
      with([](Term& n) {
        std::swap(n.x, n.y);
        std::swap(n.b, n.c);
      });
      break;
    case K::Measure:
      if (t->branches.size() > 1)
        with([](Term& n) {
          for (std::size_t i = 0; i + 1 < n.branches.size(); ++i) std::swap(n.branches[i].term, n.branches[i + 1].term);
        });
      break;
    case K::CZ: break;
  }
  for (auto slot : {&Term::a, &Term::b, &Term::c})
    if ((*t).*slot)
      for (const auto& m : mutate((*t).*slot)) with([&](Term& n) { n.*slot = m; });
  for (std::size_t i = 0; i < t->branches.size(); ++i) {
    for (const auto& m : mutate(t->branches[i].term)) with([&](Term& n) { n.branches[i].term = m; });
    for (const auto& m : mutate(t->branches[i].effect)) with([&](Term& n) { n.branches[i].effect = m; });
  }
  return out;
}

std::vector<EffectPtr> mutate(const EffectPtr& e) {
  using K = Effect::Kind;
  std::vector<EffectPtr> out;
  auto with = [&](auto edit) {
    Effect n = *e;
    edit(n);
    out.push_back(std::make_shared<const Effect>(std::move(n)));
  };
  switch (e->kind) {
    case K::Zero:
      out.push_back(mk::one());
      out.push_back(mk::proj_plus(mk::var("zz"), Angle(Rational(0))));
      break;
    case K::Bot: out.push_back(e->a); break;
    case K::Scalar:
      out.push_back(mk::scalar(e->value == Rational(1, 2) ? Rational(1, 4) : 1 - e->value));
      out.push_back(mk::one());
      out.push_back(mk::proj_plus(mk::var("zz"), Angle(Rational(0))));
      break;
    case K::ProjPlus: with([](Effect& n) { n.angle = n.angle.shifted(1); }); break;
    case K::Case:
      with([](Effect& n) {
        std::swap(n.x, n.y);
        std::swap(n.a, n.b);
      });
      break;
    case K::Ovee:
    case K::Mult: break;
  }
  for (auto slot : {&Effect::a, &Effect::b})
    if ((*e).*slot)
      for (const auto& m : mutate((*e).*slot)) with([&](Effect& n) { n.*slot = m; });
  if (e->term)
    for (const auto& m : mutate(e->term)) with([&](Effect& n) { n.term = m; });
  return out;
}

std::vector<Judgement> mutate(const Judgement& j) {
  std::vector<Judgement> out;
  auto add = [&](auto edit) {
    Judgement m = j;
    edit(m);
    out.push_back(std::move(m));
  };
  if (j.type) add([](Judgement& m) { m.type = sum_type(m.type, unit_type()); });
  if (j.lhs)
    for (const auto& t : mutate(j.lhs)) add([&](Judgement& m) { m.lhs = t; });
  if (j.rhs)
    for (const auto& t : mutate(j.rhs)) add([&](Judgement& m) { m.rhs = t; });
  if (j.elhs)
    for (const auto& e : mutate(j.elhs)) add([&](Judgement& m) { m.elhs = e; });
  if (j.erhs)
    for (const auto& e : mutate(j.erhs)) add([&](Judgement& m) { m.erhs = e; });
  return out;
}

// A judgement that fails to interpret counts as false.
bool semantically_true(const Judgement& j) {
  try {
    return mentions_qubits(j) ? judgement_true(Q{}, j) : judgement_true(StochasticBackend{}, j);
  } catch (const std::exception&) {
    return false;
  }
}

struct CorpusRun {
  std::map<std::string, int> accepted, rejected;
  int instances = 0, mutants = 0, false_mutants = 0;
  std::vector<std::string> problems;
};

void run_corpus(const std::string& file, DerivationConfig cfg, CorpusRun& run) {
  DerivationChecker ck(cfg);
  for (const auto& l : lemmas(load(file))) {
    const std::string& rule = l.proofs.at(0).rule;
    if (is_mutant(l.name)) {
      if (accepted(ck, l, l.goal))
        run.problems.push_back(l.name + " accepted");
      else
        ++run.rejected[rule];
      continue;
    }
    if (!accepted(ck, l, l.goal)) {
      run.problems.push_back(l.name + " rejected");
      continue;
    }
    ++run.accepted[rule];
    ++run.instances;
    int falsified = 0;
    for (const auto& m : mutate(l.goal)) {
      ++run.mutants;
      if (semantically_true(m)) continue;
      ++falsified;
      ++run.false_mutants;
      if (accepted(ck, l, m)) run.problems.push_back(l.name + " accepts the mutant " + print(m));
    }
    if (falsified == 0) run.problems.push_back(l.name + " has no falsifying mutant");
  }
}

Outcome rule_coverage() {
  Outcome o;
  std::vector<std::string> names;
  for (const auto& r : rule_inventory()) names.emplace_back(r.name);
  o.expect(names == kInventory, "inventory differs from the expected 80 names");

  CorpusRun core, iso;
  run_corpus("rules.qpel", DerivationConfig{}, core);
  run_corpus("mutants.qpel", DerivationConfig{}, core);
  DerivationConfig with_iso;
  with_iso.beta_iso = true;
  run_corpus("beta_iso.qpel", with_iso, iso);
  for (const auto* run : {&core, &iso})
    for (const auto& p : run->problems) o.failures.push_back(p);
  int min_instances = 1 << 30;
  for (const auto& r : rule_inventory()) {
    std::string n(r.name);
    const auto& run = r.pack == RulePack::BetaIso ? iso : core;
    int acc = run.accepted.count(n) ? run.accepted.at(n) : 0;
    min_instances = std::min(min_instances, acc);
    o.expect(acc >= 3, n + ": " + std::to_string(acc) + " accepted instances");
    o.expect(run.rejected.count(n) > 0, n + ": no hand-written mutant rejected");
  }
  o.summary = std::to_string(names.size()) + " rules, >= " + std::to_string(min_instances) +
              " instances each (" + std::to_string(core.instances + iso.instances) + " total); " +
              std::to_string(core.false_mutants + iso.false_mutants) + " falsifying conclusion mutants of " +
              std::to_string(core.mutants + iso.mutants) + " rejected, plus every hand-written mutant";
  return o;
}

// ---------------------------------------------------------------------------
// 4. Soundness of the lemma corpus

template <class Backend>
void verify_lemma(const Backend& b, const LemmaDecl& l, int& checked, int& skipped, Outcome& o) {
  try {
    o.expect(judgement_true(b, l.goal), l.name + " false in " + b.name());
    ++checked;
  } catch (const Unsupported&) {
    ++skipped;
  } catch (const std::exception& e) {
    o.failures.push_back(l.name + " in " + b.name() + ": " + e.what());
  }
}

Outcome soundness() {
  Outcome o;
  DerivationChecker ck;
  int set_c = 0, set_s = 0, st_c = 0, st_s = 0, qu_c = 0, qu_s = 0, qubit_lemmas = 0;
  for (const auto& l : lemmas(load("rules.qpel"))) {
    if (!accepted(ck, l, l.goal)) {
      o.failures.push_back(l.name + " not accepted");
      continue;
    }
    if (mentions_qubits(l.goal)) {
      ++qubit_lemmas;
    } else {
      verify_lemma(SetBackend{}, l, set_c, set_s, o);
      verify_lemma(StochasticBackend{}, l, st_c, st_s, o);
    }
    verify_lemma(Q{}, l, qu_c, qu_s, o);
  }
  o.expect(st_s == 0 && qu_s == 0, "unexpected Unsupported in the stochastic or quantum backend");
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "set %d true (%d outside its scalars), stochastic %d true, quantum %d true; %d qubit lemmas are "
                "quantum only",
                set_c, set_s, st_c, qu_c, qubit_lemmas);
  o.summary = buf;
  return o;
}

// ---------------------------------------------------------------------------
// 5. Linearity and weakening

const std::vector<std::pair<std::string, std::string>> kCloning = {
    {"x : I", "x * x"},
    {"q : qbit", "E q q"},
    {"q : qbit", "X q * q"},
    {"p : qbit * qbit", "let a * b = p in p"},
    {"q : qbit", "let a * b = q * plus in q"},
    {"q : qbit, b : I + I", "case b of inl u -> q * q | inr v -> q * plus"},
    {"b : I + qbit", "case b of inl u -> b | inr v -> inr v"},
    {"q : qbit", "measure { proj(q, 0) -> q | bot(proj(q, 0)) -> plus }"},
    {"q : qbit", "let a * b = E q plus in a * q"},
    {"q : qbit", "inl q * inr q"},
    {"q : qbit", "(let a * b = E (X q) plus in a) * Z q"},
    {"x : I, q : qbit", "case inl q of inl a -> a * q | inr b -> b * plus"},
    {"q : qbit, r : qbit", "E (Z q) (X q) * r"},
};

Outcome linearity() {
  Outcome o;
  for (const auto& [ctx, term] : kCloning) {
    auto r = check_term(C(ctx), T(term), nullptr, trusting());
    o.expect(!r.ok() && std::string(r.error->what()).find("no-cloning") != std::string::npos, term + " not rejected");
  }
  testing::TypedGen gen(12);
  testing::RawGen raw(13);
  int acc = 0, rej = 0;
  for (int i = 0; i < 600; ++i) {
    Context ctx = gen.context(static_cast<int>(gen.pick(3)), 1);
    TermPtr m = i % 2 ? gen.term(ctx, gen.type(1), 3) : raw.term(3);
    auto before = check_term(ctx, m, nullptr, trusting());
    Context wider = ctx;
    wider.insert(wider.begin() + static_cast<long>(gen.pick(ctx.size() + 1)), Binding{"fresh", gen.type(2)});
    auto after = check_term(wider, m, nullptr, trusting());
    o.expect(before.ok() == after.ok(), "weakening changes the verdict on " + print(m));
    if (before.ok() && after.ok()) o.expect(type_equal(before.type, after.type), "weakening changes the type of " + print(m));
    (before.ok() ? acc : rej)++;
  }
  o.expect(acc >= 100 && rej >= 50, "weakening suite too one-sided");
  o.summary = std::to_string(kCloning.size()) + " cloning programs rejected; weakening kept " + std::to_string(acc) +
              " accepted and " + std::to_string(rej) + " rejected terms unchanged";
  return o;
}

// ---------------------------------------------------------------------------
// 6. Semantic substitution lemma

template <class Backend>
int substitution_lemma(const Backend& b, testing::TypedGenConfig cfg, unsigned seed, int want, int max_dim,
                       Outcome& o) {
  testing::TypedGen gen(seed, cfg);
  Interpreter<Backend> in(b);
  int pairs = 0;
  for (int iter = 0; iter < 20 * want && pairs < want; ++iter) {
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
    EffectPtr phi = gen.effect(with_s, 3);
    try {
      auto lift = b.tensor_mor(b.identity(in.object(gamma)), interp_term(b, delta, m, a).mor);
      auto lhs = interp_effect(b, outer, substitute_effect(phi, "s", m)).pred;
      auto rhs = b.apply_p(lift, interp_effect(b, with_s, phi).pred);
      o.expect(b.p_equal(lhs, rhs), std::string(b.name()) + ": " + print(phi) + " with s := " + print(m));
    } catch (const std::exception& e) {
      o.failures.push_back(std::string(b.name()) + ": " + e.what());
    }
    ++pairs;
  }
  o.expect(pairs >= want, std::string(b.name()) + ": only " + std::to_string(pairs) + " pairs");
  return pairs;
}

Outcome substitution() {
  Outcome o;
  testing::TypedGenConfig classical;
  classical.qubits = false;
  testing::TypedGenConfig no_fractions = classical;
  no_fractions.fractions = false;
  testing::TypedGenConfig quantum;
  quantum.max_qubits = 1;
  int s = substitution_lemma(SetBackend{}, no_fractions, 31, 150, 0, o);
  int st = substitution_lemma(StochasticBackend{}, classical, 32, 150, 0, o);
  int q = substitution_lemma(Q{}, quantum, 33, 120, 300, o);
  o.summary = "[M/s]phi = P(1 (x) M)(phi) on " + std::to_string(s) + " set, " + std::to_string(st) +
              " stochastic and " + std::to_string(q) + " quantum pairs";
  return o;
}

// ---------------------------------------------------------------------------
// 7. Qubit identities

Matrix m2(std::complex<double> a, std::complex<double> b, std::complex<double> c, std::complex<double> d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

// vec(U A U*) = (conj(U) (x) U) vec(A) for column-major vec.
Matrix channel_of(const Matrix& u) { return kron(u.conjugate(), u); }

Matrix plus_proj(double turns) {
  std::complex<double> ph = std::polar(1.0, turns * M_PI);
  return 0.5 * m2(1, std::conj(ph), ph, 1);
}

Outcome qubit_identities() {
  Outcome o;
  const Matrix x = m2(0, 1, 1, 0), z = m2(1, 0, 0, -1), id = Matrix::Identity(2, 2);
  Matrix cz = Matrix::Identity(4, 4);
  cz(3, 3) = -1;
  Q q;
  auto one = C("q : qbit");
  auto two = C("q : qbit, r : qbit");
  auto channel = [&](const Context& c, const char* t) { return interp_term(q, c, T(t)).mor.t; };
  auto close = [](const Matrix& a, const Matrix& b) { return (a - b).norm() <= 1e-9; };

  // Channel equalities against unitaries built here.
  o.expect(close(channel(two, "E (X q) r"), channel_of(cz * kron(x, id))), "CZ (X (x) I) channel");
  o.expect(close(channel(two, "let a * c = E q r in X a * Z c"), channel_of(kron(x, z) * cz)), "(X (x) Z) CZ channel");
  o.expect(close(channel(two, "E (Z q) r"), channel_of(cz * kron(z, id))), "CZ (Z (x) I) channel");
  o.expect(close(channel(two, "let a * c = E q r in Z a * c"), channel_of(kron(z, id) * cz)), "(Z (x) I) CZ channel");
  o.expect(close(channel(one, "X (X q)"), channel_of(id)), "XX channel");
  o.expect(close(channel(one, "Z (Z q)"), channel_of(id)), "ZZ channel");
  o.expect(close(channel(one, "X (Z q)"), channel_of(z * x)) && close(channel(one, "Z (X q)"), channel_of(x * z)),
           "XZ / ZX channels");
  o.expect(close(channel_of(x * z), channel_of(z * x)), "XZ and ZX agree up to phase");
  int angles = 0;
  for (int k = 0; k < 8; ++k) {
    std::string a = to_string(Rational(k, 4));
    auto pred = [&](const std::string& e) { return interp_effect(q, one, E(e)).pred[0]; };
    o.expect(close(pred("proj(X q, " + a + ")"), x * plus_proj(k / 4.0) * x), "proj(X q) at " + a);
    o.expect(close(pred("proj(X q, " + a + ")"), plus_proj(-k / 4.0)), "X reflects the angle at " + a);
    o.expect(close(pred("proj(Z q, " + a + ")"), plus_proj(k / 4.0 + 1)), "Z shifts the angle at " + a);
    o.expect(close(pred("proj(X (Z q), " + a + ")"), pred("proj(Z (X q), " + a + ")")), "xz-zx at " + a);
    ++angles;
  }

  // The same rules as one-node derivations in the checker.
  DerivationChecker ck;
  auto depth_one = [&](const char* rule, const Judgement& g) {
    try {
      auto r = ck.check(parse_script_text(rule), g);
      o.expect(r.trees.size() >= 1 && r.trees[0].size() == 1 && judgement_true(q, g),
               std::string(rule) + " is not a true depth-1 derivation");
    } catch (const std::exception& e) {
      o.failures.push_back(std::string(rule) + ": " + e.what());
    }
  };
  depth_one("qbit-cz-x", Judgement::term_eq(two, T("E (X q) r"), T("let a * c = E q r in X a * Z c"), Ty("qbit * qbit")));
  depth_one("qbit-cz-z", Judgement::term_eq(two, T("E (Z q) r"), T("let a * c = E q r in Z a * c"), Ty("qbit * qbit")));
  depth_one("qbit-xx", Judgement::term_eq(one, T("X (X q)"), T("q"), Ty("qbit")));
  depth_one("qbit-zz", Judgement::term_eq(one, T("Z (Z q)"), T("q"), Ty("qbit")));
  for (int k = 0; k < 8; ++k) {
    Angle a(Rational(k, 4));
    std::string s = to_string(a.over_pi());
    depth_one("qbit-x-proj", Judgement::equiv(one, E("proj(X q, " + s + ")"), E("proj(q, " + to_string(a.negated().over_pi()) + ")")));
    depth_one("qbit-z-proj", Judgement::equiv(one, E("proj(Z q, " + s + ")"), E("proj(q, " + to_string(a.shifted(1).over_pi()) + ")")));
    depth_one("qbit-xz-zx", Judgement::equiv(one, E("proj(X (Z q), " + s + ")"), E("proj(Z (X q), " + s + ")")));
  }
  o.summary = "7 rules checked as one-node derivations and as channel or effect equalities (" +
              std::to_string(angles) + " angles for the projection rules)";
  return o;
}

// ---------------------------------------------------------------------------
// 8. Weakest preconditions through the command line

struct Run {
  int code = -1;
  std::string out;
};

std::string quote(const std::string& s) { return "'" + s + "'"; }

Run run_cli(const std::string& args) {
  Run r;
  std::string cmd = quote(g_cli) + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

bool has_measure(const TermPtr& t) {
  if (!t) return false;
  if (t->kind == Term::Kind::Measure) return true;
  return has_measure(t->a) || has_measure(t->b) || has_measure(t->c);
}

Outcome wp_lemma() {
  Outcome o;
  auto file = load("wp.qpel");
  std::map<std::string, TermPtr> progs;
  std::set<std::string> posts;
  for (const auto& d : file.decls) {
    if (const auto* t = std::get_if<TermDecl>(&d.body)) progs[t->name] = t->term;
    if (const auto* e = std::get_if<EffectDecl>(&d.body)) posts.insert(e->name);
  }
  const std::regex dev(R"(max abs deviation: (\S+))");
  int pairs = 0, measured = 0;
  double worst = 0;
  for (const auto& [name, term] : progs) {
    if (name.rfind("prog_", 0) != 0) continue;
    std::string post = "post_" + name.substr(5);
    if (!posts.count(post)) continue;
    Run r = run_cli("wp --cross-check " + quote(corpus("wp.qpel")) + " " + name + " " + post);
    std::smatch m;
    if (r.code != 0 || !std::regex_search(r.out, m, dev)) {
      o.failures.push_back(name + ": exit " + std::to_string(r.code) + "\n" + r.out);
      continue;
    }
    double d = std::stod(m[1]);
    worst = std::max(worst, d);
    o.expect(d <= 1e-9, name + " deviates by " + m[1].str());
    ++pairs;
    if (has_measure(term)) ++measured;
  }
  o.expect(pairs >= 20, "only " + std::to_string(pairs) + " pairs");
  o.expect(measured >= 1, "no measure-containing program");

  Q q;
  testing::RandomQuantum rq(3);
  int ids = 0;
  for (const auto& obj : std::vector<Q::Obj>{{1}, {2}, {4}, {2, 1}, {1, 1}, {2, 2, 1}}) {
    for (int i = 0; i < 10; ++i) {
      auto e = rq.pred(obj);
      o.expect(max_abs_deviation(weakest_precondition(q, q.identity(obj), e), e) <= 1e-9, "wp(id) moves an effect");
      ++ids;
    }
  }
  auto r = wp_of(q, C("x : qbit + I"), T("x"), "y", Ty("qbit + I"),
                 E("caseE y of inl a -> proj(a, 1/3) | inr b -> scalar(1/5)"), true);
  o.expect(r.deviation <= 1e-9, "wp of a variable");
  char buf[200];
  std::snprintf(buf, sizeof buf, "%d pairs through qpel wp --cross-check (%d with measure), max deviation %.3g; wp(id) = id on %d effects",
                pairs, measured, worst, ids);
  o.summary = buf;
  return o;
}

// ---------------------------------------------------------------------------
// 9. The beta-iso pack

Outcome beta_iso() {
  Outcome o;
  DerivationChecker off;
  DerivationConfig cfg;
  cfg.beta_iso = true;
  DerivationChecker on(cfg);
  int instances = 0;
  for (const auto& l : lemmas(load("beta_iso.qpel"))) {
    o.expect(!accepted(off, l, l.goal), l.name + " accepted without the pack");
    if (is_mutant(l.name)) {
      o.expect(!accepted(on, l, l.goal), l.name + " accepted with the pack");
      continue;
    }
    o.expect(accepted(on, l, l.goal), l.name + " rejected with the pack");
    try {
      o.expect(judgement_true(Q{}, l.goal), l.name + " false in the quantum backend");
    } catch (const std::exception& e) {
      o.failures.push_back(l.name + ": " + e.what());
    }
    ++instances;
  }
  o.expect(instances >= 3, "fewer than 3 instances");
  o.summary = std::to_string(instances) + " instances: rejected without the pack, accepted with it, true in quantum";
  return o;
}

// ---------------------------------------------------------------------------
// 10. Round trip

bool decl_alpha_eq(const Decl& a, const Decl& b) {
  if (a.body.index() != b.body.index() || a.name() != b.name()) return false;
  if (auto* t = std::get_if<TermDecl>(&a.body)) {
    auto* u = std::get_if<TermDecl>(&b.body);
    return context_equiv(t->ctx, u->ctx) && type_equal(t->type, u->type) && alpha_eq(t->term, u->term);
  }
  if (auto* e = std::get_if<EffectDecl>(&a.body)) {
    auto* f = std::get_if<EffectDecl>(&b.body);
    return context_equiv(e->ctx, f->ctx) && alpha_eq(e->effect, f->effect);
  }
  if (auto* l = std::get_if<LemmaDecl>(&a.body)) {
    auto* m = std::get_if<LemmaDecl>(&b.body);
    if (l->proofs.size() != m->proofs.size()) return false;
    for (std::size_t i = 0; i < l->proofs.size(); ++i)
      if (print(l->proofs[i]) != print(m->proofs[i])) return false;
    return judgement_eq(l->goal, m->goal);
  }
  if (auto* t = std::get_if<TypeDecl>(&a.body)) return type_equal(t->type, std::get<TypeDecl>(b.body).type);
  return std::get<CheckDecl>(a.body).backend == std::get<CheckDecl>(b.body).backend;
}

Outcome round_trip() {
  Outcome o;
  int files = 0, decls = 0;
  for (const auto& entry : std::filesystem::directory_iterator(QPEL_CORPUS_DIR)) {
    if (entry.path().extension() != ".qpel") continue;
    ++files;
    try {
      SourceFile f = parse(slurp(entry.path()));
      std::string text = print(f);
      SourceFile g = parse(text);
      o.expect(f.decls.size() == g.decls.size(), entry.path().filename().string() + ": declaration count");
      for (std::size_t i = 0; i < std::min(f.decls.size(), g.decls.size()); ++i, ++decls)
        o.expect(decl_alpha_eq(f.decls[i], g.decls[i]), entry.path().filename().string() + ": " + print(f.decls[i]));
      o.expect(print(g) == text, entry.path().filename().string() + ": printing is not a fixpoint");
    } catch (const std::exception& e) {
      o.failures.push_back(entry.path().filename().string() + ": " + e.what());
    }
  }
  testing::RawGen g(23);
  int asts = 0;
  for (int i = 0; i < 1000; ++i) {
    TermPtr t = g.term(4);
    EffectPtr e = g.effect(3);
    TypePtr ty = g.type(3);
    try {
      o.expect(alpha_eq(t, parse_term_text(print(t))), print(t));
      o.expect(alpha_eq(e, parse_effect_text(print(e))), print(e));
      o.expect(type_equal(ty, parse_type_text(print(ty))), print(ty));
    } catch (const std::exception& ex) {
      o.failures.push_back(ex.what());
    }
    asts += 3;
  }
  o.summary = std::to_string(files) + " corpus files (" + std::to_string(decls) + " declarations) and " +
              std::to_string(asts) + " random ASTs";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path to qpel>\n";
    return 2;
  }
  g_cli = argv[1];
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"algebra laws", algebra_laws},         {"monad laws", monad_laws},
      {"rule coverage", rule_coverage},       {"soundness", soundness},
      {"linearity", linearity},               {"substitution lemma", substitution},
      {"qubit identities", qubit_identities}, {"wp lemma", wp_lemma},
      {"beta-iso pack", beta_iso},            {"round trip", round_trip},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.failures.push_back(std::string("uncaught: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = o.failures.empty();
    failed += !ok;
    std::printf("%s criterion %zu (%s): %s [%.1fs]\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.summary.c_str(), secs);
    for (std::size_t k = 0; k < std::min<std::size_t>(o.failures.size(), 5); ++k)
      std::printf("  %s\n", o.failures[k].c_str());
    if (o.failures.size() > 5) std::printf("  ... %zu more\n", o.failures.size() - 5);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed ? 1 : 0;
}
