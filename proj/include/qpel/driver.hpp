#pragma once
// The command-line pipeline: parse, typecheck, check lemmas, verify in
// backends, evaluate closed terms and compute weakest preconditions.
// Reports are plain data; formatting is deterministic.

#include "qpel/backend_quantum.hpp"
#include "qpel/backend_set.hpp"
#include "qpel/backend_stochastic.hpp"
#include "qpel/derivation.hpp"
#include "qpel/interpreter.hpp"
#include "qpel/parser.hpp"
#include "qpel/wp.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace qpel {

enum ExitCode : int { kOk = 0, kUsage = 1, kParse = 2, kType = 3, kProof = 4, kSemantic = 5 };

inline const char* status_name(int code) {
  switch (code) {
    case kOk:
      return "ok";
    case kParse:
      return "parse error";
    case kType:
      return "type error";
    case kProof:
      return "proof error";
    case kSemantic:
      return "semantic mismatch";
    default:
      return "error";
  }
}

/// Combines failures: the earliest pipeline stage wins.
inline int worse(int a, int b) {
  if (a == kOk) return b;
  if (b == kOk) return a;
  return std::min(a, b);
}

struct DeclReport {
  std::string kind;  // type, term, effect, lemma, check
  std::string name;
  int code = kOk;
  std::string message;
  std::vector<std::string> rules;                // lemmas: rules used
  std::vector<std::pair<std::string, std::string>> verify;  // backend -> true/false/ok/skipped (...)
  std::string output;                            // check declarations
  nlohmann::json counterexample;                 // null unless a backend disagreed
  double millis = 0;
};

struct FileReport {
  std::string path;
  int code = kOk;
  std::string message;  // file-level parse error
  std::vector<DeclReport> decls;
  double millis = 0;
};

struct RunReport {
  std::vector<FileReport> files;
  int exit_code = kOk;
};

struct CheckFlags {
  std::vector<std::string> verify;  // backend names
  DerivationConfig rules;
  bool timing = false;
};

// ---------------------------------------------------------------------------
// Formatting of denotations

/// Labels of the points of [[A]] in the classical backends, in backend order.
inline std::vector<std::string> point_labels(const TypePtr& t) {
  switch (t->kind) {
    case Type::Kind::Tensor: {
      std::vector<std::string> out;
      for (const auto& a : point_labels(t->left))
        for (const auto& b : point_labels(t->right)) out.push_back("(" + a + ", " + b + ")");
      return out;
    }
    case Type::Kind::Sum: {
      auto wrap = [](const std::string& tag, const std::string& l) { return tag + (l == "<>" ? l : "(" + l + ")"); };
      std::vector<std::string> out;
      for (const auto& a : point_labels(t->left)) out.push_back(wrap("inl", a));
      for (const auto& b : point_labels(t->right)) out.push_back(wrap("inr", b));
      return out;
    }
    case Type::Kind::Qbit:
      throw Unsupported("qubits have no classical points");
    default:
      return {"<>"};
  }
}

inline std::vector<std::string> point_labels(const Context& ctx) {
  std::vector<std::string> out{""};
  for (const auto& b : ctx) {
    std::vector<std::string> next;
    for (const auto& prefix : out)
      for (const auto& l : point_labels(b.type)) next.push_back(prefix + (prefix.empty() ? "" : ", ") + b.name + "=" + l);
    out = std::move(next);
  }
  if (ctx.empty()) out = {"<>"};
  return out;
}

inline std::string format_number(double v) {
  if (std::abs(v) < 5e-13) v = 0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string format_complex(std::complex<double> z) {
  double re = std::abs(z.real()) < 5e-13 ? 0 : z.real();
  double im = std::abs(z.imag()) < 5e-13 ? 0 : z.imag();
  if (im == 0) return format_number(re);
  if (re == 0) return format_number(im) + "i";
  return format_number(re) + (im < 0 ? "-" : "+") + format_number(std::abs(im)) + "i";
}

inline std::string format_matrix(const QuantumBackend::Matrix& m) {
  std::string s = "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    s += r ? ",[" : "[";
    for (Eigen::Index c = 0; c < m.cols(); ++c) s += (c ? "," : "") + format_complex(m(r, c));
    s += "]";
  }
  return s + "]";
}

/// Block-diagonal data: one matrix per block, joined with " (+) ".
inline std::string format_blocks(const QuantumBackend::Block& b) {
  std::string s;
  for (std::size_t i = 0; i < b.size(); ++i) s += (i ? " (+) " : "") + format_matrix(b[i]);
  return s;
}

inline std::string format_distribution(const std::vector<std::string>& labels, const std::vector<Rational>& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0) continue;
    s += (s.empty() ? "" : ", ") + labels[i] + " : " + to_string(w[i]);
  }
  return s;
}

/// Predicates on classical points: "label : value" for every point.
inline std::string format_pred(const std::vector<std::string>& labels, const std::vector<Rational>& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + labels[i] + " : " + to_string(p[i]);
  return s;
}

inline std::vector<Rational> to_rationals(const SetBackend::Pred& p) {
  return std::vector<Rational>(p.begin(), p.end());
}

// ---------------------------------------------------------------------------
// Evaluation of closed terms

/// The printed S([[A]])-level value of a closed term.
inline std::string eval_closed(const std::string& backend, const Context& ctx, const TermPtr& m, const TypePtr& a) {
  if (!ctx.empty()) throw SemanticError("eval needs a closed term, this one has context " + print(ctx));
  if (backend == "set") {
    SetBackend b;
    auto d = interp_term(b, ctx, m, a);
    return point_labels(d.type).at(b.apply_s(d.mor, {0, 1}).point);
  }
  if (backend == "stochastic") {
    StochasticBackend b;
    auto d = interp_term(b, ctx, m, a);
    return format_distribution(point_labels(d.type), b.apply_s(d.mor, {Rational(1)}));
  }
  if (backend == "quantum") {
    QuantumBackend b;
    auto d = interp_term(b, ctx, m, a);
    return format_blocks(b.apply_s(d.mor, {QuantumBackend::Matrix::Identity(1, 1)}));
  }
  throw std::invalid_argument("unknown backend '" + backend + "'");
}

// ---------------------------------------------------------------------------
// Verification of declarations in one backend

namespace detail {

struct Verdict {
  std::string status;  // true, false, ok, skipped (...)
  nlohmann::json counterexample;
};

inline bool judgement_mentions_qubits(const Judgement& j) {
  for (const auto& b : j.ctx)
    if (type_mentions_qbit(b.type)) return true;
  return (j.lhs && term_mentions_qubits(j.lhs)) || (j.rhs && term_mentions_qubits(j.rhs)) ||
         (j.elhs && effect_mentions_qubits(j.elhs)) || (j.erhs && effect_mentions_qubits(j.erhs)) ||
         (j.type && type_mentions_qbit(j.type));
}

template <class Backend>
std::string describe_pred(const Backend& b, const Context& ctx, const typename Backend::Pred& p) {
  if constexpr (std::is_same_v<Backend, QuantumBackend>) {
    (void)b, (void)ctx;
    return format_blocks(p);
  } else if constexpr (std::is_same_v<Backend, SetBackend>) {
    return format_pred(point_labels(ctx), to_rationals(p));
  } else {
    return format_pred(point_labels(ctx), p);
  }
}

template <class Backend>
std::string describe_mor(const Backend& b, const Context& ctx, const TypePtr& a, const typename Backend::Mor& f) {
  if constexpr (std::is_same_v<Backend, QuantumBackend>) {
    (void)b, (void)ctx, (void)a;
    return format_matrix(f.t);
  } else {
    auto in = point_labels(ctx);
    auto out = point_labels(a);
    std::string s;
    for (std::size_t x = 0; x < in.size(); ++x) {
      std::vector<Rational> row(out.size(), Rational(0));
      if constexpr (std::is_same_v<Backend, SetBackend>)
        row[f.table[x]] = 1;
      else
        for (std::size_t y = 0; y < out.size(); ++y) row[y] = f.at(x, y);
      s += (x ? "; " : "") + in[x] + " |-> " + format_distribution(out, row);
    }
    return s;
  }
}

template <class Backend>
Verdict verify_judgement(const Backend& b, const Judgement& j) {
  Interpreter<Backend> in(b);
  switch (j.kind) {
    case Judgement::Kind::Typing:
      in.term(j.ctx, elaborate_term(j.ctx, j.lhs, j.type).term);
      return {"ok", nullptr};
    case Judgement::Kind::EffFormation:
      in.effect(j.ctx, elaborate_effect(j.ctx, j.elhs));
      return {"ok", nullptr};
    case Judgement::Kind::TermEq: {
      auto f = in.term(j.ctx, elaborate_term(j.ctx, j.lhs, j.type).term).first;
      auto g = in.term(j.ctx, elaborate_term(j.ctx, j.rhs, j.type).term).first;
      if (b.mor_equal(f, g)) return {"true", nullptr};
      return {"false", {{"backend", b.name()},
                        {"lhs", describe_mor(b, j.ctx, j.type, f)},
                        {"rhs", describe_mor(b, j.ctx, j.type, g)}}};
    }
    default: {
      auto p = in.effect(j.ctx, elaborate_effect(j.ctx, j.elhs));
      auto q = in.effect(j.ctx, elaborate_effect(j.ctx, j.erhs));
      bool ok = j.kind == Judgement::Kind::EffEquiv ? b.p_equal(p, q) : b.p_leq(p, q);
      if (ok) return {"true", nullptr};
      return {"false",
              {{"backend", b.name()}, {"lhs", describe_pred(b, j.ctx, p)}, {"rhs", describe_pred(b, j.ctx, q)}}};
    }
  }
}

inline Verdict verify_in(const std::string& backend, const Judgement& j) {
  bool quantum_only = judgement_mentions_qubits(j);
  try {
    if (backend == "set") {
      if (quantum_only) return {"skipped (qubits)", nullptr};
      return verify_judgement(SetBackend{}, j);
    }
    if (backend == "stochastic") {
      if (quantum_only) return {"skipped (qubits)", nullptr};
      return verify_judgement(StochasticBackend{}, j);
    }
    return verify_judgement(QuantumBackend{}, j);
  } catch (const Unsupported& e) {
    return {std::string("skipped (") + e.what() + ")", nullptr};
  }
}

inline std::vector<Script> load_sidecar(const std::filesystem::path& base, const std::string& file,
                                        const ParseEnv& env) {
  std::filesystem::path p = base / file;
  std::ifstream in(p);
  if (!in) throw std::invalid_argument("cannot read sidecar '" + p.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("sidecar '" + p.string() + "': " + e.what());
  }
  std::vector<Script> out;
  if (j.is_array())
    for (const auto& s : j) out.push_back(script_from_json(s, env));
  else
    out.push_back(script_from_json(j, env));
  return out;
}

inline double millis_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// check

inline FileReport check_source(const std::string& path, const std::string& text, const CheckFlags& flags) {
  auto t0 = std::chrono::steady_clock::now();
  FileReport fr;
  fr.path = path;
  SourceFile src;
  try {
    src = parse(text);
  } catch (const ParseError& e) {
    fr.code = kParse;
    fr.message = e.what();
    return fr;
  }
  ParseEnv env = make_env(src);
  std::filesystem::path base = std::filesystem::path(path).parent_path();
  DerivationChecker ck(flags.rules);
  std::map<std::string, Judgement> judgements;  // checked declarations by name

  for (const auto& d : src.decls) {
    auto d0 = std::chrono::steady_clock::now();
    DeclReport r;
    r.name = d.name();
    std::optional<Judgement> verify_goal;
    try {
      if (const auto* t = std::get_if<TypeDecl>(&d.body)) {
        r.kind = "type";
        (void)t;
      } else if (const auto* t = std::get_if<TermDecl>(&d.body)) {
        r.kind = "term";
        auto res = check_term(t->ctx, t->term, t->type, ck.options(t->obligations));
        if (!res.ok()) throw *res.error;
        judgements[t->name] = Judgement::typing(t->ctx, res.term, res.type);
        verify_goal = judgements[t->name];
      } else if (const auto* e = std::get_if<EffectDecl>(&d.body)) {
        r.kind = "effect";
        auto res = check_effect(e->ctx, e->effect, ck.options(e->obligations));
        if (!res.ok()) throw *res.error;
        judgements[e->name] = Judgement::eff(e->ctx, res.effect);
        verify_goal = judgements[e->name];
      } else if (const auto* l = std::get_if<LemmaDecl>(&d.body)) {
        r.kind = "lemma";
        std::vector<Script> proofs = l->proofs;
        if (l->sidecar) {
          try {
            proofs = detail::load_sidecar(base, *l->sidecar, env);
          } catch (const std::exception& e) {
            r.code = kParse;
            r.message = e.what();
          }
        }
        if (r.code == kOk) {
          if (proofs.empty()) proofs.push_back(make_auto());
          auto checked = ck.check(proofs, l->goal);
          r.rules = checked.rules_used;
          judgements[l->name] = checked.goal;
          verify_goal = checked.goal;
        }
      } else if (const auto* c = std::get_if<CheckDecl>(&d.body)) {
        r.kind = "check";
        std::string backend = c->backend.value_or("stochastic");
        r.name = c->target + " on " + backend;
        auto it = judgements.find(c->target);
        if (it == judgements.end()) throw SemanticError("'" + c->target + "' is not a checked declaration");
        const Judgement& j = it->second;
        if (j.kind == Judgement::Kind::Typing && j.ctx.empty()) {
          r.output = eval_closed(backend, j.ctx, j.lhs, j.type);
        } else {
          auto v = detail::verify_in(backend, j);
          r.output = v.status;
          if (v.status == "false") {
            r.code = kSemantic;
            r.message = "'" + c->target + "' is false in the " + backend + " backend";
            r.counterexample = v.counterexample;
          }
        }
      }
      if (verify_goal && r.code == kOk)
        for (const auto& backend : flags.verify) {
          auto v = detail::verify_in(backend, *verify_goal);
          r.verify.emplace_back(backend, v.status);
          if (v.status == "false" && r.code == kOk) {
            r.code = kSemantic;
            r.message = "false in the " + backend + " backend";
            r.counterexample = v.counterexample;
          }
        }
    } catch (const ParseError& e) {
      r.code = kParse;
      r.message = e.what();
    } catch (const TypeError& e) {
      r.code = kType;
      r.message = e.what();
    } catch (const ProofError& e) {
      r.code = kProof;
      r.message = e.what();
    } catch (const std::exception& e) {
      r.code = kSemantic;
      r.message = e.what();
    }
    r.millis = detail::millis_since(d0);
    fr.code = worse(fr.code, r.code);
    fr.decls.push_back(std::move(r));
  }
  fr.millis = detail::millis_since(t0);
  return fr;
}

inline FileReport check_file(const std::string& path, const CheckFlags& flags) {
  std::ifstream in(path);
  if (!in) {
    FileReport fr;
    fr.path = path;
    fr.code = kParse;
    fr.message = "cannot read file";
    return fr;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return check_source(path, ss.str(), flags);
}

/// Files are checked concurrently; the report keeps the input order.
inline RunReport check_files(const std::vector<std::string>& paths, const CheckFlags& flags) {
  std::vector<std::future<FileReport>> jobs;
  for (const auto& p : paths) jobs.push_back(std::async(std::launch::async, [p, &flags] { return check_file(p, flags); }));
  RunReport run;
  for (auto& j : jobs) {
    run.files.push_back(j.get());
    run.exit_code = worse(run.exit_code, run.files.back().code);
  }
  return run;
}

inline std::string format_text(const RunReport& run, bool timing) {
  std::ostringstream out;
  int ok = 0, failed = 0;
  for (const auto& f : run.files) {
    out << f.path;
    if (timing) out << " (" << format_number(f.millis) << " ms)";
    out << "\n";
    if (!f.message.empty()) {
      out << "  " << status_name(f.code) << ": " << f.message << "\n";
      ++failed;
    }
    for (const auto& d : f.decls) {
      out << "  " << d.kind << " " << d.name << ": " << status_name(d.code);
      if (!d.rules.empty() && d.code == kOk) {
        out << " (";
        for (std::size_t i = 0; i < d.rules.size(); ++i) out << (i ? ", " : "") << d.rules[i];
        out << ")";
      }
      if (!d.output.empty()) out << " => " << d.output;
      if (!d.verify.empty()) {
        out << " [";
        for (std::size_t i = 0; i < d.verify.size(); ++i)
          out << (i ? ", " : "") << d.verify[i].first << ": " << d.verify[i].second;
        out << "]";
      }
      if (timing) out << " (" << format_number(d.millis) << " ms)";
      out << "\n";
      if (!d.message.empty() && d.code != kOk) out << "    " << d.message << "\n";
      if (!d.counterexample.is_null()) {
        out << "    lhs: " << d.counterexample.value("lhs", "") << "\n";
        out << "    rhs: " << d.counterexample.value("rhs", "") << "\n";
      }
      (d.code == kOk ? ok : failed)++;
    }
  }
  out << "summary: " << ok << " ok, " << failed << " failed, exit " << run.exit_code << "\n";
  return out.str();
}

inline nlohmann::json to_json(const RunReport& run, bool timing) {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& f : run.files) {
    nlohmann::json jf{{"path", f.path}, {"status", status_name(f.code)}, {"code", f.code}};
    if (!f.message.empty()) jf["message"] = f.message;
    if (timing) jf["millis"] = f.millis;
    nlohmann::json decls = nlohmann::json::array();
    for (const auto& d : f.decls) {
      nlohmann::json jd{{"kind", d.kind}, {"name", d.name}, {"status", status_name(d.code)}, {"code", d.code}};
      if (!d.message.empty()) jd["message"] = d.message;
      if (!d.rules.empty()) jd["rules"] = d.rules;
      if (!d.output.empty()) jd["output"] = d.output;
      if (!d.verify.empty()) {
        nlohmann::json v = nlohmann::json::object();
        for (const auto& [b, s] : d.verify) v[b] = s;
        jd["verify"] = v;
      }
      if (!d.counterexample.is_null()) jd["counterexample"] = d.counterexample;
      if (timing) jd["millis"] = d.millis;
      decls.push_back(jd);
    }
    jf["decls"] = decls;
    files.push_back(jf);
  }
  return {{"files", files}, {"exit_code", run.exit_code}};
}

// ---------------------------------------------------------------------------
// eval and wp on named declarations

struct CommandResult {
  int code = kOk;
  std::string out;  // stdout
  std::string err;  // stderr
};

namespace detail {

inline std::pair<SourceFile, int> load_checked(const std::string& path, std::string& err) {
  std::ifstream in(path);
  if (!in) {
    err = path + ": cannot read file";
    return {{}, kParse};
  }
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return {parse(ss.str()), kOk};
  } catch (const ParseError& e) {
    err = path + ": " + e.what();
    return {{}, kParse};
  }
}

inline CommandResult failure(int code, std::string msg) { return {code, "", std::move(msg) + "\n"}; }

}  // namespace detail

inline CommandResult cmd_eval(const std::string& path, const std::string& decl, const std::string& backend) {
  std::string err;
  auto [src, code] = detail::load_checked(path, err);
  if (code != kOk) return detail::failure(code, err);
  const auto* t = src.find<TermDecl>(decl);
  if (!t) return detail::failure(kSemantic, "no term declaration named '" + decl + "'");
  DerivationChecker ck;
  auto res = check_term(t->ctx, t->term, t->type, ck.options(t->obligations));
  if (!res.ok()) return detail::failure(kType, res.error->what());
  try {
    return {kOk, eval_closed(backend, t->ctx, res.term, res.type) + "\n", ""};
  } catch (const std::invalid_argument& e) {
    return detail::failure(kUsage, e.what());
  } catch (const std::exception& e) {
    return detail::failure(kSemantic, e.what());
  }
}

inline CommandResult cmd_wp(const std::string& path, const std::string& term_decl, const std::string& effect_decl,
                            bool cross_check) {
  std::string err;
  auto [src, code] = detail::load_checked(path, err);
  if (code != kOk) return detail::failure(code, err);
  const auto* t = src.find<TermDecl>(term_decl);
  if (!t) return detail::failure(kSemantic, "no term declaration named '" + term_decl + "'");
  const auto* e = src.find<EffectDecl>(effect_decl);
  if (!e) return detail::failure(kSemantic, "no effect declaration named '" + effect_decl + "'");
  DerivationChecker ck;
  auto tr = check_term(t->ctx, t->term, t->type, ck.options(t->obligations));
  if (!tr.ok()) return detail::failure(kType, tr.error->what());
  auto er = check_effect(e->ctx, e->effect, ck.options(e->obligations));
  if (!er.ok()) return detail::failure(kType, er.error->what());
  if (e->ctx.size() != 1 || !type_equal(e->ctx[0].type, tr.type))
    return detail::failure(kSemantic, "shape mismatch: the effect must have context (x : " + print(tr.type) +
                                          "), it has " + print(e->ctx));
  try {
    QuantumBackend q;
    WpResult r = wp_of(q, t->ctx, tr.term, e->ctx[0].name, tr.type, er.effect, cross_check);
    std::string out = "wp: " + format_blocks(r.pre) + "\n";
    int rc = kOk;
    if (cross_check) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3g", r.deviation);
      out += "substituted: " + format_blocks(*r.substituted) + "\n";
      out += std::string("max abs deviation: ") + buf + "\n";
      if (!(r.deviation <= QuantumBackend::kTolerance)) rc = kSemantic;
    }
    return {rc, out, ""};
  } catch (const std::exception& ex) {
    return detail::failure(kSemantic, ex.what());
  }
}

}  // namespace qpel
