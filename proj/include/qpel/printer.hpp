#pragma once
// Pretty printer for the surface syntax. Output reparses to an alpha-equal AST.

#include "qpel/source.hpp"

#include <sstream>
#include <string>

namespace qpel {

namespace detail {

// Precedence levels: a node printed at a level higher than its own gets parens.
enum TypeLevel { kTypeSum = 0, kTypeTensor = 1, kTypeAtom = 2 };
enum TermLevel { kTermOpen = 0, kTermPair = 1, kTermApp = 2, kTermAtom = 3 };
enum EffLevel { kEffOpen = 0, kEffOvee = 1, kEffMult = 2, kEffAtom = 3 };

inline std::string paren_if(bool p, std::string s) { return p ? "(" + s + ")" : s; }

inline std::string type_at(const TypePtr& t, int level) {
  switch (t->kind) {
    case Type::Kind::Unit:
      return "I";
    case Type::Kind::Qbit:
      return "qbit";
    case Type::Kind::Meta:
      return "?" + std::to_string(t->meta);
    case Type::Kind::Tensor:
      return paren_if(level > kTypeTensor, type_at(t->left, kTypeTensor) + " * " + type_at(t->right, kTypeAtom));
    case Type::Kind::Sum:
      return paren_if(level > kTypeSum, type_at(t->left, kTypeSum) + " + " + type_at(t->right, kTypeTensor));
  }
  return "?";
}

std::string term_at(const TermPtr& t, int level, const std::string& indent);
std::string effect_at(const EffectPtr& e, int level, const std::string& indent);

inline std::string term_at(const TermPtr& t, int level, const std::string& indent) {
  switch (t->kind) {
    case Term::Kind::Var:
      return t->name;
    case Term::Kind::Unit:
      return "unit";
    case Term::Kind::NewPlus:
      return "plus";
    case Term::Kind::Pair:
      return paren_if(level > kTermPair,
                      term_at(t->a, kTermPair, indent) + " * " + term_at(t->b, kTermApp, indent));
    case Term::Kind::Inl:
      return paren_if(level > kTermApp, "inl " + term_at(t->a, kTermAtom, indent));
    case Term::Kind::Inr:
      return paren_if(level > kTermApp, "inr " + term_at(t->a, kTermAtom, indent));
    case Term::Kind::PauliX:
      return paren_if(level > kTermApp, "X " + term_at(t->a, kTermAtom, indent));
    case Term::Kind::PauliZ:
      return paren_if(level > kTermApp, "Z " + term_at(t->a, kTermAtom, indent));
    case Term::Kind::CZ:
      return paren_if(level > kTermApp,
                      "E " + term_at(t->a, kTermAtom, indent) + " " + term_at(t->b, kTermAtom, indent));
    case Term::Kind::LetPair:
      return paren_if(level > kTermOpen, "let " + t->x + " * " + t->y + " = " + term_at(t->a, kTermOpen, indent) +
                                              " in " + term_at(t->b, kTermOpen, indent));
    case Term::Kind::Case:
      return paren_if(level > kTermOpen, "case " + term_at(t->a, kTermOpen, indent) + " of inl " + t->x + " -> " +
                                              term_at(t->b, kTermOpen, indent) + " | inr " + t->y + " -> " +
                                              term_at(t->c, kTermOpen, indent));
    case Term::Kind::Measure: {
      std::string inner = indent + "  ";
      std::string s = "measure {";
      for (std::size_t i = 0; i < t->branches.size(); ++i) {
        s += "\n" + inner + (i ? "| " : "") + effect_at(t->branches[i].effect, kEffOvee, inner + "  ") + " -> " +
             term_at(t->branches[i].term, kTermOpen, inner + "  ");
      }
      s += "\n" + indent + "}";
      return paren_if(level > kTermOpen, s);
    }
  }
  return "?";
}

inline std::string effect_at(const EffectPtr& e, int level, const std::string& indent) {
  switch (e->kind) {
    case Effect::Kind::Zero:
      return "0";
    case Effect::Kind::Bot:
      if (e->a->kind == Effect::Kind::Zero) return "1";
      return "bot(" + effect_at(e->a, kEffOpen, indent) + ")";
    case Effect::Kind::Scalar:
      return "scalar(" + to_string(e->value) + ")";
    case Effect::Kind::ProjPlus:
      return "proj(" + term_at(e->term, kTermOpen, indent) + ", " + to_string(e->angle.over_pi()) + ")";
    case Effect::Kind::Ovee:
      return paren_if(level > kEffOvee,
                      effect_at(e->a, kEffMult, indent) + " o+ " + effect_at(e->b, kEffMult, indent));
    case Effect::Kind::Mult:
      return paren_if(level > kEffMult,
                      effect_at(e->a, kEffAtom, indent) + " . " + effect_at(e->b, kEffAtom, indent));
    case Effect::Kind::Case:
      return paren_if(level > kEffOpen, "caseE " + term_at(e->term, kTermOpen, indent) + " of inl " + e->x +
                                            " -> " + effect_at(e->a, kEffOpen, indent) + " | inr " + e->y + " -> " +
                                            effect_at(e->b, kEffOpen, indent));
  }
  return "?";
}

}  // namespace detail

inline std::string print(const TypePtr& t) { return detail::type_at(t, detail::kTypeSum); }
inline std::string print(const TermPtr& t) { return detail::term_at(t, detail::kTermOpen, ""); }
inline std::string print(const EffectPtr& e) { return detail::effect_at(e, detail::kEffOpen, ""); }

inline std::string print(const Context& ctx) {
  std::string s = "(";
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    if (i) s += ", ";
    s += ctx[i].name + " : " + print(ctx[i].type);
  }
  return s + ")";
}

/// Human-readable judgement, e.g. "(x : I) |- x : I".
inline std::string print(const Judgement& j) {
  std::string head = print(j.ctx) + " |- ";
  switch (j.kind) {
    case Judgement::Kind::Typing:
      return head + print(j.lhs) + " : " + print(j.type);
    case Judgement::Kind::TermEq:
      return head + print(j.lhs) + " = " + print(j.rhs) + " : " + print(j.type);
    case Judgement::Kind::EffFormation:
      return head + print(j.elhs) + " eff";
    case Judgement::Kind::EffLeq:
      return head + print(j.elhs) + " <= " + print(j.erhs);
    case Judgement::Kind::EffEquiv:
      return head + print(j.elhs) + " == " + print(j.erhs);
  }
  return head;
}

inline std::string print(const Script& s) {
  std::string out = s.rule;
  std::vector<std::string> args;
  if (s.args.term) args.push_back("term = " + print(s.args.term));
  if (s.args.effect) args.push_back("effect = " + print(s.args.effect));
  if (s.args.type) args.push_back("type = " + print(s.args.type));
  if (!s.args.perm.empty()) {
    std::string p = "perm = (";
    for (std::size_t i = 0; i < s.args.perm.size(); ++i) p += (i ? ", " : "") + std::to_string(s.args.perm[i]);
    args.push_back(p + ")");
  }
  if (s.args.var) args.push_back("var = " + *s.args.var);
  if (s.args.pos) args.push_back("pos = " + std::to_string(*s.args.pos));
  if (s.args.depth) args.push_back("depth = " + std::to_string(*s.args.depth));
  if (!args.empty()) {
    out += " [";
    for (std::size_t i = 0; i < args.size(); ++i) out += (i ? ", " : "") + args[i];
    out += "]";
  }
  if (!s.premises.empty()) {
    out += " { ";
    for (std::size_t i = 0; i < s.premises.size(); ++i) out += (i ? " ; " : "") + print(s.premises[i]);
    out += " }";
  }
  return out;
}

namespace detail {
inline std::string print_scripts(const char* keyword, const std::vector<Script>& ss) {
  if (ss.empty()) return "";
  std::string out = std::string(" ") + keyword;
  for (const auto& s : ss) out += " { " + print(s) + " }";
  return out;
}
}  // namespace detail

inline std::string print(const Decl& d) {
  struct V {
    std::string operator()(const TypeDecl& t) const { return "type " + t.name + " = " + print(t.type); }
    std::string operator()(const TermDecl& t) const {
      return "term " + t.name + " " + print(t.ctx) + " : " + print(t.type) + " = " + print(t.term) +
             detail::print_scripts("using", t.obligations);
    }
    std::string operator()(const EffectDecl& e) const {
      return "effect " + e.name + " " + print(e.ctx) + " = " + print(e.effect) +
             detail::print_scripts("using", e.obligations);
    }
    std::string operator()(const LemmaDecl& l) const {
      const Judgement& j = l.goal;
      std::string s = "lemma " + l.name + " " + print(j.ctx) + " ";
      switch (j.kind) {
        case Judgement::Kind::Typing:
          s += "term " + print(j.lhs) + " : " + print(j.type);
          break;
        case Judgement::Kind::TermEq:
          s += "term " + print(j.lhs) + " = " + print(j.rhs) + " : " + print(j.type);
          break;
        case Judgement::Kind::EffFormation:
          s += "effect " + print(j.elhs);
          break;
        case Judgement::Kind::EffLeq:
          if (l.perp_notation)
            s += "effect " + print(j.elhs) + " _|_ " + print(j.erhs->a);
          else
            s += "effect " + print(j.elhs) + " <= " + print(j.erhs);
          break;
        case Judgement::Kind::EffEquiv:
          s += "effect " + print(j.elhs) + " == " + print(j.erhs);
          break;
      }
      if (l.sidecar) return s + " by sidecar \"" + *l.sidecar + "\"";
      for (std::size_t i = 0; i < l.proofs.size(); ++i) s += (i ? " and { " : " by { ") + print(l.proofs[i]) + " }";
      return s;
    }
    std::string operator()(const CheckDecl& c) const {
      return "check " + c.target + (c.backend ? " on " + *c.backend : std::string());
    }
  };
  return std::visit(V{}, d.body);
}

inline std::string print(const SourceFile& f) {
  std::string out;
  for (const auto& d : f.decls) out += print(d) + "\n\n";
  return out;
}

}  // namespace qpel
