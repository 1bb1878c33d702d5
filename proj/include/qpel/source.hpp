#pragma once
// Parsed .qpel files.

#include "qpel/proof_script.hpp"
#include "qpel/syntax.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qpel {

struct SourceLoc {
  int line = 0;
  int column = 0;
};

struct TypeDecl {
  std::string name;
  TypePtr type;
};

/// term name (ctx) : A = M
struct TermDecl {
  std::string name;
  Context ctx;
  TypePtr type;
  TermPtr term;
  std::vector<Script> obligations;  // consumed in checking order
};

/// effect name (ctx) = phi
struct EffectDecl {
  std::string name;
  Context ctx;
  EffectPtr effect;
  std::vector<Script> obligations;
};

/// lemma name (ctx) <judgement> by { script } [and { script }]
struct LemmaDecl {
  std::string name;
  Judgement goal;
  // For an equivalence goal the two scripts prove the two directions; a
  // single script is reused for both.
  std::vector<Script> proofs;
  std::optional<std::string> sidecar;  // by sidecar "file.json"
  // True when written with _|_; the goal is already expanded to <= bot(psi).
  bool perp_notation = false;
};

/// check name [on backend]
struct CheckDecl {
  std::string target;
  std::optional<std::string> backend;
};

struct Decl {
  std::variant<TypeDecl, TermDecl, EffectDecl, LemmaDecl, CheckDecl> body;
  SourceLoc loc;

  const std::string& name() const {
    return std::visit(
        [](const auto& d) -> const std::string& {
          if constexpr (std::is_same_v<std::decay_t<decltype(d)>, CheckDecl>)
            return d.target;
          else
            return d.name;
        },
        body);
  }
};

struct SourceFile {
  std::vector<Decl> decls;

  template <class T>
  const T* find(const std::string& name) const {
    for (const auto& d : decls)
      if (const auto* p = std::get_if<T>(&d.body); p && p->name == name) return p;
    return nullptr;
  }
};

}  // namespace qpel
