#pragma once
// Proof scripts: trees of rule applications, plus the closed rule inventory.

#include "qpel/syntax.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qpel {

enum class RulePack { Core, Qubit, BetaIso };

inline std::string_view pack_name(RulePack p) {
  switch (p) {
    case RulePack::Core:
      return "core";
    case RulePack::Qubit:
      return "qubit";
    case RulePack::BetaIso:
      return "beta-iso";
  }
  return "core";
}

struct RuleInfo {
  std::string_view name;
  RulePack pack;
};

/// Every rule schema, in inventory order.
inline const std::vector<RuleInfo>& rule_inventory() {
  static const std::vector<RuleInfo> rules = [] {
    std::vector<RuleInfo> r;
    for (std::string_view n :
         {"exch", "var", "tensor", "let", "unit", "inl", "inr", "case", "measure", "ref", "sym", "trans",
          "tensor-eq", "let-eq", "inl-eq", "inr-eq", "case-eq", "measure-eq", "beta-tensor", "beta-plus-1",
          "beta-plus-2", "eta-tensor", "eta-unit", "eta-plus", "let-commute", "let-case", "let-tensor",
          "case-commute", "case-tensor", "measure-perm", "measure-0", "measure-1", "measure-plus",
          "measure-case", "eff-0", "eff-bot", "eff-ovee", "eff-mult", "eff-case", "leq-ref", "leq-trans",
          "zero-leq", "bot-antitone", "bot-bot", "leq-ovee", "ovee-mono", "ovee-comm", "perp-rotate",
          "ovee-assoc", "ovee-0", "ortho-1", "ortho-2", "dist-l", "dist-r", "unit-l", "unit-r", "assoc", "comm",
          "case-cong", "case-mono", "beta-plus-1-eff", "beta-plus-2-eff", "eta-plus-eff", "case-ovee",
          "case-bot", "case-leq", "case-times"})
      r.push_back({n, RulePack::Core});
    for (std::string_view n : {"qbit-new", "qbit-x", "qbit-z", "qbit-cz", "qbit-proj", "qbit-cz-x", "qbit-cz-z",
                               "qbit-x-proj", "qbit-z-proj", "qbit-xx", "qbit-zz", "qbit-xz-zx"})
      r.push_back({n, RulePack::Qubit});
    r.push_back({"beta-iso", RulePack::BetaIso});
    return r;
  }();
  return rules;
}

inline std::optional<RulePack> rule_pack(std::string_view name) {
  for (const auto& r : rule_inventory())
    if (r.name == name) return r.pack;
  return std::nullopt;
}

inline bool is_rule_name(std::string_view name) { return rule_pack(name).has_value(); }

/// Explicit instantiation arguments of a script node.
struct ScriptArgs {
  TermPtr term;
  EffectPtr effect;
  TypePtr type;
  std::vector<int> perm;  // 1-based, as written
  std::optional<std::string> var;
  std::optional<int> pos;
  std::optional<int> depth;

  bool empty() const { return !term && !effect && !type && perm.empty() && !var && !pos && !depth; }
};

/// A script node names a rule (or "auto") and lists premise scripts.
struct Script {
  std::string rule;
  ScriptArgs args;
  std::vector<Script> premises;

  bool is_auto() const { return rule == "auto"; }
};

inline Script make_auto(std::optional<int> depth = std::nullopt) {
  Script s;
  s.rule = "auto";
  s.args.depth = depth;
  return s;
}

/// Number of nodes in the tree.
inline std::size_t script_size(const Script& s) {
  std::size_t n = 1;
  for (const auto& p : s.premises) n += script_size(p);
  return n;
}

/// Collects the rule names used anywhere in the tree.
inline void collect_rules(const Script& s, std::vector<std::string>& out) {
  if (std::find(out.begin(), out.end(), s.rule) == out.end()) out.push_back(s.rule);
  for (const auto& p : s.premises) collect_rules(p, out);
}

}  // namespace qpel
