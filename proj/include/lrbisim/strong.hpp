#pragma once

// Strong bisimulation: the clause-by-clause definition, the logical
// relation [Id_A -> [R -> Pow R]], violation witnesses, the greatest
// bisimulation by refinement, and the characterisation over words.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lrbisim/error.hpp"
#include "lrbisim/lifting.hpp"
#include "lrbisim/lts.hpp"

namespace lrbisim {

enum class StrongMethod { direct, logical };

enum class Side { left, right };

inline const char* to_string(Side s) { return s == Side::left ? "left" : "right"; }

/// A transition on `side` from s (left) or t (right), taken with `label` to
/// `successor`, that the other side of the pair (s, t) cannot match.
struct Violation {
  Label label;
  State s = 0;
  State t = 0;
  State successor = 0;
  Side side = Side::left;

  friend bool operator==(const Violation&, const Violation&) = default;
};

namespace detail {

inline void require_compatible(const Relation& r, const Lts& f, const Lts& g) {
  if (f.alphabet() != g.alphabet())
    throw Error("systems have different alphabets");
  if (r.left_size() != f.size() || r.right_size() != g.size())
    throw Error("relation does not match the systems' state spaces");
}

/// Some member of `candidates` is related (on the other side) to x.
inline bool has_partner(const StateSet& candidates, State x, const Relation& r, Side x_side) {
  for (State y : candidates)
    if (x_side == Side::left ? r.contains(x, y) : r.contains(y, x))
      return true;
  return false;
}

/// First unmatched move out of the pair (s, t) in canonical order: left-side
/// moves before right-side moves, labels and successors ascending.
inline std::optional<Violation> first_unmatched(const Relation& r, const Lts& f, const Lts& g, State s, State t) {
  const auto& alphabet = f.alphabet();
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    for (State s2 : f.row(i)(s))
      if (!has_partner(g.row(i)(t), s2, r, Side::left))
        return Violation{alphabet[i], s, t, s2, Side::left};
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    for (State t2 : g.row(i)(t))
      if (!has_partner(f.row(i)(s), t2, r, Side::right))
        return Violation{alphabet[i], s, t, t2, Side::right};
  return std::nullopt;
}

} // namespace detail

inline bool is_strong_bisimulation(const Relation& r, const Lts& f, const Lts& g,
                                   StrongMethod method = StrongMethod::direct) {
  detail::require_compatible(r, f, g);
  if (method == StrongMethod::direct) {
    for (auto [s, t] : r.pairs())
      if (detail::first_unmatched(r, f, g, s, t))
        return false;
    return true;
  }
  auto pow_r = [&r](const StateSet& u, const StateSet& v) { return pow_related(u, v, r); };
  for (std::size_t i = 0; i < f.alphabet().size(); ++i)
    if (!fun_lift_related(std::span(f.row(i).image()), std::span(g.row(i).image()), r, pow_r))
      return false;
  return true;
}

inline std::optional<Violation> find_strong_violation(const Relation& r, const Lts& f, const Lts& g) {
  detail::require_compatible(r, f, g);
  for (auto [s, t] : r.pairs())
    if (auto v = detail::first_unmatched(r, f, g, s, t))
      return v;
  return std::nullopt;
}

/// Largest strong bisimulation between F and G. Starts from S x T and
/// deletes, per sweep, every pair with an unmatched move under the
/// pre-sweep relation.
inline Relation greatest_strong_bisimulation(const Lts& f, const Lts& g) {
  Relation r = Relation::full(f.size(), g.size());
  detail::require_compatible(r, f, g);
  for (;;) {
    std::vector<StatePair> doomed;
    for (auto [s, t] : r.pairs())
      if (detail::first_unmatched(r, f, g, s, t))
        doomed.emplace_back(s, t);
    if (doomed.empty())
      return r;
    for (auto [s, t] : doomed)
      r.erase(s, t);
  }
}

/// Checks the bisimulation condition for every word of length <= maxlen,
/// using the Kleisli extension of the transition map to words.
inline bool word_characterization_check(const Relation& r, const Lts& f, const Lts& g, std::size_t maxlen) {
  detail::require_compatible(r, f, g);
  auto pow_r = [&r](const StateSet& u, const StateSet& v) { return pow_related(u, v, r); };
  auto related = [&](const Endo& fw, const Endo& gw) {
    return fun_lift_related(std::span(fw.image()), std::span(gw.image()), r, pow_r);
  };
  // Depth-first over words, carrying the prefix's endos.
  struct Frame {
    Endo fw, gw;
    std::size_t depth;
  };
  std::vector<Frame> stack{{kleisli_identity(f.size()), kleisli_identity(g.size()), 0}};
  while (!stack.empty()) {
    Frame fr = std::move(stack.back());
    stack.pop_back();
    if (!related(fr.fw, fr.gw))
      return false;
    if (fr.depth == maxlen)
      continue;
    for (std::size_t i = 0; i < f.alphabet().size(); ++i)
      stack.push_back({kleisli_compose(fr.fw, f.row(i)), kleisli_compose(fr.gw, g.row(i)), fr.depth + 1});
  }
  return true;
}

} // namespace lrbisim
