#pragma once

// Branching and semi-branching bisimulation, their saturations into
// [S -> Pow(S x S)], and the almost-monad T(A) = Pow(A x A).
//
// The logical route compares saturations with the full two-sided lifting
// Pow(R x R). Its left-to-right half is the first clause of the
// definitions, the right-to-left half the second clause.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "lrbisim/error.hpp"
#include "lrbisim/lifting.hpp"
#include "lrbisim/lts.hpp"
#include "lrbisim/strong.hpp"
#include "lrbisim/weak.hpp"

namespace lrbisim {

/// An element of [S -> Pow(S x S)] over {0, .., size-1}.
class PairEndo {
public:
  PairEndo() = default;
  explicit PairEndo(std::size_t size) : image_(size) {}

  explicit PairEndo(std::vector<PairSet> image) : image_(std::move(image)) {
    for (const auto& ps : image_)
      for (auto [a, b] : ps)
        if (a >= image_.size() || b >= image_.size())
          throw Error("pair endo image leaves its state space");
  }

  std::size_t size() const { return image_.size(); }

  const PairSet& operator()(State s) const {
    if (s >= image_.size())
      throw Error("state index " + std::to_string(s) + " out of range");
    return image_[s];
  }

  const std::vector<PairSet>& image() const { return image_; }

  void add(State s, StatePair p) {
    if (s >= size() || p.first >= size() || p.second >= size())
      throw Error("state index out of range");
    image_[s].insert(p);
  }

  friend bool operator==(const PairEndo&, const PairEndo&) = default;

private:
  std::vector<PairSet> image_;
};

/// A system of type (L + tau) -> [S -> Pow(S x S)].
class PairTs {
public:
  PairTs() = default;

  PairTs(StateSpace states, Alphabet alphabet, std::vector<PairEndo> rows)
    : states_(std::move(states)), alphabet_(std::move(alphabet)), rows_(std::move(rows)) {
    if (rows_.size() != alphabet_.size())
      throw Error("one row per label is required");
    for (const auto& r : rows_)
      if (r.size() != states_.size())
        throw Error("row does not match the state space");
  }

  const StateSpace& states() const { return states_; }
  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t size() const { return states_.size(); }
  const PairEndo& operator[](const Label& a) const { return rows_[alphabet_.require(a)]; }
  const PairEndo& row(std::size_t i) const { return rows_.at(i); }

  friend bool operator==(const PairTs&, const PairTs&) = default;

private:
  StateSpace states_;
  Alphabet alphabet_;
  std::vector<PairEndo> rows_;
};

enum class BranchingVariant { branching, semibranching };

inline const char* to_string(BranchingVariant v) {
  return v == BranchingVariant::branching ? "branching" : "semibranching";
}

/// bsat F a s = {(s1,s2) : s ->tau* s1 ->a s2} plus (s,s) when a = tau;
/// sbsat F a s adds instead every (s1,s1) with s ->tau* s1 when a = tau.
inline PairTs branching_saturate(const Lts& f, BranchingVariant variant) {
  detail::require_tau(f, "branching_saturate");
  const Endo closure = tau_star(f);
  std::vector<PairEndo> rows;
  for (const auto& a : f.alphabet()) {
    PairEndo row(f.size());
    const Endo& step = f[a];
    for (State s = 0; s < f.size(); ++s) {
      for (State s1 : closure(s))
        for (State s2 : step(s1))
          row.add(s, {s1, s2});
      if (a.is_tau()) {
        if (variant == BranchingVariant::branching)
          row.add(s, {s, s});
        else
          for (State s1 : closure(s))
            row.add(s, {s1, s1});
      }
    }
    rows.push_back(std::move(row));
  }
  return PairTs(f.states(), f.alphabet(), std::move(rows));
}

enum class BranchingMethod { direct, logical };

namespace detail {

struct BranchingView {
  const Lts& f;
  const Lts& g;
  Endo f_closure;
  Endo g_closure;
};

/// Clause for a left move s ->a s2 out of the pair (s, t); `left_moves`
/// false mirrors it for a right move t ->a s2 out of (s, t).
inline bool branching_move_matched(const Relation& r, const BranchingView& v, BranchingVariant variant,
                                   std::size_t label, State s, State t, State moved, bool left_moves) {
  const Lts& other = left_moves ? v.g : v.f;
  const Endo& other_closure = left_moves ? v.g_closure : v.f_closure;
  const State here = left_moves ? s : t;
  const State there = left_moves ? t : s;
  auto rel = [&](State mine, State theirs) { return left_moves ? r.contains(mine, theirs) : r.contains(theirs, mine); };

  for (State x1 : other_closure(there)) {
    if (!rel(here, x1))
      continue;
    for (State x2 : other.row(label)(x1))
      if (rel(moved, x2))
        return true;
  }
  if (!other.alphabet()[label].is_tau())
    return false;
  if (variant == BranchingVariant::branching)
    return rel(moved, there);
  for (State x : other_closure(there))
    if (rel(here, x) && rel(moved, x))
      return true;
  return false;
}

inline std::optional<Violation> first_branching_unmatched(const Relation& r, const BranchingView& v,
                                                          BranchingVariant variant, State s, State t) {
  const auto& alphabet = v.f.alphabet();
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    for (State s2 : v.f.row(i)(s))
      if (!branching_move_matched(r, v, variant, i, s, t, s2, true))
        return Violation{alphabet[i], s, t, s2, Side::left};
  for (std::size_t i = 0; i < alphabet.size(); ++i)
    for (State t2 : v.g.row(i)(t))
      if (!branching_move_matched(r, v, variant, i, s, t, t2, false))
        return Violation{alphabet[i], s, t, t2, Side::right};
  return std::nullopt;
}

inline BranchingView make_view(const Relation& r, const Lts& f, const Lts& g) {
  require_compatible(r, f, g);
  require_tau(f, "branching bisimulation");
  return BranchingView{f, g, tau_star(f), tau_star(g)};
}

} // namespace detail

inline bool is_branching_bisimulation(const Relation& r, const Lts& f, const Lts& g, BranchingVariant variant,
                                      BranchingMethod method = BranchingMethod::direct) {
  auto view = detail::make_view(r, f, g);
  if (method == BranchingMethod::direct) {
    for (auto [s, t] : r.pairs())
      if (detail::first_branching_unmatched(r, view, variant, s, t))
        return false;
    return true;
  }
  PairTs fs = branching_saturate(f, variant), gs = branching_saturate(g, variant);
  for (std::size_t i = 0; i < f.alphabet().size(); ++i)
    for (auto [s, t] : r.pairs())
      if (!pow_pair_related(fs.row(i)(s), gs.row(i)(t), r))
        return false;
  return true;
}

inline std::optional<Violation> find_branching_violation(const Relation& r, const Lts& f, const Lts& g,
                                                         BranchingVariant variant) {
  auto view = detail::make_view(r, f, g);
  for (auto [s, t] : r.pairs())
    if (auto w = detail::first_branching_unmatched(r, view, variant, s, t))
      return w;
  return std::nullopt;
}

/// Largest relation accepted by the direct clauses, by refinement from S x T.
inline Relation greatest_branching_bisimulation(const Lts& f, const Lts& g, BranchingVariant variant) {
  Relation r = Relation::full(f.size(), g.size());
  auto view = detail::make_view(r, f, g);
  for (;;) {
    std::vector<StatePair> doomed;
    for (auto [s, t] : r.pairs())
      if (detail::first_branching_unmatched(r, view, variant, s, t))
        doomed.emplace_back(s, t);
    if (doomed.empty())
      return r;
    for (auto [s, t] : doomed)
      r.erase(s, t);
  }
}

// Almost-monad T(A) = Pow(A x A).

inline PairSet am_eta(std::size_t space_size, State a) {
  if (a >= space_size)
    throw Error("am_eta: element outside the space");
  return PairSet{{a, a}};
}

/// a |-> {(a,a)}, the unit as an element of [A -> Pow(A x A)].
inline PairEndo am_identity(std::size_t space_size) {
  PairEndo id(space_size);
  for (State a = 0; a < space_size; ++a)
    id.add(a, {a, a});
  return id;
}

/// mu(U) = union of V u W over (V, W) in U.
inline PairSet am_mu(const std::set<std::pair<PairSet, PairSet>>& u) {
  PairSet out;
  for (const auto& [v, w] : u) {
    out.insert(v.begin(), v.end());
    out.insert(w.begin(), w.end());
  }
  return out;
}

/// (f.g)(a) = union of g(x) u g(y) over (x,y) in f(a).
inline PairEndo am_compose(const PairEndo& f, const PairEndo& g) {
  if (f.size() != g.size())
    throw Error("am_compose: state spaces differ");
  std::vector<PairSet> out(f.size());
  for (State a = 0; a < f.size(); ++a)
    for (auto [x, y] : f(a)) {
      out[a].insert(g(x).begin(), g(x).end());
      out[a].insert(g(y).begin(), g(y).end());
    }
  return PairEndo(std::move(out));
}

inline bool pair_endo_leq(const PairEndo& f, const PairEndo& g) {
  if (f.size() != g.size())
    throw Error("pair_endo_leq: state spaces differ");
  for (State a = 0; a < f.size(); ++a)
    if (!std::includes(g(a).begin(), g(a).end(), f(a).begin(), f(a).end()))
      return false;
  return true;
}

/// First (state, pair) in f but not in g, if f is not below g.
inline std::optional<std::pair<State, StatePair>> pair_endo_leq_witness(const PairEndo& f, const PairEndo& g) {
  if (f.size() != g.size())
    throw Error("pair_endo_leq_witness: state spaces differ");
  for (State a = 0; a < f.size(); ++a)
    for (auto p : f(a))
      if (!g(a).contains(p))
        return std::pair{a, p};
  return std::nullopt;
}

/// A pair of g lost by composing with the unit on the right, if any.
inline std::optional<std::pair<State, StatePair>> right_unit_witness(const PairEndo& g) {
  return pair_endo_leq_witness(g, am_compose(g, am_identity(g.size())));
}

} // namespace lrbisim
