#pragma once

// Relation liftings: function spaces, the covariant powerset (Egli-Milner
// and image-factorisation presentations), binary products, and the
// powerset of pairs used by the branching saturations.
//
// Lifted relations are membership predicates; only pow_image_pairs
// materialises its carrier, and it does so by brute force.

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "lrbisim/error.hpp"
#include "lrbisim/lts.hpp"

namespace lrbisim {

using PairSet = std::set<StatePair>;

inline constexpr std::size_t image_pairs_guard = 20;

namespace detail {

inline void require_within(const StateSet& u, std::size_t size, const char* what) {
  if (!u.empty() && *u.rbegin() >= size)
    throw Error(std::string(what) + ": element outside its state space");
}

inline void require_within(const PairSet& u, std::size_t size, const char* what) {
  for (auto [a, b] : u)
    if (a >= size || b >= size)
      throw Error(std::string(what) + ": pair outside its state space");
}

} // namespace detail

/// U [Pow R] V: every u in U has an R-partner in V and vice versa.
inline bool pow_related(const StateSet& u, const StateSet& v, const Relation& r) {
  detail::require_within(u, r.left_size(), "pow_related");
  detail::require_within(v, r.right_size(), "pow_related");
  for (State a : u) {
    bool found = false;
    for (State b : v)
      if (r.contains(a, b)) {
        found = true;
        break;
      }
    if (!found)
      return false;
  }
  for (State b : v) {
    bool found = false;
    for (State a : u)
      if (r.contains(a, b)) {
        found = true;
        break;
      }
    if (!found)
      return false;
  }
  return true;
}

/// The image of phi : Pow R -> Pow A x Pow B, phi(W) = (pi_A W, pi_B W),
/// enumerated over every W subset of R.
inline std::set<std::pair<StateSet, StateSet>> pow_image_pairs(const Relation& r) {
  auto pairs = r.pairs();
  if (pairs.size() > image_pairs_guard)
    throw Error("pow_image_pairs: relation has " + std::to_string(pairs.size()) + " pairs, limit is " +
                std::to_string(image_pairs_guard));
  std::set<std::pair<StateSet, StateSet>> out;
  const std::uint32_t count = std::uint32_t{1} << pairs.size();
  for (std::uint32_t w = 0; w < count; ++w) {
    StateSet left, right;
    for (std::size_t k = 0; k < pairs.size(); ++k)
      if ((w >> k) & 1u) {
        left.insert(pairs[k].first);
        right.insert(pairs[k].second);
      }
    out.emplace(std::move(left), std::move(right));
  }
  return out;
}

/// f [R0 -> R1] g: for all s R0 t, f(s) R1 g(t). The maps are given by
/// their value tables over R0's spaces; R1 is any membership predicate.
template <typename X, typename Y, typename Related>
bool fun_lift_related(std::span<const X> f, std::span<const Y> g, const Relation& r0, Related&& r1) {
  if (f.size() != r0.left_size() || g.size() != r0.right_size())
    throw Error("fun_lift_related: maps must be total on the relation's spaces");
  for (auto [s, t] : r0.pairs())
    if (!r1(f[s], g[t]))
      return false;
  return true;
}

/// Index of (a, b) in the product of a space with one of size `second_size`.
inline State product_index(State a, State b, std::size_t second_size) { return a * second_size + b; }

/// (s0,s1) [R0 x R1] (t0,t1) iff s0 R0 t0 and s1 R1 t1. Product states are
/// numbered with product_index.
inline Relation product_relation(const Relation& r0, const Relation& r1) {
  Relation out(r0.left_size() * r1.left_size(), r0.right_size() * r1.right_size());
  for (auto [s0, t0] : r0.pairs())
    for (auto [s1, t1] : r1.pairs())
      out.insert(product_index(s0, s1, r1.left_size()), product_index(t0, t1, r1.right_size()));
  return out;
}

/// U [Pow(R x R)] V for sets of state pairs.
inline bool pow_pair_related(const PairSet& u, const PairSet& v, const Relation& r) {
  detail::require_within(u, r.left_size(), "pow_pair_related");
  detail::require_within(v, r.right_size(), "pow_pair_related");
  auto matched = [&](StatePair x, StatePair y) { return r.contains(x.first, y.first) && r.contains(x.second, y.second); };
  for (auto x : u) {
    bool found = false;
    for (auto y : v)
      if (matched(x, y)) {
        found = true;
        break;
      }
    if (!found)
      return false;
  }
  for (auto y : v) {
    bool found = false;
    for (auto x : u)
      if (matched(x, y)) {
        found = true;
        break;
      }
    if (!found)
      return false;
  }
  return true;
}

} // namespace lrbisim
