#pragma once

// Logical relations of Markov processes, the sigma-algebras a relation
// coarsens to, and Giry-bisimulation spans built from or compared with
// such relations.
//
// U R_Sigma V iff sRt implies (s in U iff t in V). For a measurable U the
// linked measurable V are computed per atom of T: an atom is forced in
// (it meets R(U)), forced out (it meets R(S\U)), or free (it meets neither
// image). U has a partner iff no atom is forced both ways, and then its
// partners are the forced-in atoms plus any set of free atoms.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <boost/pending/disjoint_sets.hpp>

#include "lrbisim/error.hpp"
#include "lrbisim/lts.hpp"
#include "lrbisim/markov.hpp"
#include "lrbisim/measure.hpp"
#include "lrbisim/rational.hpp"

namespace lrbisim {

inline constexpr std::size_t sigma_atom_guard = 12;

using AtomMask = std::uint32_t;

/// The definitional check of U R_Sigma V; U and V need not be measurable.
inline bool r_sigma_related(const PointSet& u, const PointSet& v, const Relation& r) {
  for (auto [s, t] : r.pairs())
    if (u.contains(s) != v.contains(t))
      return false;
  return true;
}

struct LinkedPartner {
  AtomMask forced = 0; // atoms every partner contains
  AtomMask free = 0;   // atoms a partner may contain or not
};

namespace detail {

inline void require_guard(const FinMeasSpace& x, const char* side) {
  if (x.atom_count() > sigma_atom_guard)
    throw Error(std::string("enumeration guard exceeded: ") + side + " space has " + std::to_string(x.atom_count()) +
                " atoms (limit " + std::to_string(sigma_atom_guard) + ")");
}

inline void require_relation(const Relation& r, const MarkovProcess& f, const MarkovProcess& g) {
  if (r.left_size() != f.size() || r.right_size() != g.size())
    throw Error("relation does not match the processes' state spaces");
}

inline std::uint64_t full_mask(std::size_t atoms) { return (std::uint64_t{1} << atoms) - 1; }

inline AtomMask mask_of(const FinMeasSpace& x, const PointSet& u) {
  AtomMask m = 0;
  for (std::size_t i : x.atoms_in(u))
    m |= AtomMask{1} << i;
  return m;
}

} // namespace detail

/// Partners in T of the measurable set of S-atoms `u`, if there are any.
inline std::optional<LinkedPartner> linked_partner(AtomMask u, const Relation& r, const FinMeasSpace& s_space,
                                                   const FinMeasSpace& t_space) {
  AtomMask in = 0, out = 0;
  for (auto [s, t] : r.pairs()) {
    AtomMask bit = AtomMask{1} << t_space.atom_of(t);
    if ((u >> s_space.atom_of(s)) & 1u)
      in |= bit;
    else
      out |= bit;
  }
  if (in & out)
    return std::nullopt;
  AtomMask all = static_cast<AtomMask>(detail::full_mask(t_space.atom_count()));
  return LinkedPartner{in, all & ~(in | out)};
}

/// R is a logical relation iff F s U = G t V whenever sRt and U R_Sigma V
/// (U, V measurable). With the partner structure above this is: F s U equals
/// G t on the forced atoms, and G t gives every free atom weight zero.
inline Verdict is_prob_logical_relation(const Relation& r, const MarkovProcess& f, const MarkovProcess& g) {
  detail::require_relation(r, f, g);
  detail::require_guard(f.space(), "left");
  detail::require_guard(g.space(), "right");
  const auto& fs = f.space();
  const auto& gs = g.space();
  const auto pairs = r.pairs();
  for (std::uint64_t u = 0; u <= detail::full_mask(fs.atom_count()); ++u) {
    auto partner = linked_partner(static_cast<AtomMask>(u), r, fs, gs);
    if (!partner)
      continue;
    const PointSet uset = fs.points_of(u);
    const PointSet vset = gs.points_of(partner->forced);
    for (auto [s, t] : pairs) {
      Rational lhs = f.value(s, uset), rhs = g.value(t, vset);
      if (lhs != rhs)
        return Verdict::no("'" + f.name(s) + "' R '" + g.name(t) + "', " + fs.describe(uset) + " R_Sigma " +
                           gs.describe(vset) + ": " + to_string(lhs) + " vs " + to_string(rhs));
      for (std::size_t j = 0; j < gs.atom_count(); ++j)
        if (((partner->free >> j) & 1u) && g(t).weight[j] != 0) {
          PointSet wider = vset;
          wider.insert(gs.atom(j).begin(), gs.atom(j).end());
          return Verdict::no("'" + f.name(s) + "' R '" + g.name(t) + "', " + fs.describe(uset) + " R_Sigma " +
                             gs.describe(wider) + ": " + to_string(lhs) + " vs " + to_string(g.value(t, wider)));
        }
    }
  }
  return Verdict::yes();
}

struct CoarsenedSigma {
  FinMeasSpace left;  // (S, Sigma^R_S)
  FinMeasSpace right; // (T, Sigma^R_T)
  FinMeasSpace apex;  // (R, Sigma_R), points named "(s,t)"
  std::vector<StatePair> apex_pairs; // apex point index -> pair of R
};

namespace detail {

/// Atoms of the set algebra generated by `family` (masks over the finer
/// atoms of `x`), checked to be closed: it must have 2^#atoms members.
inline std::vector<PointSet> atoms_of_family(const FinMeasSpace& x, const std::set<std::uint64_t>& family) {
  std::map<std::vector<bool>, PointSet> by_signature;
  for (State p = 0; p < x.size(); ++p) {
    std::vector<bool> sig;
    for (std::uint64_t m : family)
      sig.push_back(((m >> x.atom_of(p)) & 1u) != 0);
    by_signature[sig].insert(p);
  }
  std::vector<PointSet> atoms;
  for (auto& [sig, ps] : by_signature)
    atoms.push_back(std::move(ps));
  if (atoms.size() >= 64 || family.size() != (std::uint64_t{1} << atoms.size()))
    throw InternalError("linked measurable sets do not form a sigma-algebra");
  return atoms;
}

inline std::set<std::uint64_t> linked_family(const Relation& r, const FinMeasSpace& s_space,
                                             const FinMeasSpace& t_space) {
  std::set<std::uint64_t> family;
  for (std::uint64_t u = 0; u <= full_mask(s_space.atom_count()); ++u)
    if (linked_partner(static_cast<AtomMask>(u), r, s_space, t_space))
      family.insert(u);
  return family;
}

inline std::string pair_name(const StateSpace& s, const StateSpace& t, StatePair p) {
  return "(" + s.name(p.first) + "," + t.name(p.second) + ")";
}

} // namespace detail

/// Sigma^R_S, Sigma^R_T and Sigma_R, each as an atom partition. Also checks
/// that proj1^-1 U = proj2^-1 V for every linked measurable pair.
inline CoarsenedSigma coarsened_sigma_algebras(const Relation& r, const MarkovProcess& f, const MarkovProcess& g) {
  detail::require_relation(r, f, g);
  detail::require_guard(f.space(), "left");
  detail::require_guard(g.space(), "right");
  const auto& fs = f.space();
  const auto& gs = g.space();
  const Relation op = r.inverse();
  auto left_family = detail::linked_family(r, fs, gs);
  auto right_family = detail::linked_family(op, gs, fs);

  std::vector<StatePair> pairs = r.pairs();
  std::vector<std::string> names;
  for (auto p : pairs)
    names.push_back(detail::pair_name(fs.carrier(), gs.carrier(), p));
  StateSpace apex_carrier(names);
  std::vector<StatePair> apex_pairs(pairs.size());
  for (auto p : pairs)
    apex_pairs[apex_carrier.require(detail::pair_name(fs.carrier(), gs.carrier(), p))] = p;

  // Sigma_R by signatures of apex points over proj1^-1 U, U in Sigma^R_S.
  std::map<std::vector<bool>, PointSet> by_signature;
  for (State w = 0; w < apex_pairs.size(); ++w) {
    std::vector<bool> sig;
    for (std::uint64_t u : left_family)
      sig.push_back(((u >> fs.atom_of(apex_pairs[w].first)) & 1u) != 0);
    by_signature[sig].insert(w);
  }
  std::vector<PointSet> apex_atoms;
  for (auto& [sig, ps] : by_signature)
    apex_atoms.push_back(std::move(ps));

  for (std::uint64_t u : left_family) {
    auto partner = linked_partner(static_cast<AtomMask>(u), r, fs, gs);
    for (AtomMask v : {partner->forced, static_cast<AtomMask>(partner->forced | partner->free)}) {
      if (!r_sigma_related(fs.points_of(u), gs.points_of(v), r))
        throw InternalError("linked partner is not related by R_Sigma");
      for (auto [s, t] : pairs)
        if (((u >> fs.atom_of(s)) & 1u) != ((v >> gs.atom_of(t)) & 1u))
          throw InternalError("proj1^-1 U differs from proj2^-1 V for a linked pair");
    }
  }

  return CoarsenedSigma{FinMeasSpace(fs.carrier(), detail::atoms_of_family(fs, left_family)),
                        FinMeasSpace(gs.carrier(), detail::atoms_of_family(gs, right_family)),
                        FinMeasSpace(std::move(apex_carrier), std::move(apex_atoms)), std::move(apex_pairs)};
}

/// F on a coarser sigma-algebra over the same carrier. Rejects a coarser
/// space that is not a sub-algebra, and a kernel that is not measurable for
/// the coarser atoms.
inline MarkovProcess restrict_process(const MarkovProcess& f, const FinMeasSpace& coarser) {
  if (!(coarser.carrier() == f.space().carrier()))
    throw Error("restrict_process: carriers differ");
  for (const auto& a : coarser.atoms())
    if (!f.space().is_measurable(a))
      throw Error("restrict_process: " + coarser.describe(a) + " is not measurable in the finer space");
  std::vector<SubProb> kernel;
  for (State s = 0; s < f.size(); ++s) {
    SubProb pi;
    for (const auto& a : coarser.atoms())
      pi.weight.push_back(f.value(s, a));
    kernel.push_back(std::move(pi));
  }
  return MarkovProcess(coarser, std::move(kernel));
}

/// A span of coalgebra homomorphisms left <- apex -> right.
struct GirySpan {
  MarkovProcess left;
  MarkovProcess right;
  MarkovProcess apex;
  MeasurableMap leg_left;
  MeasurableMap leg_right;
};

struct SpanResult {
  std::optional<GirySpan> span;
  std::string witness; // why no span was built
};

/// The span over (S,Sigma^R_S) <- (R,Sigma_R) -> (T,Sigma^R_T) with
/// H (s,t) W = F s U for any U in Sigma^R_S with proj1^-1 U = W.
inline SpanResult build_span(const Relation& r, const MarkovProcess& f, const MarkovProcess& g) {
  if (auto v = is_prob_logical_relation(r, f, g); !v)
    return {std::nullopt, "not a logical relation: " + v.witness};
  CoarsenedSigma cs = coarsened_sigma_algebras(r, f, g);
  const auto& fs = f.space();
  const auto& gs = g.space();
  const std::size_t np = cs.apex_pairs.size();

  std::vector<SubProb> kernel(np, SubProb{std::vector<Rational>(cs.apex.atom_count(), Rational(0))});
  for (State p = 0; p < np; ++p) {
    auto [s, t] = cs.apex_pairs[p];
    // W-level values, keyed by proj1^-1 U; equal for every choice of U.
    std::map<PointSet, Rational> by_w;
    for (std::uint64_t u = 0; u <= detail::full_mask(fs.atom_count()); ++u) {
      auto partner = linked_partner(static_cast<AtomMask>(u), r, fs, gs);
      if (!partner)
        continue;
      const PointSet uset = fs.points_of(u);
      PointSet w;
      for (State q = 0; q < np; ++q)
        if (uset.contains(cs.apex_pairs[q].first))
          w.insert(q);
      Rational val = f.value(s, uset);
      if (val != g.value(t, gs.points_of(partner->forced)))
        throw InternalError("span: F s U and G t V disagree for a linked pair");
      auto [it, inserted] = by_w.emplace(w, val);
      if (!inserted && it->second != val)
        throw InternalError("span: H is not well defined at " + cs.apex.carrier().name(p));
    }
    for (std::size_t a = 0; a < cs.apex.atom_count(); ++a) {
      auto it = by_w.find(cs.apex.atom(a));
      if (it == by_w.end())
        throw InternalError("span: apex atom without a defining set");
      kernel[p].weight[a] = it->second;
    }
    for (const auto& [w, val] : by_w)
      if (measure_of(cs.apex, kernel[p], w) != val)
        throw InternalError("span: H is not additive over the apex atoms");
  }

  MarkovProcess left = restrict_process(f, cs.left);
  MarkovProcess right = restrict_process(g, cs.right);
  MarkovProcess apex;
  try {
    apex = MarkovProcess(cs.apex, std::move(kernel));
  } catch (const Error& e) {
    throw InternalError(std::string("span: apex kernel invalid: ") + e.what());
  }
  std::vector<State> l(np), rr(np);
  for (State p = 0; p < np; ++p) {
    l[p] = cs.apex_pairs[p].first;
    rr[p] = cs.apex_pairs[p].second;
  }
  MeasurableMap leg_left(cs.apex, left.space(), std::move(l));
  MeasurableMap leg_right(cs.apex, right.space(), std::move(rr));
  return {GirySpan{std::move(left), std::move(right), std::move(apex), std::move(leg_left), std::move(leg_right)},
          {}};
}

/// Legs go from the apex to the two sides and both are homomorphisms.
/// Measurability of the legs and of the apex kernel is enforced when the
/// maps and processes are constructed.
inline Verdict verify_giry_span(const GirySpan& sp) {
  if (!(sp.leg_left.dom() == sp.apex.space()) || !(sp.leg_right.dom() == sp.apex.space()))
    return Verdict::no("a leg does not start at the apex space");
  if (!(sp.leg_left.cod() == sp.left.space()))
    return Verdict::no("left leg does not land in the left space");
  if (!(sp.leg_right.cod() == sp.right.space()))
    return Verdict::no("right leg does not land in the right space");
  if (auto v = is_coalgebra_hom(sp.leg_left, sp.apex, sp.left); !v)
    return Verdict::no("left leg is not a homomorphism " + v.witness);
  if (auto v = is_coalgebra_hom(sp.leg_right, sp.apex, sp.right); !v)
    return Verdict::no("right leg is not a homomorphism " + v.witness);
  return Verdict::yes();
}

/// {(l p, r p) : p in the apex}.
inline Relation span_image_relation(const GirySpan& sp) {
  Relation out(sp.left.size(), sp.right.size());
  for (State p = 0; p < sp.apex.size(); ++p)
    out.insert(sp.leg_left(p), sp.leg_right(p));
  return out;
}

struct FiberConflict {
  std::string image_point; // "(s,t)"
  std::string set;         // image atom, as a set of image points
  std::string first_point; // apex points in the fiber
  std::string second_point;
  Rational first_value;
  Rational second_value;
};

struct FactorResult {
  std::optional<MarkovProcess> process; // on the image relation
  std::vector<FiberConflict> conflicts;
};

/// Tries to put a process on the image of <l,r> making it a homomorphism
/// from the apex. The image gets the largest sigma-algebra making <l,r>
/// measurable; the kernel exists iff H p (<l,r>^-1 W) is constant on each
/// fiber. Every conflict found is reported.
inline FactorResult factor_span_through_image(const GirySpan& sp) {
  const auto& ls = sp.left.space().carrier();
  const auto& rs = sp.right.space().carrier();
  const auto& apex = sp.apex;
  const Relation img = span_image_relation(sp);
  const auto pairs = img.pairs();

  std::vector<std::string> names;
  for (auto p : pairs)
    names.push_back(detail::pair_name(ls, rs, p));
  StateSpace carrier(names);
  std::vector<State> to_image(apex.size());
  for (State p = 0; p < apex.size(); ++p)
    to_image[p] = carrier.require(detail::pair_name(ls, rs, {sp.leg_left(p), sp.leg_right(p)}));

  // Image points whose fibers share an apex atom must share an image atom.
  boost::disjoint_sets_with_storage<> ds(carrier.size());
  for (State x = 0; x < carrier.size(); ++x)
    ds.make_set(x);
  for (const auto& a : apex.space().atoms())
    for (State p : a)
      ds.union_set(to_image[*a.begin()], to_image[p]);
  std::map<std::size_t, PointSet> by_root;
  for (State x = 0; x < carrier.size(); ++x)
    by_root[ds.find_set(x)].insert(x);
  std::vector<PointSet> atoms;
  for (auto& [root, block] : by_root)
    atoms.push_back(std::move(block));
  FinMeasSpace ispace(carrier, std::move(atoms));
  MeasurableMap lr(apex.space(), ispace, to_image);

  FactorResult out;
  std::vector<SubProb> kernel(ispace.size(), SubProb{std::vector<Rational>(ispace.atom_count(), Rational(0))});
  std::vector<std::optional<State>> rep(ispace.size());
  for (State p = 0; p < apex.size(); ++p) {
    State x = to_image[p];
    for (std::size_t j = 0; j < ispace.atom_count(); ++j) {
      Rational v = apex.value(p, lr.preimage(ispace.atom(j)));
      if (!rep[x])
        kernel[x].weight[j] = v;
      else if (kernel[x].weight[j] != v)
        out.conflicts.push_back({carrier.name(x), ispace.describe(ispace.atom(j)), apex.name(*rep[x]), apex.name(p),
                                 kernel[x].weight[j], v});
    }
    if (!rep[x])
      rep[x] = p;
  }
  if (!out.conflicts.empty())
    return out;
  try {
    out.process = MarkovProcess(std::move(ispace), std::move(kernel));
  } catch (const Error& e) {
    throw InternalError(std::string("factorization: image kernel invalid: ") + e.what());
  }
  if (auto v = is_coalgebra_hom(lr, apex, *out.process); !v)
    throw InternalError("factorization: <l,r> is not a homomorphism: " + v.witness);
  return out;
}

} // namespace lrbisim
