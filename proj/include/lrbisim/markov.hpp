#pragma once

// Markov processes over finite measurable spaces and probabilistic
// bisimulation, both for an equivalence on one process and for a relation
// between two processes via their sum.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <boost/pending/disjoint_sets.hpp>

#include "lrbisim/error.hpp"
#include "lrbisim/lts.hpp"
#include "lrbisim/measure.hpp"
#include "lrbisim/rational.hpp"

namespace lrbisim {

/// A kernel S -> sub-probability measures on S. Measurability of the kernel
/// is read as: points in the same atom have the same measure.
class MarkovProcess {
public:
  MarkovProcess() = default;

  MarkovProcess(FinMeasSpace space, std::vector<SubProb> kernel)
    : space_(std::move(space)), kernel_(std::move(kernel)) {
    if (kernel_.size() != space_.size())
      throw Error("kernel must give a measure for every point");
    for (State s = 0; s < kernel_.size(); ++s) {
      const auto& pi = kernel_[s];
      const std::string who = "kernel at '" + space_.carrier().name(s) + "'";
      if (pi.weight.size() != space_.atom_count())
        throw Error(who + " does not match the atoms");
      for (const auto& w : pi.weight)
        if (w < 0)
          throw Error(who + " has a negative weight");
      if (pi.total() > 1)
        throw Error(who + " has total mass " + to_string(pi.total()) + " > 1");
    }
    for (std::size_t a = 0; a < space_.atom_count(); ++a) {
      State first = *space_.atom(a).begin();
      for (State s : space_.atom(a))
        if (kernel_[s] != kernel_[first])
          throw Error("kernel is not measurable: '" + space_.carrier().name(first) + "' and '" +
                      space_.carrier().name(s) + "' share an atom but have different measures");
    }
  }

  const FinMeasSpace& space() const { return space_; }
  std::size_t size() const { return space_.size(); }
  const SubProb& operator()(State s) const { return kernel_.at(s); }
  const std::vector<SubProb>& kernel() const { return kernel_; }
  const std::string& name(State s) const { return space_.carrier().name(s); }

  /// F s U.
  Rational value(State s, const PointSet& u) const { return measure_of(space_, kernel_.at(s), u); }

  friend bool operator==(const MarkovProcess&, const MarkovProcess&) = default;

private:
  FinMeasSpace space_;
  std::vector<SubProb> kernel_;
};

/// Unvalidated process as read from a file: atoms by state name, kernel
/// weights by index into `atoms` (missing entries are zero).
struct RawMarkov {
  std::vector<std::string> states;
  std::vector<std::vector<std::string>> atoms;
  std::map<std::string, std::map<std::size_t, Rational>> kernel;
};

inline MarkovProcess validate_markov(const RawMarkov& raw) {
  StateSpace carrier(raw.states);
  std::vector<PointSet> atoms;
  for (const auto& block : raw.atoms) {
    PointSet ps;
    for (const auto& n : block)
      if (!ps.insert(carrier.require(n)).second)
        throw Error("state '" + n + "' repeated in an atom");
    atoms.push_back(std::move(ps));
  }
  FinMeasSpace space(carrier, atoms);
  std::vector<SubProb> kernel(carrier.size(), SubProb{std::vector<Rational>(space.atom_count(), Rational(0))});
  for (const auto& [name, row] : raw.kernel) {
    State s = carrier.require(name);
    for (const auto& [raw_index, w] : row) {
      if (raw_index >= atoms.size())
        throw Error("atom index " + std::to_string(raw_index) + " out of range in the kernel of '" + name + "'");
      kernel[s].weight[space.atom_of(*atoms[raw_index].begin())] = w;
    }
  }
  return MarkovProcess(std::move(space), std::move(kernel));
}

/// f is a homomorphism F -> G iff G (f s) V = F s (f^-1 V) for every s and
/// every measurable V; by additivity it suffices to take V an atom.
inline Verdict is_coalgebra_hom(const MeasurableMap& f, const MarkovProcess& pf, const MarkovProcess& pg) {
  if (!(f.dom() == pf.space()) || !(f.cod() == pg.space()))
    throw Error("homomorphism check: map does not go between the processes' spaces");
  for (State s = 0; s < pf.size(); ++s)
    for (std::size_t j = 0; j < pg.space().atom_count(); ++j) {
      const PointSet& v = pg.space().atom(j);
      Rational lhs = pg(f(s)).weight[j];
      Rational rhs = pf.value(s, f.preimage(v));
      if (lhs != rhs)
        return Verdict::no("at state '" + pf.name(s) + "', set " + pg.space().describe(v) + ": target gives " +
                           to_string(lhs) + " but source gives " + to_string(rhs) + " on the preimage");
    }
  return Verdict::yes();
}

inline bool is_reflexive(const Relation& r) {
  if (r.left_size() != r.right_size())
    return false;
  for (State s = 0; s < r.left_size(); ++s)
    if (!r.contains(s, s))
      return false;
  return true;
}

inline bool is_symmetric(const Relation& r) { return r.left_size() == r.right_size() && r == r.inverse(); }

inline bool is_transitive(const Relation& r) {
  return r.left_size() == r.right_size() && compose(r, r).subset_of(r);
}

inline bool is_equivalence(const Relation& r) { return is_reflexive(r) && is_symmetric(r) && is_transitive(r); }

namespace detail {

inline void require_equivalence(const Relation& r, std::size_t n, const char* op) {
  if (r.left_size() != n || r.right_size() != n)
    throw Error(std::string(op) + ": relation does not match the space");
  if (!is_equivalence(r))
    throw Error(std::string(op) + ": relation is not an equivalence");
}

/// Finest partition coarser than both the atoms and the classes of R.
/// Its blocks are the smallest R-closed measurable sets; the R-closed
/// measurable sets are exactly their unions. Blocks come ordered by
/// smallest member.
inline std::vector<PointSet> join_blocks(const FinMeasSpace& space, const Relation& r) {
  const std::size_t n = space.size();
  boost::disjoint_sets_with_storage<> ds(n);
  for (State x = 0; x < n; ++x)
    ds.make_set(x);
  for (const auto& atom : space.atoms())
    for (State x : atom)
      ds.union_set(*atom.begin(), x);
  for (auto [s, t] : r.pairs())
    ds.union_set(s, t);
  std::map<std::size_t, PointSet> by_root;
  for (State x = 0; x < n; ++x)
    by_root[ds.find_set(x)].insert(x);
  std::vector<PointSet> out;
  for (auto& [root, block] : by_root)
    out.push_back(std::move(block));
  std::sort(out.begin(), out.end(), [](const PointSet& a, const PointSet& b) { return *a.begin() < *b.begin(); });
  return out;
}

/// Classes of an equivalence, ordered by smallest member.
inline std::vector<PointSet> classes_of(const Relation& r) {
  std::vector<PointSet> out;
  std::vector<bool> seen(r.left_size(), false);
  for (State s = 0; s < r.left_size(); ++s) {
    if (seen[s])
      continue;
    PointSet cls = r.image_of(s);
    for (State x : cls)
      seen[x] = true;
    out.push_back(std::move(cls));
  }
  return out;
}

} // namespace detail

/// An equivalence R is a bisimulation on F iff related points agree on every
/// R-closed measurable set; by additivity, on every join block.
inline Verdict is_prob_bisimulation_equiv(const Relation& r, const MarkovProcess& f) {
  detail::require_equivalence(r, f.size(), "probabilistic bisimulation");
  auto blocks = detail::join_blocks(f.space(), r);
  for (auto [s, s2] : r.pairs())
    for (const auto& b : blocks) {
      Rational x = f.value(s, b), y = f.value(s2, b);
      if (x != y)
        return Verdict::no("'" + f.name(s) + "' and '" + f.name(s2) + "' are related but give " + to_string(x) +
                           " and " + to_string(y) + " to the closed set " + f.space().describe(b));
    }
  return Verdict::yes();
}

struct Quotient {
  FinMeasSpace space;
  MeasurableMap map;
};

/// X/R with the largest sigma-algebra making the quotient map measurable.
/// Classes are named "[a,b,..]" after their members.
inline Quotient quotient_space(const FinMeasSpace& x, const Relation& r) {
  detail::require_equivalence(r, x.size(), "quotient_space");
  auto classes = detail::classes_of(r);
  auto class_name = [&](const PointSet& cls) {
    std::string n = "[";
    for (State s : cls) {
      if (n.size() > 1)
        n += ',';
      n += x.carrier().name(s);
    }
    return n + "]";
  };
  std::vector<std::string> names;
  for (const auto& cls : classes)
    names.push_back(class_name(cls));
  StateSpace carrier(names);
  std::vector<State> fn(x.size());
  for (const auto& cls : classes) {
    State q = carrier.require(class_name(cls));
    for (State s : cls)
      fn[s] = q;
  }
  std::vector<PointSet> atoms;
  for (const auto& block : detail::join_blocks(x, r)) {
    PointSet qa;
    for (State s : block)
      qa.insert(fn[s]);
    atoms.push_back(std::move(qa));
  }
  FinMeasSpace qspace(std::move(carrier), std::move(atoms));
  MeasurableMap e(x, qspace, std::move(fn));
  return {std::move(qspace), std::move(e)};
}

struct QuotientResult {
  std::optional<MarkovProcess> process;
  MeasurableMap map;
  std::string witness;
};

/// Kernel on X/R given by Q [s] W = F s (e^-1 W), defined when every member
/// of each class agrees on each preimage.
inline QuotientResult quotient_process(const MarkovProcess& f, const Relation& r) {
  Quotient q = quotient_space(f.space(), r);
  const FinMeasSpace& qs = q.space;
  std::vector<SubProb> kernel(qs.size(), SubProb{std::vector<Rational>(qs.atom_count(), Rational(0))});
  std::vector<std::optional<State>> rep(qs.size());
  for (State s = 0; s < f.size(); ++s) {
    State c = q.map(s);
    for (std::size_t j = 0; j < qs.atom_count(); ++j) {
      const PointSet pre = q.map.preimage(qs.atom(j));
      Rational v = f.value(s, pre);
      if (!rep[c]) {
        kernel[c].weight[j] = v;
      } else if (kernel[c].weight[j] != v) {
        return {std::nullopt, q.map,
                "'" + f.name(*rep[c]) + "' and '" + f.name(s) + "' lie in " + qs.carrier().name(c) + " but give " +
                    to_string(kernel[c].weight[j]) + " and " + to_string(v) + " to " + f.space().describe(pre)};
      }
    }
    if (!rep[c])
      rep[c] = s;
  }
  MarkovProcess qp(qs, std::move(kernel));
  if (auto v = is_coalgebra_hom(q.map, f, qp); !v)
    throw InternalError("quotient map is not a homomorphism: " + v.witness);
  return {std::move(qp), q.map, {}};
}

struct RelationAnalysis {
  bool z_closed = false;
  Relation r_star; // on S+T: S-points first, then T-points
  bool is_per = false;
  bool is_equivalence = false;
};

/// R* = R.R^op + R + R^op + R^op.R on the disjoint union S+T.
inline Relation r_star(const Relation& r) {
  const std::size_t n = r.left_size(), m = r.right_size();
  Relation out(n + m, n + m);
  const Relation op = r.inverse();
  for (auto [a, b] : compose(r, op).pairs())
    out.insert(a, b);
  for (auto [a, b] : r.pairs()) {
    out.insert(a, n + b);
    out.insert(n + b, a);
  }
  for (auto [a, b] : compose(op, r).pairs())
    out.insert(n + a, n + b);
  return out;
}

inline RelationAnalysis analyze_relation(const Relation& r) {
  RelationAnalysis out;
  out.z_closed = compose(compose(r, r.inverse()), r).subset_of(r);
  out.r_star = r_star(r);
  out.is_per = is_symmetric(out.r_star) && is_transitive(out.r_star);
  if (out.is_per != out.z_closed)
    throw InternalError("z-closure and the partial-equivalence test of R* disagree");
  out.is_equivalence = out.is_per && is_reflexive(out.r_star);
  return out;
}

struct SumProcess {
  MarkovProcess process;
  MeasurableMap inl;
  MeasurableMap inr;
};

/// F+G on S+T, points named "inl:x" and "inr:y".
inline SumProcess sum_process(const MarkovProcess& f, const MarkovProcess& g) {
  const std::size_t n = f.size(), m = g.size();
  std::vector<std::string> names;
  for (const auto& x : f.space().carrier().names())
    names.push_back("inl:" + x);
  for (const auto& y : g.space().carrier().names())
    names.push_back("inr:" + y);
  StateSpace carrier(names);
  std::vector<PointSet> atoms;
  for (const auto& a : f.space().atoms())
    atoms.push_back(a);
  for (const auto& a : g.space().atoms()) {
    PointSet shifted;
    for (State y : a)
      shifted.insert(n + y);
    atoms.push_back(std::move(shifted));
  }
  FinMeasSpace space(std::move(carrier), std::move(atoms));
  const std::size_t fa = f.space().atom_count(), ga = g.space().atom_count();
  std::vector<SubProb> kernel;
  for (State x = 0; x < n; ++x) {
    SubProb pi{std::vector<Rational>(fa + ga, Rational(0))};
    for (std::size_t i = 0; i < fa; ++i)
      pi.weight[i] = f(x).weight[i];
    kernel.push_back(std::move(pi));
  }
  for (State y = 0; y < m; ++y) {
    SubProb pi{std::vector<Rational>(fa + ga, Rational(0))};
    for (std::size_t i = 0; i < ga; ++i)
      pi.weight[fa + i] = g(y).weight[i];
    kernel.push_back(std::move(pi));
  }
  MarkovProcess sum(space, std::move(kernel));
  std::vector<State> left(n), right(m);
  for (State x = 0; x < n; ++x)
    left[x] = x;
  for (State y = 0; y < m; ++y)
    right[y] = n + y;
  MeasurableMap inl(f.space(), space, std::move(left));
  MeasurableMap inr(g.space(), space, std::move(right));
  return {std::move(sum), std::move(inl), std::move(inr)};
}

enum class BetweenStatus { holds, fails, undefined };

inline const char* to_string(BetweenStatus s) {
  switch (s) {
  case BetweenStatus::holds:
    return "holds";
  case BetweenStatus::fails:
    return "fails";
  case BetweenStatus::undefined:
    return "undefined";
  }
  return "?";
}

struct BetweenResult {
  BetweenStatus status = BetweenStatus::undefined;
  std::string message; // witness when failing, diagnostic when undefined
};

/// R is a bisimulation between F and G iff R* is an equivalence on S+T and a
/// bisimulation on F+G. When R* is not an equivalence the question is
/// undefined and the failing property is named.
inline BetweenResult is_prob_bisimulation_between(const Relation& r, const MarkovProcess& f, const MarkovProcess& g) {
  if (r.left_size() != f.size() || r.right_size() != g.size())
    throw Error("relation does not match the processes' state spaces");
  RelationAnalysis an = analyze_relation(r);
  if (!an.is_equivalence) {
    std::string why;
    if (!an.z_closed) {
      why = "R* is not transitive: R is not z-closed";
    } else {
      for (State s = 0; s < f.size() && why.empty(); ++s)
        if (r.image_of(s).empty())
          why = "R* is not reflexive: R is not total ('" + f.name(s) + "' has no partner)";
      for (State t = 0; t < g.size() && why.empty(); ++t)
        if (r.preimage_of(t).empty())
          why = "R* is not reflexive: R is not onto ('" + g.name(t) + "' has no partner)";
    }
    return {BetweenStatus::undefined, why};
  }
  SumProcess sum = sum_process(f, g);
  Verdict v = is_prob_bisimulation_equiv(an.r_star, sum.process);
  if (!v)
    return {BetweenStatus::fails, v.witness};
  return {BetweenStatus::holds, {}};
}

} // namespace lrbisim
