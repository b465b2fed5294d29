#pragma once

// Finite measurable spaces and sub-probability measures.
//
// A finite sigma-algebra is determined by its atoms, so a space is stored
// as a partition of its carrier; the measurable sets are exactly the unions
// of atoms. A measure is stored by its weight on each atom.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lrbisim/error.hpp"
#include "lrbisim/lts.hpp"
#include "lrbisim/rational.hpp"

namespace lrbisim {

using PointSet = std::set<State>;

/// Outcome of a check that carries a human-readable witness on failure.
struct Verdict {
  bool holds = true;
  std::string witness;

  static Verdict yes() { return {}; }
  static Verdict no(std::string why) { return {false, std::move(why)}; }
  explicit operator bool() const { return holds; }
};

class FinMeasSpace {
public:
  FinMeasSpace() = default;

  /// Atoms must partition the carrier into non-empty blocks. They are
  /// stored in canonical order: by smallest member.
  FinMeasSpace(StateSpace carrier, std::vector<PointSet> atoms)
    : carrier_(std::move(carrier)), atoms_(std::move(atoms)), atom_of_(carrier_.size(), npos) {
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (atoms_[i].empty())
        throw Error("empty atom");
      for (State x : atoms_[i]) {
        if (x >= carrier_.size())
          throw Error("atom member outside the carrier");
        if (atom_of_[x] != npos)
          throw Error("point '" + carrier_.name(x) + "' lies in two atoms");
        atom_of_[x] = i;
      }
    }
    for (State x = 0; x < carrier_.size(); ++x)
      if (atom_of_[x] == npos)
        throw Error("point '" + carrier_.name(x) + "' is in no atom");
    std::sort(atoms_.begin(), atoms_.end(), [](const PointSet& a, const PointSet& b) { return *a.begin() < *b.begin(); });
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      for (State x : atoms_[i])
        atom_of_[x] = i;
  }

  /// Every subset measurable.
  static FinMeasSpace discrete(StateSpace carrier) {
    std::vector<PointSet> atoms;
    for (State x = 0; x < carrier.size(); ++x)
      atoms.push_back({x});
    return FinMeasSpace(std::move(carrier), std::move(atoms));
  }

  /// Only the empty set and the carrier measurable.
  static FinMeasSpace indiscrete(StateSpace carrier) {
    std::vector<PointSet> atoms;
    if (!carrier.empty()) {
      PointSet all;
      for (State x = 0; x < carrier.size(); ++x)
        all.insert(x);
      atoms.push_back(std::move(all));
    }
    return FinMeasSpace(std::move(carrier), std::move(atoms));
  }

  const StateSpace& carrier() const { return carrier_; }
  std::size_t size() const { return carrier_.size(); }
  std::size_t atom_count() const { return atoms_.size(); }
  const std::vector<PointSet>& atoms() const { return atoms_; }
  const PointSet& atom(std::size_t i) const { return atoms_.at(i); }
  std::size_t atom_of(State x) const { return atom_of_.at(x); }

  PointSet all_points() const {
    PointSet out;
    for (State x = 0; x < size(); ++x)
      out.insert(x);
    return out;
  }

  bool is_measurable(const PointSet& u) const {
    for (State x : u) {
      if (x >= size())
        return false;
      for (State y : atoms_[atom_of_[x]])
        if (!u.contains(y))
          return false;
    }
    return true;
  }

  /// Indices of the atoms making up a measurable set.
  std::vector<std::size_t> atoms_in(const PointSet& u) const {
    if (!is_measurable(u))
      throw Error("set " + describe(u) + " is not measurable");
    std::set<std::size_t> idx;
    for (State x : u)
      idx.insert(atom_of_[x]);
    return {idx.begin(), idx.end()};
  }

  /// Union of the atoms selected by bit i of `mask`.
  PointSet points_of(std::uint64_t mask) const {
    PointSet out;
    for (std::size_t i = 0; i < atoms_.size() && i < 64; ++i)
      if ((mask >> i) & 1u)
        out.insert(atoms_[i].begin(), atoms_[i].end());
    return out;
  }

  std::string describe(const PointSet& u) const {
    std::string out = "{";
    for (State x : u) {
      if (out.size() > 1)
        out += ',';
      out += x < size() ? carrier_.name(x) : "#" + std::to_string(x);
    }
    return out + "}";
  }

  friend bool operator==(const FinMeasSpace&, const FinMeasSpace&) = default;

private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  StateSpace carrier_;
  std::vector<PointSet> atoms_;
  std::vector<std::size_t> atom_of_;
};

/// A sub-probability measure by its weight on each atom of an ambient
/// space (the space is supplied by the caller).
struct SubProb {
  std::vector<Rational> weight;

  Rational total() const { return std::accumulate(weight.begin(), weight.end(), Rational(0)); }
  friend bool operator==(const SubProb&, const SubProb&) = default;
};

inline Rational measure_of(const FinMeasSpace& space, const SubProb& pi, const PointSet& u) {
  if (pi.weight.size() != space.atom_count())
    throw Error("measure does not match the space");
  Rational sum = 0;
  for (std::size_t i : space.atoms_in(u))
    sum += pi.weight[i];
  return sum;
}

inline SubProb dirac(const FinMeasSpace& space, State x) {
  if (x >= space.size())
    throw Error("dirac: point outside the carrier");
  SubProb pi{std::vector<Rational>(space.atom_count(), Rational(0))};
  pi.weight[space.atom_of(x)] = 1;
  return pi;
}

/// A point map whose preimages of atoms are measurable.
class MeasurableMap {
public:
  MeasurableMap() = default;

  MeasurableMap(FinMeasSpace dom, FinMeasSpace cod, std::vector<State> fn)
    : dom_(std::move(dom)), cod_(std::move(cod)), fn_(std::move(fn)) {
    if (fn_.size() != dom_.size())
      throw Error("map is not total on its domain");
    for (State y : fn_)
      if (y >= cod_.size())
        throw Error("map leaves its codomain");
    for (const auto& v : cod_.atoms())
      if (!dom_.is_measurable(preimage(v)))
        throw Error("preimage of " + cod_.describe(v) + " is not measurable");
  }

  static MeasurableMap identity(const FinMeasSpace& space) {
    std::vector<State> fn(space.size());
    std::iota(fn.begin(), fn.end(), State{0});
    return MeasurableMap(space, space, std::move(fn));
  }

  const FinMeasSpace& dom() const { return dom_; }
  const FinMeasSpace& cod() const { return cod_; }
  State operator()(State x) const { return fn_.at(x); }
  const std::vector<State>& table() const { return fn_; }

  PointSet preimage(const PointSet& v) const {
    PointSet out;
    for (State x = 0; x < fn_.size(); ++x)
      if (v.contains(fn_[x]))
        out.insert(x);
    return out;
  }

  friend bool operator==(const MeasurableMap&, const MeasurableMap&) = default;

private:
  FinMeasSpace dom_;
  FinMeasSpace cod_;
  std::vector<State> fn_;
};

/// Pushforward: (Giry f)(pi)(V) = pi(f^-1 V), stored on the codomain atoms.
inline SubProb giry_map(const MeasurableMap& f, const SubProb& pi) {
  if (pi.weight.size() != f.dom().atom_count())
    throw Error("giry_map: measure does not live on the map's domain");
  SubProb out{std::vector<Rational>(f.cod().atom_count(), Rational(0))};
  for (std::size_t j = 0; j < f.cod().atom_count(); ++j)
    out.weight[j] = measure_of(f.dom(), pi, f.preimage(f.cod().atom(j)));
  return out;
}

} // namespace lrbisim
