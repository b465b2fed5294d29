#pragma once

// Finite labelled transition systems, the Kleisli monoid on [S -> Pow S],
// words over labels, and binary relations between state spaces.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iterator>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lrbisim/error.hpp"

namespace lrbisim {

/// Index of a state within its (lexicographically sorted) state space.
using State = std::size_t;
using StateSet = std::set<State>;
using StatePair = std::pair<State, State>;

inline constexpr std::string_view tau_name = "tau";

inline bool is_token(std::string_view s) {
  if (s.empty())
    return false;
  return std::none_of(s.begin(), s.end(), [](unsigned char c) { return c <= ' ' || c == 0x7f; });
}

struct Label {
  std::string name;

  bool is_tau() const { return name == tau_name; }
  friend auto operator<=>(const Label&, const Label&) = default;
};

inline Label tau() { return Label{std::string(tau_name)}; }

using Word = std::vector<Label>;

inline Word make_word(std::initializer_list<std::string_view> letters) {
  Word w;
  for (auto l : letters)
    w.push_back(Label{std::string(l)});
  return w;
}

inline std::string to_string(const Word& w) {
  if (w.empty())
    return "eps";
  std::string out;
  for (const auto& l : w) {
    if (!out.empty())
      out += ' ';
    out += l.name;
  }
  return out;
}

/// Sorted set of labels. "tau" is the internal action.
class Alphabet {
public:
  Alphabet() = default;

  explicit Alphabet(std::vector<Label> labels) : labels_(std::move(labels)) {
    for (const auto& l : labels_)
      if (!is_token(l.name))
        throw Error("invalid label name '" + l.name + "'");
    std::sort(labels_.begin(), labels_.end());
    auto dup = std::adjacent_find(labels_.begin(), labels_.end());
    if (dup != labels_.end())
      throw Error("duplicate label '" + dup->name + "'");
  }

  static Alphabet of(std::initializer_list<std::string_view> names) {
    std::vector<Label> v;
    for (auto n : names)
      v.push_back(Label{std::string(n)});
    return Alphabet(std::move(v));
  }

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  const Label& operator[](std::size_t i) const { return labels_.at(i); }
  auto begin() const { return labels_.begin(); }
  auto end() const { return labels_.end(); }

  std::optional<std::size_t> index_of(const Label& l) const {
    auto it = std::lower_bound(labels_.begin(), labels_.end(), l);
    if (it == labels_.end() || *it != l)
      return std::nullopt;
    return static_cast<std::size_t>(it - labels_.begin());
  }

  std::size_t require(const Label& l) const {
    auto i = index_of(l);
    if (!i)
      throw Error("label '" + l.name + "' is not in the alphabet");
    return *i;
  }

  bool contains(const Label& l) const { return index_of(l).has_value(); }
  bool has_tau() const { return contains(tau()); }

  Alphabet visible() const {
    std::vector<Label> v;
    std::copy_if(labels_.begin(), labels_.end(), std::back_inserter(v),
                 [](const Label& l) { return !l.is_tau(); });
    return Alphabet(std::move(v));
  }

  Alphabet with_tau() const {
    if (has_tau())
      return *this;
    auto v = labels_;
    v.push_back(tau());
    return Alphabet(std::move(v));
  }

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

private:
  std::vector<Label> labels_;
};

/// Sorted, duplicate-free set of opaque state names. States are referred to
/// by their index in this order.
class StateSpace {
public:
  StateSpace() = default;

  explicit StateSpace(std::vector<std::string> names) : names_(std::move(names)) {
    for (const auto& n : names_)
      if (!is_token(n))
        throw Error("invalid state name '" + n + "'");
    std::sort(names_.begin(), names_.end());
    auto dup = std::adjacent_find(names_.begin(), names_.end());
    if (dup != names_.end())
      throw Error("duplicate state '" + *dup + "'");
  }

  /// `prefix0 .. prefix{n-1}`, zero-padded so that index order matches
  /// lexicographic order.
  static StateSpace numbered(std::size_t n, std::string_view prefix = "s") {
    std::size_t width = std::to_string(n == 0 ? 0 : n - 1).size();
    std::vector<std::string> v;
    for (std::size_t i = 0; i < n; ++i) {
      auto digits = std::to_string(i);
      v.push_back(std::string(prefix) + std::string(width - digits.size(), '0') + digits);
    }
    return StateSpace(std::move(v));
  }

  std::size_t size() const { return names_.size(); }
  bool empty() const { return names_.empty(); }
  const std::string& name(State s) const { return names_.at(s); }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<State> index_of(std::string_view n) const {
    auto it = std::lower_bound(names_.begin(), names_.end(), n);
    if (it == names_.end() || *it != n)
      return std::nullopt;
    return static_cast<State>(it - names_.begin());
  }

  State require(std::string_view n) const {
    auto i = index_of(n);
    if (!i)
      throw Error("unknown state '" + std::string(n) + "'");
    return *i;
  }

  friend bool operator==(const StateSpace&, const StateSpace&) = default;

private:
  std::vector<std::string> names_;
};

/// An element of [S -> Pow S] over the space {0, .., size-1}. Total: dead
/// states map to the empty set.
class Endo {
public:
  Endo() = default;
  explicit Endo(std::size_t size) : image_(size) {}

  explicit Endo(std::vector<StateSet> image) : image_(std::move(image)) {
    for (const auto& succ : image_)
      if (!succ.empty() && *succ.rbegin() >= image_.size())
        throw Error("endo image leaves its state space");
  }

  std::size_t size() const { return image_.size(); }

  const StateSet& operator()(State s) const {
    if (s >= image_.size())
      throw Error("state index " + std::to_string(s) + " out of range");
    return image_[s];
  }

  const std::vector<StateSet>& image() const { return image_; }

  void add(State from, State to) {
    if (from >= size() || to >= size())
      throw Error("state index out of range");
    image_[from].insert(to);
  }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& s : image_)
      n += s.size();
    return n;
  }

  friend bool operator==(const Endo&, const Endo&) = default;

private:
  std::vector<StateSet> image_;
};

/// Unit of the Kleisli monoid: s |-> {s}.
inline Endo kleisli_identity(std::size_t size) {
  Endo id(size);
  for (State s = 0; s < size; ++s)
    id.add(s, s);
  return id;
}

/// (f.g)(s) = union of g(s') over s' in f(s).
inline Endo kleisli_compose(const Endo& f, const Endo& g) {
  if (f.size() != g.size())
    throw Error("kleisli_compose: state spaces differ");
  std::vector<StateSet> out(f.size());
  for (State s = 0; s < f.size(); ++s)
    for (State mid : f(s))
      out[s].insert(g(mid).begin(), g(mid).end());
  return Endo(std::move(out));
}

/// Pointwise inclusion; endos on different spaces are incomparable.
inline bool endo_leq(const Endo& f, const Endo& g) {
  if (f.size() != g.size())
    return false;
  for (State s = 0; s < f.size(); ++s)
    if (!std::includes(g(s).begin(), g(s).end(), f(s).begin(), f(s).end()))
      return false;
  return true;
}

inline Endo endo_union(const Endo& f, const Endo& g) {
  if (f.size() != g.size())
    throw Error("endo_union: state spaces differ");
  auto out = f.image();
  for (State s = 0; s < g.size(); ++s)
    out[s].insert(g(s).begin(), g(s).end());
  return Endo(std::move(out));
}

struct RawTransition {
  std::string src;
  std::string label;
  std::string dst;
};

/// Unchecked system description, as read from a file or built by hand.
struct RawLts {
  std::vector<std::string> states;
  std::vector<std::string> labels;
  std::vector<RawTransition> transitions;
};

class Lts {
public:
  Lts() = default;

  Lts(StateSpace states, Alphabet alphabet, std::vector<Endo> trans)
    : states_(std::move(states)), alphabet_(std::move(alphabet)), trans_(std::move(trans)) {
    if (trans_.size() != alphabet_.size())
      throw Error("one transition map per label is required");
    for (const auto& e : trans_)
      if (e.size() != states_.size())
        throw Error("transition map does not match the state space");
  }

  const StateSpace& states() const { return states_; }
  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t size() const { return states_.size(); }

  const Endo& operator[](const Label& a) const { return trans_[alphabet_.require(a)]; }
  const Endo& row(std::size_t label_index) const { return trans_.at(label_index); }
  const std::vector<Endo>& rows() const { return trans_; }

  std::size_t transition_count() const {
    std::size_t n = 0;
    for (const auto& e : trans_)
      n += e.edge_count();
    return n;
  }

  friend bool operator==(const Lts&, const Lts&) = default;

private:
  StateSpace states_;
  Alphabet alphabet_;
  std::vector<Endo> trans_;
};

inline Lts validate_lts(const RawLts& raw) {
  StateSpace states(raw.states);
  std::vector<Label> labels;
  for (const auto& l : raw.labels)
    labels.push_back(Label{l});
  Alphabet alphabet(std::move(labels));
  std::vector<Endo> trans(alphabet.size(), Endo(states.size()));
  for (const auto& t : raw.transitions) {
    auto a = alphabet.index_of(Label{t.label});
    if (!a)
      throw Error("transition '" + t.src + " " + t.label + " " + t.dst + "' uses undeclared label '" +
                  t.label + "'");
    trans[*a].add(states.require(t.src), states.require(t.dst));
  }
  return Lts(std::move(states), std::move(alphabet), std::move(trans));
}

inline const StateSet& successors(const Lts& f, const Label& a, State s) {
  if (s >= f.size())
    throw Error("state index " + std::to_string(s) + " out of range");
  return f[a](s);
}

/// Extension of the transition map to words; the empty word is the identity.
inline Endo apply_word(const Lts& f, const Word& w) {
  Endo acc = kleisli_identity(f.size());
  for (const auto& letter : w)
    acc = kleisli_compose(acc, f[letter]);
  return acc;
}

/// F <= G: same states and alphabet, pointwise inclusion of every row.
inline bool ts_leq(const Lts& f, const Lts& g) {
  if (f.states() != g.states() || f.alphabet() != g.alphabet())
    return false;
  for (std::size_t i = 0; i < f.alphabet().size(); ++i)
    if (!endo_leq(f.row(i), g.row(i)))
      return false;
  return true;
}

/// R between {0..left-1} and {0..right-1}, stored as a dense bit matrix.
class Relation {
public:
  Relation() = default;
  Relation(std::size_t left, std::size_t right) : left_(left), right_(right), bits_(left * right, 0) {}

  static Relation full(std::size_t left, std::size_t right) {
    Relation r(left, right);
    std::fill(r.bits_.begin(), r.bits_.end(), 1);
    return r;
  }

  static Relation diagonal(std::size_t n) {
    Relation r(n, n);
    for (State s = 0; s < n; ++s)
      r.insert(s, s);
    return r;
  }

  static Relation from_pairs(std::size_t left, std::size_t right, const std::vector<StatePair>& pairs) {
    Relation r(left, right);
    for (auto [s, t] : pairs)
      r.insert(s, t);
    return r;
  }

  /// Bit i*right+j of `mask` selects the pair (i, j). Requires left*right <= 64.
  static Relation from_mask(std::size_t left, std::size_t right, std::uint64_t mask) {
    if (left * right > 64)
      throw Error("from_mask: relation too large for a 64-bit mask");
    Relation r(left, right);
    for (std::size_t k = 0; k < left * right; ++k)
      r.bits_[k] = static_cast<char>((mask >> k) & 1u);
    return r;
  }

  std::size_t left_size() const { return left_; }
  std::size_t right_size() const { return right_; }

  bool contains(State s, State t) const { return s < left_ && t < right_ && bits_[s * right_ + t] != 0; }

  void insert(State s, State t) {
    check(s, t);
    bits_[s * right_ + t] = 1;
  }

  void erase(State s, State t) {
    check(s, t);
    bits_[s * right_ + t] = 0;
  }

  std::size_t size() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1)); }
  bool empty() const { return size() == 0; }

  /// Pairs in lexicographic (left, right) order.
  std::vector<StatePair> pairs() const {
    std::vector<StatePair> out;
    for (State s = 0; s < left_; ++s)
      for (State t = 0; t < right_; ++t)
        if (bits_[s * right_ + t])
          out.emplace_back(s, t);
    return out;
  }

  StateSet image_of(State s) const {
    StateSet out;
    for (State t = 0; t < right_; ++t)
      if (contains(s, t))
        out.insert(t);
    return out;
  }

  StateSet preimage_of(State t) const {
    StateSet out;
    for (State s = 0; s < left_; ++s)
      if (contains(s, t))
        out.insert(s);
    return out;
  }

  Relation inverse() const {
    Relation r(right_, left_);
    for (auto [s, t] : pairs())
      r.insert(t, s);
    return r;
  }

  bool subset_of(const Relation& o) const {
    if (left_ != o.left_ || right_ != o.right_)
      return false;
    for (std::size_t k = 0; k < bits_.size(); ++k)
      if (bits_[k] && !o.bits_[k])
        return false;
    return true;
  }

  Relation& operator|=(const Relation& o) {
    if (left_ != o.left_ || right_ != o.right_)
      throw Error("relation union: spaces differ");
    for (std::size_t k = 0; k < bits_.size(); ++k)
      bits_[k] = static_cast<char>(bits_[k] | o.bits_[k]);
    return *this;
  }

  friend bool operator==(const Relation&, const Relation&) = default;

private:
  void check(State s, State t) const {
    if (s >= left_ || t >= right_)
      throw Error("relation pair out of range");
  }

  std::size_t left_ = 0;
  std::size_t right_ = 0;
  std::vector<char> bits_;
};

/// Relational composition R;Q = {(a,c) : a R b, b Q c}.
inline Relation compose(const Relation& r, const Relation& q) {
  if (r.right_size() != q.left_size())
    throw Error("compose: middle spaces differ");
  Relation out(r.left_size(), q.right_size());
  for (auto [a, b] : r.pairs())
    for (State c = 0; c < q.right_size(); ++c)
      if (q.contains(b, c))
        out.insert(a, c);
  return out;
}

} // namespace lrbisim
