#pragma once

// Weak bisimulation. Four routes are provided and must agree:
//   direct      each single move matched by a derived (tau-absorbing) move;
//   derived     derived transitions on one-letter words related by Pow R;
//   saturation  strong bisimulation between the saturated systems;
//   lax         the laxified systems related at every generator word.
//
// A lax system is stored by its generators: eps = F(epsilon) and one endo
// per visible letter. Values on longer words follow by composition, so the
// word-level laws id <= F(eps), F(vw) = F(v).F(w) reduce to
//   id <= eps,  eps.eps = eps,  eps.f_a = f_a = f_a.eps
// which validate_lax checks.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "lrbisim/error.hpp"
#include "lrbisim/lifting.hpp"
#include "lrbisim/lts.hpp"
#include "lrbisim/strong.hpp"

namespace lrbisim {

/// Deletes every tau from w.
inline Word hat(const Word& w) {
  Word out;
  for (const auto& l : w)
    if (!l.is_tau())
      out.push_back(l);
  return out;
}

namespace detail {

inline void require_tau(const Lts& f, const char* op) {
  if (!f.alphabet().has_tau())
    throw Error(std::string(op) + ": the system has no tau label");
}

/// Reflexive-transitive closure of an endo.
inline Endo star(const Endo& step) {
  std::vector<StateSet> out(step.size());
  for (State s = 0; s < step.size(); ++s) {
    std::vector<State> todo{s};
    out[s].insert(s);
    while (!todo.empty()) {
      State x = todo.back();
      todo.pop_back();
      for (State y : step(x))
        if (out[s].insert(y).second)
          todo.push_back(y);
    }
  }
  return Endo(std::move(out));
}

} // namespace detail

/// F(tau)*, as an endo.
inline Endo tau_star(const Lts& f) {
  detail::require_tau(f, "tau_star");
  return detail::star(f[tau()]);
}

/// The system derived from F at a tau-free word v = a1..ak:
/// tau*.a1.tau* ... ak.tau*, and tau* itself at the empty word.
inline Endo derived_transitions(const Lts& f, const Word& v) {
  detail::require_tau(f, "derived_transitions");
  Endo closure = tau_star(f);
  Endo acc = closure;
  for (const auto& a : v) {
    if (a.is_tau())
      throw Error("derived_transitions: word must be tau-free");
    acc = kleisli_compose(kleisli_compose(acc, f[a]), closure);
  }
  return acc;
}

/// Least saturated system above F: tau |-> tau*, a |-> tau*.a.tau*.
inline Lts saturate(const Lts& f) {
  detail::require_tau(f, "saturate");
  Endo closure = tau_star(f);
  std::vector<Endo> rows;
  for (const auto& a : f.alphabet())
    rows.push_back(a.is_tau() ? closure : kleisli_compose(kleisli_compose(closure, f[a]), closure));
  return Lts(f.states(), f.alphabet(), std::move(rows));
}

/// id <= F(tau), F(tau).F(tau) <= F(tau), and F(tau).F(a).F(tau) <= F(a)
/// for every visible a.
inline bool is_saturated(const Lts& f) {
  detail::require_tau(f, "is_saturated");
  const Endo& t = f[tau()];
  if (!endo_leq(kleisli_identity(f.size()), t) || !endo_leq(kleisli_compose(t, t), t))
    return false;
  for (const auto& a : f.alphabet())
    if (!a.is_tau() && !endo_leq(kleisli_compose(kleisli_compose(t, f[a]), t), f[a]))
      return false;
  return true;
}

class LaxLts {
public:
  LaxLts() = default;

  LaxLts(StateSpace states, Alphabet visible, Endo eps, std::vector<Endo> letters)
    : states_(std::move(states)), visible_(std::move(visible)), eps_(std::move(eps)), letters_(std::move(letters)) {
    if (visible_.has_tau())
      throw Error("a lax system's alphabet must not contain tau");
    if (letters_.size() != visible_.size())
      throw Error("one generator per visible letter is required");
    if (eps_.size() != states_.size())
      throw Error("eps generator does not match the state space");
    for (const auto& e : letters_)
      if (e.size() != states_.size())
        throw Error("letter generator does not match the state space");
  }

  const StateSpace& states() const { return states_; }
  const Alphabet& visible() const { return visible_; }
  std::size_t size() const { return states_.size(); }
  const Endo& eps() const { return eps_; }
  const Endo& letter(const Label& a) const { return letters_[visible_.require(a)]; }
  const std::vector<Endo>& letters() const { return letters_; }

  friend bool operator==(const LaxLts&, const LaxLts&) = default;

private:
  StateSpace states_;
  Alphabet visible_;
  Endo eps_;
  std::vector<Endo> letters_;
};

inline LaxLts laxify(const Lts& f) {
  detail::require_tau(f, "laxify");
  Endo closure = tau_star(f);
  std::vector<Endo> letters;
  for (const auto& a : f.alphabet().visible())
    letters.push_back(kleisli_compose(kleisli_compose(closure, f[a]), closure));
  return LaxLts(f.states(), f.alphabet().visible(), closure, std::move(letters));
}

/// Value of a lax system at a word over its visible alphabet.
inline Endo lax_apply(const LaxLts& lx, const Word& v) {
  if (v.empty())
    return lx.eps();
  Endo acc = lx.letter(v.front());
  for (std::size_t i = 1; i < v.size(); ++i)
    acc = kleisli_compose(acc, lx.letter(v[i]));
  return acc;
}

inline bool validate_lax(const LaxLts& lx) {
  const Endo& eps = lx.eps();
  if (!endo_leq(kleisli_identity(lx.size()), eps))
    return false;
  if (kleisli_compose(eps, eps) != eps)
    return false;
  for (const auto& fa : lx.letters())
    if (kleisli_compose(eps, fa) != fa || kleisli_compose(fa, eps) != fa)
      return false;
  return true;
}

/// Transition system with internal action presented by a lax system:
/// tau |-> F(eps), a |-> F(a).
inline Lts inner(const LaxLts& lx) {
  Alphabet alphabet = lx.visible().with_tau();
  std::vector<Endo> rows;
  for (const auto& a : alphabet)
    rows.push_back(a.is_tau() ? lx.eps() : lx.letter(a));
  return Lts(lx.states(), std::move(alphabet), std::move(rows));
}

enum class WeakMethod { direct, derived, saturation, lax };

inline constexpr WeakMethod all_weak_methods[] = {WeakMethod::direct, WeakMethod::derived, WeakMethod::saturation,
                                                  WeakMethod::lax};

inline const char* to_string(WeakMethod m) {
  switch (m) {
  case WeakMethod::direct:
    return "direct";
  case WeakMethod::derived:
    return "derived";
  case WeakMethod::saturation:
    return "saturation";
  case WeakMethod::lax:
    return "lax";
  }
  return "?";
}

namespace detail {

inline void require_weak_compatible(const Relation& r, const Lts& f, const Lts& g) {
  require_compatible(r, f, g);
  require_tau(f, "weak bisimulation");
}

/// derived_transitions at hat(a), for every label a, in alphabet order.
inline std::vector<Endo> derived_rows(const Lts& f) {
  std::vector<Endo> out;
  for (const auto& a : f.alphabet())
    out.push_back(derived_transitions(f, hat(Word{a})));
  return out;
}

} // namespace detail

inline bool is_weak_bisimulation(const Relation& r, const Lts& f, const Lts& g,
                                 WeakMethod method = WeakMethod::direct) {
  detail::require_weak_compatible(r, f, g);
  auto pow_r = [&r](const StateSet& u, const StateSet& v) { return pow_related(u, v, r); };
  switch (method) {
  case WeakMethod::direct: {
    // A single move on one side against a derived move on the other.
    auto fd = detail::derived_rows(f);
    auto gd = detail::derived_rows(g);
    for (auto [s, t] : r.pairs())
      for (std::size_t i = 0; i < f.alphabet().size(); ++i) {
        for (State s2 : f.row(i)(s))
          if (!detail::has_partner(gd[i](t), s2, r, Side::left))
            return false;
        for (State t2 : g.row(i)(t))
          if (!detail::has_partner(fd[i](s), t2, r, Side::right))
            return false;
      }
    return true;
  }
  case WeakMethod::derived: {
    auto fd = detail::derived_rows(f);
    auto gd = detail::derived_rows(g);
    for (std::size_t i = 0; i < fd.size(); ++i)
      if (!fun_lift_related(std::span(fd[i].image()), std::span(gd[i].image()), r, pow_r))
        return false;
    return true;
  }
  case WeakMethod::saturation:
    return is_strong_bisimulation(r, saturate(f), saturate(g), StrongMethod::direct);
  case WeakMethod::lax: {
    LaxLts lf = laxify(f), lg = laxify(g);
    std::vector<Word> generators{Word{}};
    for (const auto& a : lf.visible())
      generators.push_back(Word{a});
    for (const auto& v : generators) {
      Endo fv = lax_apply(lf, v), gv = lax_apply(lg, v);
      if (!fun_lift_related(std::span(fv.image()), std::span(gv.image()), r, pow_r))
        return false;
    }
    return true;
  }
  }
  return false;
}

/// Witness against weak bisimilarity, reported on the saturated systems.
inline std::optional<Violation> find_weak_violation(const Relation& r, const Lts& f, const Lts& g) {
  detail::require_weak_compatible(r, f, g);
  return find_strong_violation(r, saturate(f), saturate(g));
}

inline Relation greatest_weak_bisimulation(const Lts& f, const Lts& g) {
  detail::require_weak_compatible(Relation(f.size(), g.size()), f, g);
  return greatest_strong_bisimulation(saturate(f), saturate(g));
}

} // namespace lrbisim
