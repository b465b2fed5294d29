#pragma once

// Text formats.
//
// Transition systems, line-oriented:
//   # comment
//   states p0 p1 p2
//   labels a tau
//   p0 tau p1
// "tau" always names the internal action.
//
// Relations: one "left right" pair of state names per line.
//
// Markov processes, JSON:
//   {"states": [..], "atoms": [[names..], ..],
//    "kernel": {state: {atom index: "p/q", ..}, ..}}
// Weights are strings holding exact rationals; decimals are rejected.
//
// Spans, JSON: {"left", "right", "apex": process documents,
//               "leg_left", "leg_right": {apex point: point}}.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "lrbisim/branching.hpp"
#include "lrbisim/error.hpp"
#include "lrbisim/giry_span.hpp"
#include "lrbisim/lts.hpp"
#include "lrbisim/markov.hpp"
#include "lrbisim/weak.hpp"

namespace lrbisim {

namespace detail {

/// Whitespace-separated tokens of one line, with any "#" comment removed.
inline std::vector<std::string> tokens_of(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos)
    line = line.substr(0, hash);
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  for (std::string tok; in >> tok;)
    out.push_back(tok);
  return out;
}

template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);
    fn(line_no, tokens_of(line));
    if (nl == std::string_view::npos)
      break;
    text.remove_prefix(nl + 1);
  }
}

inline bool is_keyword(std::string_view s) { return s == "states" || s == "labels" || s == tau_name; }

} // namespace detail

inline Lts parse_lts(std::string_view text) {
  RawLts raw;
  bool have_states = false, have_labels = false;
  detail::for_each_line(text, [&](std::size_t line, const std::vector<std::string>& toks) {
    if (toks.empty())
      return;
    if (toks[0] == "states" || toks[0] == "labels") {
      bool& seen = toks[0] == "states" ? have_states : have_labels;
      if (seen)
        throw ParseError(line, "repeated '" + toks[0] + "' line");
      if (!raw.transitions.empty())
        throw ParseError(line, "'" + toks[0] + "' must precede the transitions");
      seen = true;
      for (std::size_t i = 1; i < toks.size(); ++i) {
        if (toks[0] == "states") {
          if (detail::is_keyword(toks[i]))
            throw ParseError(line, "'" + toks[i] + "' is reserved and cannot name a state");
          raw.states.push_back(toks[i]);
        } else {
          if (toks[i] == "states" || toks[i] == "labels")
            throw ParseError(line, "'" + toks[i] + "' is reserved and cannot name a label");
          raw.labels.push_back(toks[i]);
        }
      }
      return;
    }
    if (toks.size() != 3)
      throw ParseError(line, "expected 'src label dst', got " + std::to_string(toks.size()) + " fields");
    if (!have_states || !have_labels)
      throw ParseError(line, "transition before the 'states' and 'labels' lines");
    for (const auto& n : {toks[0], toks[2]})
      if (std::find(raw.states.begin(), raw.states.end(), n) == raw.states.end())
        throw ParseError(line, "unknown state '" + n + "'");
    if (std::find(raw.labels.begin(), raw.labels.end(), toks[1]) == raw.labels.end())
      throw ParseError(line, "undeclared label '" + toks[1] + "'");
    raw.transitions.push_back({toks[0], toks[1], toks[2]});
  });
  if (!have_states)
    throw Error("missing 'states' line");
  if (!have_labels)
    throw Error("missing 'labels' line");
  return validate_lts(raw);
}

/// Canonical form: sorted states and labels, transitions by (src, label, dst).
inline std::string serialize_lts(const Lts& f) {
  std::string out = "states";
  for (const auto& n : f.states().names())
    out += " " + n;
  out += "\nlabels";
  for (const auto& a : f.alphabet())
    out += " " + a.name;
  out += "\n";
  for (State s = 0; s < f.size(); ++s)
    for (std::size_t i = 0; i < f.alphabet().size(); ++i)
      for (State d : f.row(i)(s))
        out += f.states().name(s) + " " + f.alphabet()[i].name + " " + f.states().name(d) + "\n";
  return out;
}

inline Relation parse_relation(std::string_view text, const StateSpace& left, const StateSpace& right) {
  Relation r(left.size(), right.size());
  detail::for_each_line(text, [&](std::size_t line, const std::vector<std::string>& toks) {
    if (toks.empty())
      return;
    if (toks.size() != 2)
      throw ParseError(line, "expected 'left right', got " + std::to_string(toks.size()) + " fields");
    auto s = left.index_of(toks[0]);
    if (!s)
      throw ParseError(line, "unknown left state '" + toks[0] + "'");
    auto t = right.index_of(toks[1]);
    if (!t)
      throw ParseError(line, "unknown right state '" + toks[1] + "'");
    r.insert(*s, *t);
  });
  return r;
}

inline std::string serialize_relation(const Relation& r, const StateSpace& left, const StateSpace& right) {
  if (r.left_size() != left.size() || r.right_size() != right.size())
    throw Error("relation does not match the state spaces");
  std::string out;
  for (auto [s, t] : r.pairs())
    out += left.name(s) + " " + right.name(t) + "\n";
  return out;
}

using Json = nlohmann::ordered_json;

namespace detail {

inline const Json& field(const Json& j, const char* key, const char* where) {
  if (!j.is_object())
    throw Error(std::string(where) + ": expected an object");
  auto it = j.find(key);
  if (it == j.end())
    throw Error(std::string(where) + ": missing field '" + key + "'");
  return *it;
}

inline std::vector<std::string> string_array(const Json& j, const char* what) {
  if (!j.is_array())
    throw Error(std::string(what) + " must be an array of names");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string())
      throw Error(std::string(what) + " must contain only strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

inline std::size_t parse_index(const std::string& key) {
  if (key.empty() || key.size() > 9 || key.find_first_not_of("0123456789") != std::string::npos)
    throw Error("atom index '" + key + "' is not a non-negative integer");
  return static_cast<std::size_t>(std::stoul(key));
}

inline Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(std::string("malformed JSON: ") + e.what());
  }
}

} // namespace detail

inline MarkovProcess markov_from_json(const Json& j) {
  RawMarkov raw;
  raw.states = detail::string_array(detail::field(j, "states", "process"), "states");
  const Json& atoms = detail::field(j, "atoms", "process");
  if (!atoms.is_array())
    throw Error("atoms must be an array of arrays of names");
  for (const auto& a : atoms)
    raw.atoms.push_back(detail::string_array(a, "an atom"));
  const Json& kernel = detail::field(j, "kernel", "process");
  if (!kernel.is_object())
    throw Error("kernel must be an object keyed by state");
  for (const auto& [state, row] : kernel.items()) {
    if (!row.is_object())
      throw Error("kernel row of '" + state + "' must be an object keyed by atom index");
    auto& dst = raw.kernel[state];
    for (const auto& [key, w] : row.items()) {
      if (!w.is_string())
        throw Error("weight for '" + state + "' must be a rational string such as \"1/2\"");
      dst[detail::parse_index(key)] = parse_rational(w.get<std::string>());
    }
  }
  return validate_markov(raw);
}

inline Json markov_to_json(const MarkovProcess& p) {
  const auto& space = p.space();
  Json j;
  j["states"] = space.carrier().names();
  Json atoms = Json::array();
  for (const auto& a : space.atoms()) {
    Json block = Json::array();
    for (State x : a)
      block.push_back(space.carrier().name(x));
    atoms.push_back(std::move(block));
  }
  j["atoms"] = std::move(atoms);
  Json kernel = Json::object();
  for (State s = 0; s < p.size(); ++s) {
    Json row = Json::object();
    for (std::size_t i = 0; i < space.atom_count(); ++i)
      if (p(s).weight[i] != 0)
        row[std::to_string(i)] = to_string(p(s).weight[i]);
    kernel[space.carrier().name(s)] = std::move(row);
  }
  j["kernel"] = std::move(kernel);
  return j;
}

inline MarkovProcess parse_markov(std::string_view text) { return markov_from_json(detail::parse_json(text)); }

inline std::string serialize_markov(const MarkovProcess& p) { return markov_to_json(p).dump(2) + "\n"; }

/// A span as read from a file, before the legs are checked for
/// measurability.
struct SpanParts {
  MarkovProcess left;
  MarkovProcess right;
  MarkovProcess apex;
  std::vector<State> leg_left;
  std::vector<State> leg_right;
};

inline SpanParts parse_span_parts(std::string_view text) {
  Json j = detail::parse_json(text);
  SpanParts parts{markov_from_json(detail::field(j, "left", "span")),
                  markov_from_json(detail::field(j, "right", "span")),
                  markov_from_json(detail::field(j, "apex", "span")),
                  {},
                  {}};
  auto read_leg = [&](const char* key, const MarkovProcess& target) {
    const Json& leg = detail::field(j, key, "span");
    if (!leg.is_object())
      throw Error(std::string(key) + " must map apex points to points");
    std::vector<std::optional<State>> fn(parts.apex.size());
    for (const auto& [from, to] : leg.items()) {
      if (!to.is_string())
        throw Error(std::string(key) + ": image of '" + from + "' must be a state name");
      fn[parts.apex.space().carrier().require(from)] = target.space().carrier().require(to.get<std::string>());
    }
    std::vector<State> out;
    for (State p = 0; p < fn.size(); ++p) {
      if (!fn[p])
        throw Error(std::string(key) + " is not defined at '" + parts.apex.name(p) + "'");
      out.push_back(*fn[p]);
    }
    return out;
  };
  parts.leg_left = read_leg("leg_left", parts.left);
  parts.leg_right = read_leg("leg_right", parts.right);
  return parts;
}

/// Throws if a leg is not measurable.
inline GirySpan assemble_span(const SpanParts& parts) {
  MeasurableMap l(parts.apex.space(), parts.left.space(), parts.leg_left);
  MeasurableMap r(parts.apex.space(), parts.right.space(), parts.leg_right);
  return GirySpan{parts.left, parts.right, parts.apex, std::move(l), std::move(r)};
}

inline GirySpan parse_span(std::string_view text) { return assemble_span(parse_span_parts(text)); }

inline Json span_to_json(const GirySpan& sp) {
  Json j;
  j["left"] = markov_to_json(sp.left);
  j["right"] = markov_to_json(sp.right);
  j["apex"] = markov_to_json(sp.apex);
  auto leg = [&](const MeasurableMap& m, const MarkovProcess& target) {
    Json o = Json::object();
    for (State p = 0; p < sp.apex.size(); ++p)
      o[sp.apex.name(p)] = target.name(m(p));
    return o;
  };
  j["leg_left"] = leg(sp.leg_left, sp.left);
  j["leg_right"] = leg(sp.leg_right, sp.right);
  return j;
}

inline std::string serialize_span(const GirySpan& sp) { return span_to_json(sp).dump(2) + "\n"; }

/// Saturation into pairs: one "src label sync dst" line per pair.
inline std::string serialize_pair_ts(const PairTs& p) {
  std::string out = "states";
  for (const auto& n : p.states().names())
    out += " " + n;
  out += "\nlabels";
  for (const auto& a : p.alphabet())
    out += " " + a.name;
  out += "\n";
  const auto& st = p.states();
  for (State s = 0; s < p.size(); ++s)
    for (std::size_t i = 0; i < p.alphabet().size(); ++i)
      for (auto [x, y] : p.row(i)(s))
        out += st.name(s) + " " + p.alphabet()[i].name + " " + st.name(x) + " " + st.name(y) + "\n";
  return out;
}

/// Generators of a lax system: "[] src dst" for eps, "[a] src dst" for a.
inline std::string serialize_lax(const LaxLts& lx) {
  std::string out = "states";
  for (const auto& n : lx.states().names())
    out += " " + n;
  out += "\nvisible";
  for (const auto& a : lx.visible())
    out += " " + a.name;
  out += "\n";
  const auto& st = lx.states();
  auto edges = [&](const std::string& tag, const Endo& e) {
    for (State s = 0; s < e.size(); ++s)
      for (State d : e(s))
        out += tag + " " + st.name(s) + " " + st.name(d) + "\n";
  };
  edges("[]", lx.eps());
  for (const auto& a : lx.visible())
    edges("[" + a.name + "]", lx.letter(a));
  return out;
}

} // namespace lrbisim
