#pragma once

// Command-line front end. `run` is the whole program minus process setup,
// so tests can drive it in-process.
//
// Every command builds a JSON report; the text form is rendered from that
// report, so both carry the same verdicts and witnesses.
//
// Exit codes: 0 property holds or construction succeeded, 1 property fails
// (or is undefined for the given relation), 2 usage, parse or validation
// error, 3 internal error.

#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lrbisim/branching.hpp"
#include "lrbisim/error.hpp"
#include "lrbisim/giry_span.hpp"
#include "lrbisim/io.hpp"
#include "lrbisim/lts.hpp"
#include "lrbisim/markov.hpp"
#include "lrbisim/strong.hpp"
#include "lrbisim/weak.hpp"

namespace lrbisim::cli {

inline constexpr int exit_holds = 0;
inline constexpr int exit_fails = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_internal = 3;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text))
    throw Error("cannot write '" + path + "'");
}

namespace detail {

inline bool is_scalar(const Json& j) { return !j.is_object() && !j.is_array(); }

inline std::string scalar_text(const Json& j) {
  if (j.is_string())
    return j.get<std::string>();
  return j.dump();
}

inline void render(std::ostream& out, const std::string& key, const Json& v, std::size_t indent) {
  const std::string pad(indent, ' ');
  if (is_scalar(v)) {
    out << pad << key << ": " << scalar_text(v) << "\n";
    return;
  }
  if (v.is_array() && std::all_of(v.begin(), v.end(), is_scalar)) {
    out << pad << key << ": [";
    for (std::size_t i = 0; i < v.size(); ++i)
      out << (i ? ", " : "") << scalar_text(v[i]);
    out << "]\n";
    return;
  }
  out << pad << key << ":\n";
  if (v.is_object()) {
    for (const auto& [k, child] : v.items())
      render(out, k, child, indent + 2);
    return;
  }
  for (const auto& item : v) {
    if (item.is_object()) {
      out << pad << "  -\n";
      for (const auto& [k, child] : item.items())
        render(out, k, child, indent + 4);
    } else if (item.is_array()) {
      out << pad << "  - [";
      for (std::size_t i = 0; i < item.size(); ++i)
        out << (i ? ", " : "") << (is_scalar(item[i]) ? scalar_text(item[i]) : item[i].dump());
      out << "]\n";
    } else {
      out << pad << "  - " << scalar_text(item) << "\n";
    }
  }
}

} // namespace detail

/// Text rendering of a report: one "key: value" line per field, nested
/// objects and lists indented.
inline std::string render_text(const Json& report) {
  std::ostringstream out;
  for (const auto& [k, v] : report.items())
    detail::render(out, k, v, 0);
  return out.str();
}

namespace detail {

struct Result {
  Json report;
  int code = exit_holds;
  std::string document; // printed after the report in text mode
};

inline Json violation_json(const Violation& v, const StateSpace& ls, const StateSpace& rs) {
  const StateSpace& mover = v.side == Side::left ? ls : rs;
  const State from = v.side == Side::left ? v.s : v.t;
  Json j;
  j["pair"] = Json::array({ls.name(v.s), rs.name(v.t)});
  j["side"] = to_string(v.side);
  j["label"] = v.label.name;
  j["successor"] = mover.name(v.successor);
  j["move"] = mover.name(from) + " -" + v.label.name + "-> " + mover.name(v.successor);
  return j;
}

inline Json relation_json(const Relation& r, const StateSpace& ls, const StateSpace& rs) {
  Json arr = Json::array();
  for (auto [s, t] : r.pairs())
    arr.push_back(Json::array({ls.name(s), rs.name(t)}));
  return arr;
}

inline const char* holds(bool b) { return b ? "holds" : "fails"; }

inline std::vector<std::string> methods_for(const std::string& kind) {
  if (kind == "strong")
    return {"direct", "logical"};
  if (kind == "weak")
    return {"direct", "derived", "saturation", "lax"};
  return {"direct", "logical"};
}

inline std::vector<std::string> selected_methods(const std::string& kind, const std::string& method) {
  auto all = methods_for(kind);
  if (method == "all")
    return all;
  if (std::find(all.begin(), all.end(), method) == all.end())
    throw Error("method '" + method + "' does not apply to " + kind + " bisimulation");
  return {method};
}

inline WeakMethod weak_method(const std::string& m) {
  for (auto w : all_weak_methods)
    if (m == to_string(w))
      return w;
  throw Error("unknown weak method '" + m + "'");
}

inline Result cmd_check(const std::string& kind, const std::string& left_path, const std::string& right_path,
                        const std::string& rel_path, const std::string& method) {
  Lts f = parse_lts(read_file(left_path));
  Lts g = parse_lts(read_file(right_path));
  Relation r = parse_relation(read_file(rel_path), f.states(), g.states());
  const auto methods = selected_methods(kind, method);
  const bool is_branching = kind == "branching" || kind == "semibranching";
  const auto variant = kind == "branching" ? BranchingVariant::branching : BranchingVariant::semibranching;

  Json verdicts = Json::object();
  std::map<std::string, bool> by_method;
  for (const auto& m : methods) {
    bool v = false;
    if (kind == "strong")
      v = is_strong_bisimulation(r, f, g, m == "direct" ? StrongMethod::direct : StrongMethod::logical);
    else if (kind == "weak")
      v = is_weak_bisimulation(r, f, g, weak_method(m));
    else
      v = is_branching_bisimulation(r, f, g, variant, m == "direct" ? BranchingMethod::direct : BranchingMethod::logical);
    by_method[m] = v;
    verdicts[m] = holds(v);
  }
  bool agree = true;
  for (const auto& [m, v] : by_method)
    agree = agree && v == by_method.begin()->second;
  // The definition decides when it was asked for; otherwise the single
  // requested method does.
  const bool verdict = by_method.contains("direct") ? by_method["direct"] : by_method.begin()->second;
  if (!agree && kind != "branching")
    throw InternalError(kind + " bisimulation: methods disagree on the same relation");

  Result res;
  res.report["command"] = "check " + kind;
  res.report["verdict"] = holds(verdict);
  res.report["methods"] = verdicts;
  res.report["methods_agree"] = agree;
  if (!agree)
    res.report["note"] = "the Pow(R x R) comparison of saturations rejects a relation the definition accepts";
  if (!verdict) {
    std::optional<Violation> w;
    if (kind == "strong")
      w = find_strong_violation(r, f, g);
    else if (kind == "weak")
      w = find_weak_violation(r, f, g);
    else
      w = find_branching_violation(r, f, g, variant);
    if (w)
      res.report["witness"] = violation_json(*w, f.states(), g.states());
    else if (is_branching)
      res.report["witness"] = "no single unmatched move; the saturated pair sets are not related by Pow(R x R)";
    if (kind == "weak")
      res.report["witness_on"] = "saturated systems";
  }
  res.code = verdict ? exit_holds : exit_fails;
  return res;
}

inline Result cmd_greatest(const std::string& kind, const std::string& left_path, const std::string& right_path,
                           const std::string& out_path) {
  Lts f = parse_lts(read_file(left_path));
  Lts g = parse_lts(read_file(right_path));
  Relation r;
  if (kind == "strong")
    r = greatest_strong_bisimulation(f, g);
  else if (kind == "weak")
    r = greatest_weak_bisimulation(f, g);
  else
    r = greatest_branching_bisimulation(
        f, g, kind == "branching" ? BranchingVariant::branching : BranchingVariant::semibranching);
  Result res;
  res.report["command"] = "greatest " + kind;
  res.report["verdict"] = "constructed";
  res.report["size"] = r.size();
  res.report["relation"] = relation_json(r, f.states(), g.states());
  if (!out_path.empty()) {
    write_file(out_path, serialize_relation(r, f.states(), g.states()));
    res.report["written"] = out_path;
  }
  return res;
}

inline void emit_document(Result& res, const std::string& doc, const std::string& out_path) {
  if (out_path.empty()) {
    res.report["document"] = doc;
  } else {
    write_file(out_path, doc);
    res.report["written"] = out_path;
  }
}

inline Result cmd_saturate(const std::string& input, const std::string& kind, const std::string& out_path) {
  Lts f = parse_lts(read_file(input));
  Result res;
  res.report["command"] = "saturate";
  res.report["kind"] = kind;
  res.report["verdict"] = "constructed";
  if (kind == "weak") {
    Lts s = saturate(f);
    res.report["transitions"] = s.transition_count();
    emit_document(res, serialize_lts(s), out_path);
  } else {
    PairTs p = branching_saturate(f, kind == "branching" ? BranchingVariant::branching
                                                         : BranchingVariant::semibranching);
    emit_document(res, serialize_pair_ts(p), out_path);
  }
  return res;
}

inline Result cmd_laxify(const std::string& input, const std::string& out_path) {
  Lts f = parse_lts(read_file(input));
  LaxLts lx = laxify(f);
  if (!validate_lax(lx))
    throw InternalError("laxify produced a system violating the lax laws");
  Result res;
  res.report["command"] = "laxify";
  res.report["verdict"] = "constructed";
  res.report["lax_laws"] = "hold";
  emit_document(res, serialize_lax(lx), out_path);
  return res;
}

inline Json atoms_json(const FinMeasSpace& x) {
  Json arr = Json::array();
  for (const auto& a : x.atoms()) {
    Json block = Json::array();
    for (State p : a)
      block.push_back(x.carrier().name(p));
    arr.push_back(std::move(block));
  }
  return arr;
}

struct ProbInputs {
  MarkovProcess f, g;
  Relation r;
};

inline ProbInputs load_pair(const std::string& left, const std::string& right, const std::string& rel) {
  ProbInputs in{parse_markov(read_file(left)), parse_markov(read_file(right)), {}};
  in.r = parse_relation(read_file(rel), in.f.space().carrier(), in.g.space().carrier());
  return in;
}

inline Result verdict_result(const std::string& command, const Verdict& v) {
  Result res;
  res.report["command"] = command;
  res.report["verdict"] = holds(v.holds);
  if (!v.holds)
    res.report["witness"] = v.witness;
  res.code = v.holds ? exit_holds : exit_fails;
  return res;
}

struct ProbArgs {
  std::string process, left, right, relation, span, out;
};

inline void require(const std::string& value, const char* flag, const std::string& command) {
  if (value.empty())
    throw Error(command + " requires " + flag);
}

inline Result cmd_prob(const std::string& sub, const ProbArgs& a) {
  const std::string command = "prob " + sub;
  if (sub == "check") {
    require(a.relation, "--relation", command);
    if (!a.process.empty()) {
      MarkovProcess f = parse_markov(read_file(a.process));
      Relation r = parse_relation(read_file(a.relation), f.space().carrier(), f.space().carrier());
      auto res = verdict_result(command, is_prob_bisimulation_equiv(r, f));
      res.report["notion"] = "bisimulation equivalence on one process";
      return res;
    }
    require(a.left, "--left (or --process)", command);
    require(a.right, "--right", command);
    auto in = load_pair(a.left, a.right, a.relation);
    auto res = verdict_result(command, is_prob_logical_relation(in.r, in.f, in.g));
    res.report["notion"] = "logical relation between processes";
    return res;
  }
  if (sub == "check-between") {
    require(a.left, "--left", command);
    require(a.right, "--right", command);
    require(a.relation, "--relation", command);
    auto in = load_pair(a.left, a.right, a.relation);
    auto b = is_prob_bisimulation_between(in.r, in.f, in.g);
    Result res;
    res.report["command"] = command;
    res.report["verdict"] = to_string(b.status);
    if (b.status == BetweenStatus::fails)
      res.report["witness"] = b.message;
    if (b.status == BetweenStatus::undefined)
      res.report["diagnostic"] = b.message;
    res.code = b.status == BetweenStatus::holds ? exit_holds : exit_fails;
    return res;
  }
  if (sub == "quotient") {
    require(a.process, "--process", command);
    require(a.relation, "--relation", command);
    MarkovProcess f = parse_markov(read_file(a.process));
    Relation r = parse_relation(read_file(a.relation), f.space().carrier(), f.space().carrier());
    auto q = quotient_process(f, r);
    Result res;
    res.report["command"] = command;
    res.report["verdict"] = holds(q.process.has_value());
    if (!q.process) {
      res.report["witness"] = q.witness;
      res.code = exit_fails;
      return res;
    }
    res.report["classes"] = q.process->space().carrier().names();
    emit_document(res, serialize_markov(*q.process), a.out);
    return res;
  }
  if (sub == "sigma") {
    require(a.left, "--left", command);
    require(a.right, "--right", command);
    require(a.relation, "--relation", command);
    auto in = load_pair(a.left, a.right, a.relation);
    auto cs = coarsened_sigma_algebras(in.r, in.f, in.g);
    Result res;
    res.report["command"] = command;
    res.report["verdict"] = "constructed";
    res.report["left_atoms"] = atoms_json(cs.left);
    res.report["right_atoms"] = atoms_json(cs.right);
    res.report["relation_atoms"] = atoms_json(cs.apex);
    return res;
  }
  if (sub == "span") {
    require(a.left, "--left", command);
    require(a.right, "--right", command);
    require(a.relation, "--relation", command);
    auto in = load_pair(a.left, a.right, a.relation);
    auto built = build_span(in.r, in.f, in.g);
    Result res;
    res.report["command"] = command;
    if (!built.span) {
      res.report["verdict"] = "fails";
      res.report["witness"] = built.witness;
      res.code = exit_fails;
      return res;
    }
    auto check = verify_giry_span(*built.span);
    if (!check)
      throw InternalError("built span fails verification: " + check.witness);
    res.report["verdict"] = "holds";
    res.report["apex_points"] = built.span->apex.size();
    res.report["verified"] = true;
    emit_document(res, serialize_span(*built.span), a.out);
    return res;
  }
  if (sub == "verify") {
    require(a.span, "--span", command);
    SpanParts parts = parse_span_parts(read_file(a.span));
    std::optional<GirySpan> sp;
    try {
      sp = assemble_span(parts);
    } catch (const Error& e) {
      return verdict_result(command, Verdict::no(std::string("leg is not measurable: ") + e.what()));
    }
    return verdict_result(command, verify_giry_span(*sp));
  }
  if (sub == "factor") {
    require(a.span, "--span", command);
    GirySpan sp = parse_span(read_file(a.span));
    if (auto v = verify_giry_span(sp); !v)
      throw Error("span is not a Giry-bisimulation: " + v.witness);
    auto fr = factor_span_through_image(sp);
    Result res;
    res.report["command"] = command;
    res.report["verdict"] = holds(fr.process.has_value());
    res.report["image"] = relation_json(span_image_relation(sp), sp.left.space().carrier(), sp.right.space().carrier());
    if (!fr.process) {
      Json conflicts = Json::array();
      for (const auto& c : fr.conflicts) {
        Json j;
        j["fiber"] = c.image_point;
        j["set"] = c.set;
        j["points"] = Json::array({c.first_point, c.second_point});
        j["values"] = Json::array({to_string(c.first_value), to_string(c.second_value)});
        conflicts.push_back(std::move(j));
      }
      res.report["conflicts"] = std::move(conflicts);
      res.code = exit_fails;
      return res;
    }
    emit_document(res, serialize_markov(*fr.process), a.out);
    return res;
  }
  throw Error("unknown prob command '" + sub + "'");
}

} // namespace detail

/// Runs the tool on `args` (without the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bisimulation checks for transition systems and Markov processes", "lrbisim"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "text";
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));

  const std::vector<std::string> kinds{"strong", "weak", "branching", "semibranching"};
  std::string kind, left, right, relation, method = "all", out_path, input, sat_kind = "weak";

  auto* check = app.add_subcommand("check", "Check that a relation is a bisimulation");
  check->add_option("kind", kind, "strong, weak, branching or semibranching")->required()->check(CLI::IsMember(kinds));
  check->add_option("--left", left, "Left system")->required();
  check->add_option("--right", right, "Right system")->required();
  check->add_option("--relation", relation, "Relation file")->required();
  check->add_option("--method", method, "Method, or 'all' to run every method");

  auto* greatest = app.add_subcommand("greatest", "Compute the greatest bisimulation");
  greatest->add_option("kind", kind, "strong, weak, branching or semibranching")->required()->check(CLI::IsMember(kinds));
  greatest->add_option("--left", left, "Left system")->required();
  greatest->add_option("--right", right, "Right system")->required();
  greatest->add_option("--out", out_path, "Write the relation here");

  auto* sat = app.add_subcommand("saturate", "Saturate a system");
  sat->add_option("--input", input, "System")->required();
  sat->add_option("--kind", sat_kind, "weak, branching or semibranching")
      ->check(CLI::IsMember({"weak", "branching", "semibranching"}));
  sat->add_option("--out", out_path, "Write the result here");

  auto* lax = app.add_subcommand("laxify", "Present a system as a lax system over visible words");
  lax->add_option("--input", input, "System")->required();
  lax->add_option("--out", out_path, "Write the result here");

  auto* prob = app.add_subcommand("prob", "Markov process commands");
  prob->require_subcommand(1);
  prob->fallthrough();
  detail::ProbArgs pa;
  std::map<std::string, CLI::App*> prob_subs;
  for (const char* name : {"check", "check-between", "quotient", "sigma", "span", "factor", "verify"}) {
    auto* s = prob->add_subcommand(name);
    prob_subs[name] = s;
    s->fallthrough();
  }
  prob_subs["check"]->description("Probabilistic bisimulation on one process (--process) or logical relation (--left/--right)");
  prob_subs["check-between"]->description("Probabilistic bisimulation between two processes via their sum");
  prob_subs["quotient"]->description("Quotient a process by an equivalence");
  prob_subs["sigma"]->description("Sigma-algebras coarsened by a relation");
  prob_subs["span"]->description("Build a Giry-bisimulation span from a logical relation");
  prob_subs["factor"]->description("Try to factor a span through its image relation");
  prob_subs["verify"]->description("Verify a span of homomorphisms");
  for (const char* name : {"check", "quotient"})
    prob_subs[name]->add_option("--process", pa.process, "Process");
  for (const char* name : {"check", "check-between", "sigma", "span"}) {
    prob_subs[name]->add_option("--left", pa.left, "Left process");
    prob_subs[name]->add_option("--right", pa.right, "Right process");
  }
  for (const char* name : {"check", "check-between", "quotient", "sigma", "span"})
    prob_subs[name]->add_option("--relation", pa.relation, "Relation file");
  for (const char* name : {"factor", "verify"})
    prob_subs[name]->add_option("--span", pa.span, "Span document")->required();
  for (const char* name : {"quotient", "span", "factor"})
    prob_subs[name]->add_option("--out", pa.out, "Write the result here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_holds;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }

  detail::Result res;
  try {
    if (check->parsed())
      res = detail::cmd_check(kind, left, right, relation, method);
    else if (greatest->parsed())
      res = detail::cmd_greatest(kind, left, right, out_path);
    else if (sat->parsed())
      res = detail::cmd_saturate(input, sat_kind, out_path);
    else if (lax->parsed())
      res = detail::cmd_laxify(input, out_path);
    else
      for (const auto& [name, s] : prob_subs)
        if (s->parsed())
          res = detail::cmd_prob(name, pa);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return exit_internal;
  }

  if (format == "json") {
    out << res.report.dump(2) << "\n";
  } else {
    Json report = res.report;
    std::string doc;
    if (auto it = report.find("document"); it != report.end()) {
      doc = it->get<std::string>();
      report.erase("document");
    }
    out << render_text(report);
    if (!doc.empty())
      out << "\n" << doc;
  }
  return res.code;
}

} // namespace lrbisim::cli
