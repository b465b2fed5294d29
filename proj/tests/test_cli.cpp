#include <catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include "support/fixtures.hpp"

using namespace lrbisim;
using Json = nlohmann::ordered_json;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

Outcome run_json(std::vector<std::string> args) {
  args.insert(args.begin(), {"--format", "json"});
  return run(std::move(args));
}

std::string fx(const char* name) { return fixtures::path(name); }

std::filesystem::path scratch() {
  auto dir = std::filesystem::temp_directory_path() / "lrbisim_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<std::string> check_args(const char* kind, const char* l, const char* r, const char* rel) {
  return {"check", kind, "--left", fx(l), "--right", fx(r), "--relation", fx(rel)};
}

} // namespace

TEST_CASE("check strong on the branching fixture exits 0") {
  Outcome o = run(check_args("strong", "strong_left.lts", "strong_right.lts", "strong.rel"));
  CHECK(o.code == 0);
  CHECK(o.out.find("verdict: holds\n") != std::string::npos);
}

TEST_CASE("check strong on the tau chain exits 1 with a witness") {
  Outcome o = run_json(check_args("strong", "tau_chain.lts", "direct_edge.lts", "weak.rel"));
  CHECK(o.code == 1);
  Json j = Json::parse(o.out);
  CHECK(j["verdict"] == "fails");
  CHECK(j["witness"]["move"] == "p0 -tau-> p1");
  CHECK(j["witness"]["pair"] == Json::array({"p0", "q0"}));
  CHECK(j["witness"]["side"] == "left");
}

TEST_CASE("check weak with every method") {
  auto args = check_args("weak", "tau_chain.lts", "direct_edge.lts", "weak.rel");
  args.insert(args.end(), {"--method", "all"});
  Outcome o = run_json(args);
  CHECK(o.code == 0);
  Json j = Json::parse(o.out);
  CHECK(j["methods"].size() == 4);
  for (const auto& [m, v] : j["methods"].items())
    CHECK(v == "holds");
  CHECK(j["methods_agree"] == true);
  args.back() = "lax";
  CHECK(run(args).code == 0);
  args.back() = "logical";
  CHECK(run(args).code == 2);
}

TEST_CASE("check branching reports method disagreement on the escape relation") {
  Outcome o = run_json(check_args("branching", "tau_tau.lts", "tau_one.lts", "tau_escape.rel"));
  CHECK(o.code == 0);
  Json j = Json::parse(o.out);
  CHECK(j["methods"]["direct"] == "holds");
  CHECK(j["methods"]["logical"] == "fails");
  CHECK(j["methods_agree"] == false);
  CHECK(j.contains("note"));
  Outcome semi = run_json(check_args("semibranching", "tau_tau.lts", "tau_one.lts", "tau_escape.rel"));
  CHECK(semi.code == 0);
  CHECK(Json::parse(semi.out)["methods_agree"] == true);
}

TEST_CASE("usage and validation errors exit 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"check", "strong"}).code == 2);
  CHECK(run({"check", "fuzzy", "--left", fx("coin.lts"), "--right", fx("coin.lts"), "--relation", fx("rstar.rel")})
            .code == 2);
  CHECK(run({"--format", "xml", "laxify", "--input", fx("tau_chain.lts")}).code == 2);
  CHECK(run({"laxify", "--input", fx("no_such_file.lts")}).code == 2);
  CHECK(run({"laxify", "--input", fx("coin.lts")}).code == 2);
  CHECK(run({"laxify", "--input", fx("coin.mkv")}).code == 2);
  CHECK(run(check_args("strong", "strong_left.lts", "strong_right.lts", "tau_escape.rel")).code == 2);
  CHECK(run({"prob", "span", "--left", fx("coin.mkv")}).code == 2);
  CHECK(run({"prob", "nonsense"}).code == 2);
  Outcome o = run({"laxify", "--input", fx("coin.lts")});
  CHECK(o.err.rfind("error: ", 0) == 0);
  CHECK(o.out.empty());
}

TEST_CASE("help exits 0") {
  Outcome o = run({"--help"});
  CHECK(o.code == 0);
  CHECK(o.out.find("check") != std::string::npos);
}

TEST_CASE("greatest, saturate and laxify") {
  auto dir = scratch();
  std::string out = (dir / "greatest.rel").string();
  Outcome g = run({"greatest", "weak", "--left", fx("tau_chain.lts"), "--right", fx("direct_edge.lts"), "--out", out});
  CHECK(g.code == 0);
  Lts f = fixtures::lts("tau_chain.lts"), h = fixtures::lts("direct_edge.lts");
  Relation r = parse_relation(cli::read_file(out), f.states(), h.states());
  CHECK(r == greatest_weak_bisimulation(f, h));
  CHECK(fixtures::relation("weak.rel", f.states(), h.states()).subset_of(r));

  Outcome s = run({"saturate", "--input", fx("tau_chain.lts")});
  CHECK(s.code == 0);
  CHECK(s.out.find(serialize_lts(saturate(f))) != std::string::npos);
  Outcome b = run_json({"saturate", "--input", fx("tau_tau.lts"), "--kind", "branching"});
  CHECK(b.code == 0);
  CHECK(Json::parse(b.out)["document"] ==
        serialize_pair_ts(branching_saturate(fixtures::lts("tau_tau.lts"), BranchingVariant::branching)));
  Outcome l = run({"laxify", "--input", fx("tau_chain.lts"), "--out", (dir / "lax.txt").string()});
  CHECK(l.code == 0);
  CHECK(cli::read_file((dir / "lax.txt").string()) == serialize_lax(laxify(f)));
}

TEST_CASE("prob check in both modes") {
  CHECK(run({"prob", "check", "--process", fx("coin.mkv"), "--relation", fx("rstar.rel")}).code == 0);
  Outcome sh = run({"prob", "check", "--process", fx("coin.mkv"), "--relation", fx("coin_sh.rel")});
  CHECK(sh.code == 1);
  CHECK(sh.out.find("witness: ") != std::string::npos);
  CHECK(run({"prob", "check", "--process", fx("coin.mkv"), "--relation", fx("coin_bad_rel.rel")}).code == 2);
  CHECK(run({"prob", "check", "--left", fx("coin.mkv"), "--right", fx("coin.mkv"), "--relation", fx("full.rel")})
            .code == 0);
  CHECK(run({"prob", "check", "--left", fx("coin.mkv"), "--right", fx("coin.mkv"), "--relation", fx("coin_sh.rel")})
            .code == 1);
}

TEST_CASE("prob check-between") {
  CHECK(run({"prob", "check-between", "--left", fx("coin.mkv"), "--right", fx("coin.mkv"), "--relation",
             fx("rstar.rel")})
            .code == 0);
  Outcome u = run_json({"prob", "check-between", "--left", fx("coin.mkv"), "--right", fx("coin.mkv"), "--relation",
                        fx("coin_bad_rel.rel")});
  CHECK(u.code == 1);
  Json j = Json::parse(u.out);
  CHECK(j["verdict"] == "undefined");
  CHECK(j["diagnostic"] == "R* is not reflexive: R is not total ('T' has no partner)");
}

TEST_CASE("prob quotient and sigma") {
  Outcome q = run_json({"prob", "quotient", "--process", fx("coin.mkv"), "--relation", fx("rstar.rel")});
  CHECK(q.code == 0);
  Json j = Json::parse(q.out);
  CHECK(j["classes"] == Json::array({"[H,T]", "[S]"}));
  MarkovProcess qp = parse_markov(j["document"].get<std::string>());
  CHECK(qp.size() == 2);
  CHECK(run({"prob", "quotient", "--process", fx("coin.mkv"), "--relation", fx("coin_sh.rel")}).code == 1);

  Outcome s = run_json({"prob", "sigma", "--left", fx("coin.mkv"), "--right", fx("coin.mkv"), "--relation",
                        fx("rstar.rel")});
  CHECK(s.code == 0);
  CHECK(Json::parse(s.out)["left_atoms"] == Json::parse(R"([["H","T"],["S"]])"));
}

TEST_CASE("prob span, verify and factor") {
  auto dir = scratch();
  std::string span = (dir / "span.json").string();
  Outcome o = run({"prob", "span", "--left", fx("coin.mkv"), "--right", fx("coin.mkv"), "--relation",
                   fx("rstar.rel"), "--out", span});
  CHECK(o.code == 0);
  CHECK(o.out.find("apex_points: 5\n") != std::string::npos);
  CHECK(run({"prob", "verify", "--span", span}).code == 0);
  CHECK(run({"prob", "factor", "--span", span}).code == 0);
  CHECK(run({"prob", "span", "--left", fx("coin.mkv"), "--right", fx("coin.mkv"), "--relation", fx("coin_sh.rel")})
            .code == 1);

  Outcome f = run_json({"prob", "factor", "--span", fx("codiagonal.span.json")});
  CHECK(f.code == 1);
  Json j = Json::parse(f.out);
  bool found = false;
  for (const auto& c : j["conflicts"])
    if (c["fiber"] == "(S,S)" && c["set"] == "{(H,T)}") {
      found = true;
      CHECK(c["values"] == Json::array({"1/4", "0"}));
    }
  CHECK(found);

  // Swap two apex rows of the diagonal span: the legs stop being
  // homomorphisms.
  std::string plus = (dir / "plus.json").string();
  CHECK(run({"prob", "span", "--left", fx("coin.mkv"), "--right", fx("coin.mkv"), "--relation", fx("rplus.rel"),
             "--out", plus})
            .code == 0);
  Json doc = Json::parse(cli::read_file(plus));
  auto& kernel = doc["apex"]["kernel"];
  std::swap(kernel["(H,H)"], kernel["(S,S)"]);
  std::string broken = (dir / "broken.json").string();
  cli::write_file(broken, doc.dump(2));
  Outcome v = run({"prob", "verify", "--span", broken});
  CHECK(v.code == 1);
  CHECK(v.out.find("witness: ") != std::string::npos);
  CHECK(run({"prob", "factor", "--span", broken}).code == 2);
}

TEST_CASE("text and JSON reports carry the same verdicts and witnesses") {
  auto dir = scratch();
  std::vector<std::vector<std::string>> commands{
      check_args("strong", "tau_chain.lts", "direct_edge.lts", "weak.rel"),
      check_args("weak", "tau_chain.lts", "direct_edge.lts", "weak.rel"),
      check_args("branching", "tau_tau.lts", "tau_one.lts", "tau_escape.rel"),
      check_args("semibranching", "strong_left.lts", "strong_left.lts", "weak.rel"),
      {"prob", "check", "--process", fx("coin.mkv"), "--relation", fx("coin_sh.rel")},
      {"prob", "check-between", "--left", fx("coin.mkv"), "--right", fx("coin.mkv"), "--relation", fx("coin_sh.rel")},
      {"prob", "check-between", "--left", fx("coin.mkv"), "--right", fx("coin.mkv"), "--relation",
       fx("coin_bad_rel.rel")},
      {"prob", "quotient", "--process", fx("coin.mkv"), "--relation", fx("coin_sh.rel")},
      {"prob", "factor", "--span", fx("codiagonal.span.json")},
      {"prob", "span", "--left", fx("coin.mkv"), "--right", fx("coin.mkv"), "--relation", fx("rplus.rel")},
  };
  for (const auto& args : commands) {
    Outcome text = run(args), json = run_json(args);
    CHECK(text.code == json.code);
    if (json.code == 2) {
      CHECK(text.err == json.err);
      continue;
    }
    Json j = Json::parse(json.out);
    CHECK(text.out.find("verdict: " + j["verdict"].get<std::string>() + "\n") != std::string::npos);
    if (j.contains("witness")) {
      if (j["witness"].is_string())
        CHECK(text.out.find("witness: " + j["witness"].get<std::string>() + "\n") != std::string::npos);
      else
        CHECK(text.out.find("  move: " + j["witness"]["move"].get<std::string>() + "\n") != std::string::npos);
    }
    if (j.contains("diagnostic"))
      CHECK(text.out.find("diagnostic: " + j["diagnostic"].get<std::string>() + "\n") != std::string::npos);
    CHECK(run(args).out == text.out);
  }
}
