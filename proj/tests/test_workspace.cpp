#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "super2vec/workspace.hpp"

using namespace super2vec;
using Q = Rational;
using G = Gaussian;
using json = nlohmann::ordered_json;

namespace {

std::string corpus() {
  std::ifstream in(std::string(S2V_SOURCE_DIR) + "/corpus/rp2_pin.json");
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

InputError input_error(const std::string& text) {
  try {
    parse_workspace<Q>(text);
  } catch (const InputError& e) {
    return e;
  }
  FAIL("no input error");
  return InputError("");
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

const char* kTetrahedron = R"({
  "field": "Q",
  "algebras": {"cl01": {"builtin": "clifford", "p": 0, "q": 1}},
  "nerves": {"tet": {"simplices": [[0, 1, 2, 3]]}},
  "bundles": {"v": {"constant": {"nerve": "tet", "algebra": "cl01"}}}
})";

}  // namespace

TEST_CASE("minimal document") {
  auto w = parse_workspace<Q>(R"({"field": "Q", "algebras": {"k": {"builtin": "ground_field"}}})");
  REQUIRE(w.algebras.count("k"));
  CHECK(w.algebras["k"]->dim() == 1);
  CHECK(document_field(R"j({"field": "Q(i)"})j") == "Q(i)");
  CHECK(document_field("{}") == "Q");
  CHECK_THROWS_AS(document_field(R"({"field": "R"})"), InputError);
}

TEST_CASE("diagnostics carry line and column") {
  auto e = input_error("{\n  \"nerves\": {\n    \"bad\": {\"simplices\": [[0, 1], [2, 1]]}\n  }\n}");
  CHECK(std::string(e.what()) == "vertices not increasing");
  CHECK(e.pointer() == "/nerves/bad/simplices/1");
  CHECK(e.line() == 3);
  CHECK(e.column() == 35);

  auto syntax = input_error("{\n  \"algebras\": {\n    \"k\": {\"builtin\": \"ground_field\",}\n  }\n}");
  CHECK(syntax.line() == 3);
  CHECK(contains(syntax.what(), "parse error"));

  auto missing = input_error(R"({"bundles": {"v": {"constant": {"nerve": "rp2", "algebra": "nope"}}}})");
  CHECK(std::string(missing.what()) == "unknown algebra 'nope'");
  CHECK(missing.pointer() == "/bundles/v/constant/algebra");

  auto cycle = input_error(R"({"algebras": {"a": {"opposite": "b"}, "b": {"opposite": "a"}}})");
  CHECK(contains(cycle.what(), "circular reference"));

  CHECK(contains(input_error(R"({"algebras": {"a": {"builtin": "clifford", "p": 1}}})").what(), "missing key 'q'"));
  CHECK(contains(input_error(R"({"algebras": {"a": {"buildin": "k"}}})").what(), "unknown key 'buildin'"));
  CHECK(contains(input_error(R"({"stuff": {}})").what(), "unknown section"));
  CHECK(contains(input_error(R"j({"field": "Q(i)"})j").what(), "field"));
}

TEST_CASE("explicit algebras are validated") {
  auto w = parse_workspace<Q>(R"({"algebras": {"d": {"even": 2, "odd": 0, "unit": ["1", "0"],
      "table": [[0, 0, 0, "1"], [0, 1, 1, "2/2"], [1, 0, 1, 1]]}}})");
  CHECK(w.algebras["d"]->same_table(*dual_numbers<Q>(0)));
  // The unit is wrong: e0 e1 = 0.
  auto e = input_error(R"({"algebras": {"d": {"even": 2, "odd": 0, "unit": ["1", "0"],
      "table": [[0, 0, 0, "1"], [1, 0, 1, "1"]]}}})");
  CHECK(e.pointer() == "/algebras/d");
  CHECK(contains(input_error(R"({"algebras": {"d": {"even": 1, "odd": 0, "unit": ["1/0"], "table": []}}})").what(),
                 "zero denominator"));
}

TEST_CASE("rationals serialize in lowest terms") {
  CHECK_THROWS_AS(parse_workspace<Q>(R"({"nerves": {"p": {"simplices": [[0, 1, 2]]}},
      "bundles": {"g": {"gerbe": {"nerve": "p", "scalars": ["6/-4"]}}}})"),
                  InputError);
  CHECK_THROWS_AS(parse_workspace<Q>(R"({"nerves": {"p": {"simplices": [[0, 1, 2]]}},
      "bundles": {"g": {"gerbe": {"nerve": "p", "scalars": ["0"]}}}})"),
                  InputError);
  auto w2 = parse_workspace<Q>(R"({"nerves": {"p": {"simplices": [[0, 1, 2]]}},
      "bundles": {"g": {"gerbe": {"nerve": "p", "scalars": ["6/4"]}}}})");
  auto text = emit_workspace(w2);
  CHECK(contains(text, "\"3/2\""));
  CHECK_FALSE(contains(text, "6/4"));
}

TEST_CASE("corpus parses and emit is a fixed point") {
  auto w = parse_workspace<Q>(corpus());
  CHECK(w.algebras.size() == 6);
  CHECK(w.bundles.size() == 7);
  CHECK(w.extensions.count("pin"));
  const auto text = emit_workspace(w);
  auto w2 = parse_workspace<Q>(text);
  CHECK(emit_workspace(w2) == text);
  for (const auto& [name, b] : w.bundles) {
    const auto& b2 = w2.bundles.at(name);
    CHECK(*b->nerve == *b2->nerve);
    CHECK(b->mu == b2->mu);
    for (size_t i = 0; i < b->algebras.size(); ++i) CHECK(same_algebra(b->algebras[i], b2->algebras[i]));
    for (size_t e = 0; e < b->modules.size(); ++e) {
      CHECK(b->modules[e]->left == b2->modules[e]->left);
      CHECK(b->modules[e]->right == b2->modules[e]->right);
    }
  }
  for (const auto& [name, c] : w.cocycles)
    for (size_t e = 0; e < c.g.size(); ++e) CHECK(c.g[e] == w2.cocycles.at(name).g[e]);
  CHECK(w.cochains.at("w1") == w2.cochains.at("w1"));
  CHECK(w.extensions.at("pin").data.elements == w2.extensions.at("pin").data.elements);
  CHECK(w.implementations.at("pin_impl").value.hat_action == w2.implementations.at("pin_impl").value.hat_action);
}

TEST_CASE("gaussian documents") {
  const char* text = R"j({"field": "Q(i)",
    "algebras": {"c": {"builtin": "clifford", "p": 0, "q": 1}},
    "nerves": {"p": {"simplices": [[0, 1, 2]]}},
    "bundles": {"g": {"gerbe": {"nerve": "p", "scalars": [["0", "1"]]}}}})j";
  auto w = parse_workspace<G>(text);
  CHECK(w.bundles["g"]->mu[0](0, 0) == G::i());
  auto out = emit_workspace(w);
  CHECK(contains(out, "[\"0/1\",\"1/1\"]"));
  CHECK(emit_workspace(parse_workspace<G>(out)) == out);
  auto r = run_command(text, {"bw", "c"});
  CHECK(r.exit_code == 0);
  CHECK(r.report == "1 (mod 2)\n");
}

TEST_CASE("explicit pairs are checked against each other") {
  auto w = parse_workspace<Q>(kTetrahedron);
  auto doc = json::parse(emit_workspace(w));
  auto& pairs = doc["bundles"]["v"]["mu"][0]["pairs"];
  auto original = pairs[0];
  SUBCASE("missing") {
    pairs.erase(pairs.begin());
    auto e = input_error(doc.dump());
    CHECK(contains(e.what(), "missing value on pair"));
    CHECK(e.pointer() == "/bundles/v/mu/0");
  }
  SUBCASE("inconsistent") {
    json bad = original;
    bad[2] = json::array({"5", "0"});
    pairs.push_back(bad);
    auto e = input_error(doc.dump());
    CHECK(contains(e.what(), "duplicate pair"));
  }
  SUBCASE("redundant") {
    // Under the multiplication map the pair (i, j) goes to e_i e_j.
    const std::map<std::pair<int, int>, json> product = {{{0, 0}, json::array({"1", "0"})},
                                                         {{0, 1}, json::array({"0", "1"})},
                                                         {{1, 0}, json::array({"0", "1"})},
                                                         {{1, 1}, json::array({"-1", "0"})}};
    std::set<std::pair<int, int>> given;
    for (const auto& p : pairs) given.insert({p[0].get<int>(), p[1].get<int>()});
    auto spare = std::find_if(product.begin(), product.end(), [&](const auto& kv) { return !given.count(kv.first); });
    REQUIRE(spare != product.end());
    pairs.push_back({spare->first.first, spare->first.second, spare->second});
    CHECK_NOTHROW(parse_workspace<Q>(doc.dump()));
    pairs.back()[2] = json::array({"7", "0"});
    CHECK(contains(input_error(doc.dump()).what(), "disagrees"));
  }
}

TEST_CASE("bw on the Cl(0,2) table") {
  auto r = run_command(corpus(), {"bw", "cl02"});
  CHECK(r.exit_code == 0);
  CHECK(r.report == "2 (mod 8)\n");
  auto j = json::parse(r.result);
  CHECK(j["residue"] == 2);
  CHECK(j["modulus"] == 8);
  CHECK(j["command"] == "bw");
  auto dual = run_command(corpus(), {"bw", "dual"});
  CHECK(dual.exit_code == 2);
  CHECK(contains(dual.report, "not central simple"));
}

TEST_CASE("validate on a corrupted bundle names the tetrahedron") {
  auto w = parse_workspace<Q>(kTetrahedron);
  auto doc = json::parse(emit_workspace(w));
  CHECK(run_command(doc.dump(), {"validate", "v"}).exit_code == 0);
  for (auto& p : doc["bundles"]["v"]["mu"][0]["pairs"])
    for (auto& x : p[2]) x = (Rational::parse(x.get<std::string>()) * Q(2)).to_string();
  auto r = run_command(doc.dump(), {"validate", "v"});
  CHECK(r.exit_code == 1);
  CHECK(contains(r.report, "tetrahedron (0,1,2,3)"));
  auto j = json::parse(r.result);
  CHECK(j["valid"] == false);
  REQUIRE(j["failures"].size() == 1);
  CHECK(contains(j["failures"][0].get<std::string>(), "tetrahedron (0,1,2,3)"));
  // invariants refuse an invalid bundle with the same exit code.
  CHECK(run_command(doc.dump(), {"invariants", "v"}).exit_code == 1);
}

TEST_CASE("pipeline pin1 on the corpus") {
  auto r = run_command(corpus(), {"pipeline", "pin1", "rp2", "w1"});
  CHECK(r.exit_code == 0);
  CHECK(contains(r.report, "isomorphism verdict: YES; triple (0, [w1], [w1^2])"));
  auto j = json::parse(r.result);
  CHECK(j["isomorphism_verdict"] == "YES");
  CHECK(j["obstruction"]["trivial"] == false);
  CHECK(j["gerbe_triple"] == j["algebra_triple"]);
  auto circle = R"({"cochains": {"m": {"nerve": "circle", "generator": {"degree": 1, "modulus": 2, "index": 0}}}})";
  auto rc = run_command(circle, {"pipeline", "pin1", "circle", "m"});
  CHECK(rc.exit_code == 0);
  CHECK(contains(rc.report, "triple (0, [m], 0)"));
  CHECK(run_command(corpus(), {"pipeline", "pin1", "circle", "w1"}).exit_code == 2);
}

TEST_CASE("every corpus command runs") {
  const std::vector<std::vector<std::string>> commands = {
      {"validate", "clifford_bundle"},
      {"validate", "clifford_w1"},
      {"validate", "clifford_identity"},
      {"validate", "implementation", "pin_impl"},
      {"invariants", "clifford_bundle"},
      {"invariants", "gerbe_w1"},
      {"classify", "pin_gerbe", "pin_algebra_bundle"},
      {"tensor", "clifford_bundle", "gerbe_w1"},
      {"dsum", "trivial", "trivial"},
      {"refine", "cl01_point", "collapse"},
      {"hh1", "dual"},
      {"csa", "pin_algebra"},
      {"bw", "pin_algebra"},
      {"picard-surjectify", "k"},
      {"transport", "csa_cl01", "clifford_w1"},
      {"transport", "morita_pin", "pin_parity"},
      {"lift", "pin", "o1"},
      {"emit"},
      {"pipeline", "pin1", "rp2", "w1"}};
  const auto text = corpus();
  for (const auto& args : commands) {
    auto r = run_command(text, args);
    const std::string msg = args[0] + ": " + r.report;
    CHECK_MESSAGE(r.exit_code == 0, msg);
    auto j = json::parse(r.result);
    CHECK(j["command"] == args[0]);
    if (!r.workspace.empty()) CHECK_NOTHROW(parse_workspace<Q>(r.workspace));
  }
  auto cls = json::parse(run_command(text, {"classify", "pin_gerbe", "pin_algebra_bundle"}).result);
  CHECK(cls["verdict"] == "isomorphic");
  auto lift = json::parse(run_command(text, {"lift", "pin", "o1"}).result);
  CHECK(lift["obstruction_trivial"] == false);
  CHECK(lift["cocycle_lift"].is_null());
  auto hh = json::parse(run_command(text, {"hh1", "dual"}).result);
  CHECK(hh["dimension"] == 1);
}

TEST_CASE("constructions land in the emitted workspace") {
  CommandOptions opt;
  opt.name = "product";
  auto r = run_command(corpus(), {"tensor", "clifford_bundle", "gerbe_w1"}, opt);
  REQUIRE(r.exit_code == 0);
  auto w = parse_workspace<Q>(r.workspace);
  REQUIRE(w.bundles.count("product"));
  auto again = run_command(r.workspace, {"invariants", "product"});
  CHECK(again.exit_code == 0);
  // The name is taken now.
  CHECK(run_command(r.workspace, {"tensor", "clifford_bundle", "gerbe_w1"}, opt).exit_code == 2);
}

TEST_CASE("commands are deterministic under the seed") {
  CommandOptions a, b;
  a.seed = b.seed = 99;
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"picard-surjectify", "k"}, {"transport", "morita_pin", "pin_parity"}, {"invariants", "pin_gerbe"}}) {
    auto r1 = run_command(corpus(), args, a), r2 = run_command(corpus(), args, b);
    CHECK(r1.report == r2.report);
    CHECK(r1.result == r2.result);
    CHECK(r1.workspace == r2.workspace);
  }
}

TEST_CASE("usage and reference errors exit 2") {
  const auto text = corpus();
  CHECK(run_command(text, {"frobnicate"}).exit_code == 2);
  CHECK(run_command(text, {}).exit_code == 2);
  CHECK(run_command(text, {"bw"}).exit_code == 2);
  CHECK(run_command(text, {"bw", "missing"}).exit_code == 2);
  CHECK(run_command(text, {"invariants", "nope"}).exit_code == 2);
  CHECK(run_command(text, {"refine", "trivial", "collapse"}).exit_code == 2);
  auto r = run_command("{ \"field\": \"Q\", ", {"emit"});
  CHECK(r.exit_code == 2);
  CHECK(contains(r.report, "line 1"));
  auto j = json::parse(r.result);
  CHECK(j["line"] == 1);
}

TEST_CASE("invalid cocycles fail validation with exit 1") {
  auto text = R"({"algebras": {"c": {"builtin": "clifford", "p": 0, "q": 1}},
    "nerves": {"tet": {"simplices": [[0, 1, 2, 3]]}},
    "cocycles": {"c1": {"nerve": "tet", "algebra": "c", "trivial": true, "twist": ["2", "1", "1", "1"]}}})";
  auto r = run_command(text, {"validate", "c1"});
  CHECK(r.exit_code == 1);
  CHECK(contains(r.report, "INVALID"));
  auto sum = R"({"bundles": {"a": {"constant": {"nerve": "circle", "algebra": {"builtin": "ground_field"}}},
    "b": {"sum": ["a", "a"]}}})";
  auto inv = run_command(sum, {"invariants", "b"});
  CHECK(inv.exit_code == 2);
  CHECK(contains(inv.report, "CSA regime"));
}
