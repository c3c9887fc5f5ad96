#include "doctest.h"

#include "econv/errors.hpp"
#include "econv/harness.hpp"

#include <algorithm>
#include <cmath>

using namespace econv;
using namespace econv::harness;

namespace {

const char* kParabola = R"json({
  "space_dim": 1,
  "functions": {
    "square": {"type": "quadratic", "q": 1},
    "slope_two": {"type": "affine", "a": [2], "b": 0},
    "square_on_positive": {"type": "quadratic", "q": 1, "domain": {"lo": 0}}
  },
  "dc": {"f": "square", "g": "slope_two", "search_box": {"lo": [-3], "hi": [3]}, "search_step": 1e-3},
  "checks": [
    {"id": "conjugate-value", "function": "square_on_positive", "w": [3, 0, 1], "expect_value": 2.25},
    {"id": "cor-global-necessary", "label": "necessary-at-0", "point": [0], "seed": 1},
    {"id": "cor-global-necessary", "label": "necessary-at-1", "point": [1], "seed": 1},
    {"id": "prop-subdiff-in-domfc", "function": "square_on_positive", "point": [1.5], "seed": 2}
  ]
})json";

std::string validation_path(const std::string& text) {
  try {
    const Problem p = parse_problem_text(text);
    validate_checks(p);
  } catch (const ValidationError& e) {
    return e.path();
  }
  return "<none>";
}

const CheckRecord& by_label(const Report& r, const std::string& label) {
  const auto it = std::find_if(r.records.begin(), r.records.end(),
                               [&](const CheckRecord& rec) { return rec.label == label; });
  REQUIRE(it != r.records.end());
  return *it;
}

} // namespace

TEST_CASE("problem errors carry the offending path") {
  CHECK(validation_path(R"({"space_dim": 0})") == "/space_dim");
  CHECK(validation_path(R"({"space_dim": 1, "functions": {"f": {"type": "nope"}}})") == "/functions/f/type");
  CHECK(validation_path(R"({"space_dim": 1, "functions": {"f": {"type": "affine", "a": [1, 2], "b": 0}}})") ==
        "/functions/f/a");
  CHECK(validation_path(R"({"space_dim": 1, "functions": {"f": {"type": "sum", "terms": ["f"]}}})")
            .rfind("/functions/f", 0) == 0);
  CHECK(validation_path(R"({"space_dim": 1, "checks": [{"id": "no-such-check"}]})") == "/checks/0/id");
  CHECK(validation_path(R"({"space_dim": 1, "functions": {"f": {"type": "quadratic", "q": 1}},
      "checks": [{"id": "eq-product-form", "function": "f", "point": [0], "eps": 0.5}]})") == "/checks/0");
  CHECK(validation_path(R"({"space_dim": 1, "functions": {"f": {"type": "quadratic", "q": 1}},
      "checks": [{"id": "conjugate-value", "function": "g", "w": [0, 0, 1]}]})") == "/checks/0/function");
  CHECK_THROWS_AS(parse_problem_text("{not json"), ValidationError);
}

TEST_CASE("extended reals round-trip through json") {
  CHECK(ext_from_json(Json("inf"), "/x").is_pos_inf());
  CHECK(ext_from_json(Json("-inf"), "/x").is_neg_inf());
  CHECK(ext_from_json(Json(2.5), "/x").value() == 2.5);
  CHECK_THROWS_AS(ext_from_json(Json("big"), "/x"), ValidationError);
  CHECK(dump(ext_to_json(ExtReal::pos_inf())) == "\"inf\"\n");
  CHECK(dump(ext_to_json(ExtReal::neg_inf())) == "\"-inf\"\n");
  CHECK(dump(Json(0.1)) == "0.10000000000000001\n");
  CHECK(dump(Json(-0.0)) == "0\n");
  CHECK(dump(Json::array({1.5, 2})) == "[1.5, 2]\n");
  const std::vector<double> xs = parse_list("0, 0.5,inf", "--eps-grid");
  REQUIRE(xs.size() == 3);
  CHECK(std::isinf(xs[2]));
  CHECK_THROWS_AS(parse_list("1,,2", "--eps-grid"), ValidationError);
}

TEST_CASE("sha256 matches the standard test vector") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("registry entries all have anchors") {
  CHECK(registry_ids().size() >= 16);
  for (const std::string& id : registry_ids()) {
    CHECK_FALSE(anchor_for(id).empty());
  }
}

TEST_CASE("checks dispatch and failures carry witnesses") {
  const Problem p = parse_problem_text(kParabola);
  const Report r = run_problem(p, "sha256:test");
  REQUIRE(r.records.size() == 4);
  CHECK(r.records[0].verdict.outcome == Outcome::Pass);
  CHECK(r.records[0].check_id == "conjugate-value");
  CHECK(r.records[0].label == "conjugate-value");
  const CheckRecord& at0 = by_label(r, "necessary-at-0");
  CHECK(at0.verdict.outcome == Outcome::Fail);
  CHECK_FALSE(at0.verdict.witnesses.empty());
  CHECK(by_label(r, "necessary-at-1").verdict.outcome == Outcome::Pass);
  CHECK(r.records[3].verdict.outcome == Outcome::Pass);
  CHECK(exit_code(r) == 1);

  const Report only = run_problem(p, "sha256:test", {}, {"necessary-at-1"});
  REQUIRE(only.records.size() == 1);
  CHECK(exit_code(only) == 0);
  CHECK_THROWS_AS(run_problem(p, "sha256:test", {}, {"missing"}), ValidationError);
}

TEST_CASE("an expectation decides the final verdict") {
  Json doc = Json::parse(kParabola);
  doc["checks"][1]["expect"] = "fail";
  doc["checks"][2]["expect"] = "fail";
  const Report r = run_problem(parse_problem(doc), "sha256:test");
  const CheckRecord& met = by_label(r, "necessary-at-0");
  CHECK(met.verdict.outcome == Outcome::Pass);
  REQUIRE(met.outcome);
  CHECK(*met.outcome == Outcome::Fail);
  const CheckRecord& missed = by_label(r, "necessary-at-1");
  CHECK(missed.verdict.outcome == Outcome::Fail);
  CHECK_FALSE(missed.verdict.witnesses.empty());
  const Json j = to_json(r);
  CHECK(j["checks"][1]["expected"] == "FAIL");
  CHECK(j["checks"][1]["outcome"] == "FAIL");
  CHECK_FALSE(j["checks"][0].contains("expected"));
}

TEST_CASE("reports are identical across thread counts and runs") {
  const Problem p = parse_problem_text(kParabola);
  RunOptions one;
  RunOptions four;
  four.threads = 4;
  const std::string a = dump(to_json(run_problem(p, "sha256:x", one)));
  const std::string b = dump(to_json(run_problem(p, "sha256:x", four)));
  const std::string c = dump(to_json(run_problem(p, "sha256:x", one)));
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a.find("runtime_s") == std::string::npos);
  RunOptions timed;
  timed.timing = true;
  CHECK(dump(to_json(run_problem(p, "sha256:x", timed))).find("runtime_s") != std::string::npos);
}

TEST_CASE("report layout") {
  const Report r = run_problem(parse_problem_text(kParabola), "sha256:abc");
  const Json j = to_json(r);
  CHECK(j["version"] == "econv 1.0.0");
  CHECK(j["input_hash"] == "sha256:abc");
  CHECK(j["summary"]["total"] == 4);
  CHECK(j["summary"]["PASS"] == 3);
  CHECK(j["summary"]["FAIL"] == 1);
  CHECK(j["traceability"].size() == 4);
  const Json& rec = j["checks"][0];
  for (const char* key : {"check_id", "label", "anchor", "mode", "verdict", "sampled", "checked", "detail", "values",
                          "witnesses"}) {
    CHECK(rec.contains(key));
  }
  CHECK(traceability_table(r).find("necessary-at-0") != std::string::npos);
}

TEST_CASE("seed override replaces check seeds") {
  const Problem p = parse_problem_text(kParabola);
  RunOptions a;
  a.seed = 11;
  RunOptions b;
  b.seed = 11;
  CHECK(dump(to_json(run_problem(p, "h", a))) == dump(to_json(run_problem(p, "h", b))));
}

TEST_CASE("worked example: square on the positive axis") {
  const Report r = repro(4);
  CHECK(exit_code(r) == 0);
  for (const CheckRecord& rec : r.records) {
    INFO(rec.label << ": " << rec.verdict.detail);
    CHECK(rec.verdict.outcome == Outcome::Pass);
  }
  const CheckRecord& exact = by_label(r, "square-conjugate-exact");
  const auto value = std::find_if(exact.verdict.values.begin(), exact.verdict.values.end(),
                                  [](const NamedValue& nv) { return nv.first == "value"; });
  REQUIRE(value != exact.verdict.values.end());
  CHECK(value->second.value() == 2.25);
}

TEST_CASE("worked example: epigraph separation") {
  const Problem p = parse_problem(Json::parse(repro_document(2))[0]);
  const CheckRecord rec = run_check(p, p.checks[0]);
  CHECK(rec.verdict.outcome == Outcome::Pass);
  REQUIRE(rec.verdict.witnesses.size() == 3);
  for (const Witness& w : rec.verdict.witnesses) {
    REQUIRE(w.coords.size() == 2);
    CHECK(w.coords[0] == 0.0);
    auto value_of = [&](const std::string& name) {
      const auto it = std::find_if(w.values.begin(), w.values.end(),
                                   [&](const NamedValue& nv) { return nv.first == name; });
      REQUIRE(it != w.values.end());
      return it->second.value();
    };
    CHECK(value_of("direction_0") == -1.0);
    CHECK(value_of("direction_1") == 0.0);
    CHECK(value_of("support") == 0.0);
    CHECK(value_of("support_attained") == 0.0);
  }
}

TEST_CASE("worked example: difference of entropy and an indicator") {
  const Report r = repro(5);
  CHECK(by_label(r, "wedge-value-at-(1,1)").verdict.outcome == Outcome::Pass);
  CHECK(by_label(r, "wedge-value-at-(0,0)").verdict.outcome == Outcome::Pass);
  CHECK(by_label(r, "wedge-(1,1)-is-minimiser").verdict.outcome == Outcome::Pass);
  CHECK(by_label(r, "non-sufficiency-(0,0)-eps-0").verdict.outcome == Outcome::Pass);
  CHECK(by_label(r, "non-sufficiency-(0,0)-eps-1").verdict.outcome == Outcome::Pass);
  CHECK(by_label(r, "wedge-necessary-at-(0,0)-fenchel-part").verdict.outcome == Outcome::Pass);
  // The full condition at the origin fails; the separation-cone part is what breaks.
  const CheckRecord& full = by_label(r, "wedge-necessary-at-(0,0)");
  CHECK(full.verdict.outcome == Outcome::Fail);
  REQUIRE_FALSE(full.verdict.witnesses.empty());
  const std::vector<double> expected{0, 0, 1, 1, 2};
  const bool found = std::any_of(full.verdict.witnesses.begin(), full.verdict.witnesses.end(),
                                 [&](const Witness& w) { return w.coords == expected; });
  CHECK(found);
}

TEST_CASE("unknown example numbers are rejected") {
  CHECK_THROWS_AS(repro_document(3), ValidationError);
}
