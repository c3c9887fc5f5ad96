#include "econv/harness.hpp"

#include "econv/errors.hpp"

namespace econv::harness {

namespace {

// Epigraph {x > 0, t >= x} of f(x) = x on x > 0, and f itself.
constexpr const char* kEpigraph = R"json({
  "space_dim": 2,
  "checks": [
    {"id": "def-econvex-separation", "label": "epigraph-separation-on-axis",
     "set": [{"normal": [-1, 0], "level": 0, "strict": true},
             {"normal": [1, -1], "level": 0, "strict": false}],
     "points": [[0, 0], [0, 1], [0, 5]]}
  ]
})json";

constexpr const char* kEpigraphHull = R"json({
  "space_dim": 1,
  "tolerance": {"mode": "grid", "eq_tol": 1e-9, "strict_margin": 1e-9},
  "functions": {
    "identity_on_positive": {"type": "quadratic", "q": 0, "b": [1], "domain": {"lo": 0}}
  },
  "checks": [
    {"id": "thm-biconjugate", "label": "identity-on-positive-hull",
     "function": "identity_on_positive",
     "eval_grid": {"lo": [-1], "hi": [5], "step": 1e-3},
     "approx": {"tol": 1e-2, "region": {"lo": 0.01, "lo_closed": true}}}
  ]
})json";

constexpr const char* kSquare = R"json({
  "space_dim": 1,
  "tolerance": {"mode": "exact"},
  "functions": {
    "square_on_positive": {"type": "quadratic", "q": 1, "domain": {"lo": 0}}
  },
  "checks": [
    {"id": "conjugate-value", "label": "square-conjugate-exact", "function": "square_on_positive",
     "w": [3, 0, 1], "expect_value": 2.25, "value_tol": 0, "expect_argmax": [1.5], "argmax_tol": 0},
    {"id": "conjugate-value", "label": "square-conjugate-grid", "function": "square_on_positive", "mode": "grid",
     "grid": {"x_box": {"lo": [0], "hi": [10]}, "x_step": 1e-3},
     "w": [3, 0, 1], "expect_value": 2.25, "value_tol": 1e-3, "expect_argmax": [1.5], "argmax_tol": 1e-2},
    {"id": "dom-fc-classification", "label": "square-conjugate-domain", "function": "square_on_positive",
     "triples": [
       {"w": [-1, -1, 0], "member": true}, {"w": [-1, 0, 1], "member": true},
       {"w": [-1, 0, 0], "member": false}, {"w": [-1, 1, 1], "member": false},
       {"w": [0, -1, 0], "member": true}, {"w": [0, 0, 1], "member": true},
       {"w": [0, 0, 0], "member": false}, {"w": [0, 1, 1], "member": false},
       {"w": [7, -1, 0], "member": true}, {"w": [7, 0, 1], "member": true},
       {"w": [7, 0, 0], "member": false}, {"w": [7, 1, 1], "member": false}]},
    {"id": "subdiff-membership", "label": "square-subdiff-at-0.5", "function": "square_on_positive", "point": [0.5],
     "triples": [
       {"w": [1, -1, 0], "member": true}, {"w": [1, 0, 1], "member": true},
       {"w": [1, 0, 0], "member": false}, {"w": [1, 1, 1], "member": false},
       {"w": [3, 0, 1], "member": false}]},
    {"id": "subdiff-membership", "label": "square-subdiff-at-1.5", "function": "square_on_positive", "point": [1.5],
     "triples": [
       {"w": [3, -1, 0], "member": true}, {"w": [3, 0, 1], "member": true},
       {"w": [3, 0, 0], "member": false}, {"w": [3, 1, 1], "member": false},
       {"w": [3, 0, 1], "member": true}]},
    {"id": "subdiff-membership", "label": "square-subdiff-at-2", "function": "square_on_positive", "point": [2],
     "triples": [
       {"w": [4, -1, 0], "member": true}, {"w": [4, 0, 1], "member": true},
       {"w": [4, 0, 0], "member": false}, {"w": [4, 1, 1], "member": false},
       {"w": [3, 0, 1], "member": false}]},
    {"id": "prop-subdiff-in-domfc", "label": "square-subdiff-in-conjugate-domain", "function": "square_on_positive",
     "point": [1.5], "count": 200, "seed": 4},
    {"id": "prop-conjugate-flip", "label": "square-conjugate-flip", "function": "square_on_positive",
     "point": [1.5], "w": [3, 0, 1]},
    {"id": "eq-product-form", "label": "square-product-form", "function": "square_on_positive",
     "point": [1], "eps": 0.5, "count": 200, "seed": 4}
  ]
})json";

// x ln(x/y) on the wedge {0 < x <= 1, 0 < y <= x} plus the origin, minus the
// indicator of {x + y < 2}.
constexpr const char* kWedge = R"json({
  "space_dim": 2,
  "tolerance": {"mode": "exact"},
  "functions": {
    "entropy_on_wedge": {"type": "xlogxy", "include_origin": true,
      "domain": [{"normal": [1, 0], "level": 1, "strict": false},
                 {"normal": [-1, 1], "level": 0, "strict": false},
                 {"normal": [0, -1], "level": 0, "strict": true}]},
    "halfplane_indicator": {"type": "indicator", "domain": [{"normal": [1, 1], "level": 2, "strict": true}]}
  },
  "dc": {"f": "entropy_on_wedge", "g": "halfplane_indicator",
         "search_box": {"lo": [0, 0], "hi": [2, 2]}, "search_step": 0.25},
  "checks": [
    {"id": "dc-value", "label": "wedge-value-at-(1,1)", "point": [1, 1], "expect_value": "-inf"},
    {"id": "dc-value", "label": "wedge-value-at-(0,0)", "point": [0, 0], "expect_value": 0},
    {"id": "eps-minimizer", "label": "wedge-(1,1)-is-minimiser", "point": [1, 1], "eps": 0, "expect": "pass"},
    {"id": "cor-global-necessary", "label": "wedge-necessary-at-(0,0)", "point": [0, 0],
     "eps_grid": [0, 0.5, 1, 2], "count": 100, "seed": 5, "expect": "pass"},
    {"id": "cor-global-necessary", "label": "wedge-necessary-at-(0,0)-fenchel-part", "point": [0, 0],
     "eps_grid": [0, 0.5, 1, 2], "count": 100, "seed": 5, "parts": "fenchel"},
    {"id": "eps-minimizer", "label": "non-sufficiency-(0,0)-eps-0", "point": [0, 0], "eps": 0, "expect": "fail"},
    {"id": "eps-minimizer", "label": "non-sufficiency-(0,0)-eps-1", "point": [0, 0], "eps": 1, "expect": "fail"}
  ]
})json";

} // namespace

std::string repro_document(int example) {
  std::string out = "[\n";
  auto add = [&](const char* doc) {
    if (out.size() > 2) {
      out += ",\n";
    }
    out += doc;
  };
  if (example == 0 || example == 2) {
    add(kEpigraph);
    add(kEpigraphHull);
  }
  if (example == 0 || example == 4) {
    add(kSquare);
  }
  if (example == 0 || example == 5) {
    add(kWedge);
  }
  if (out.size() == 2) {
    throw ValidationError("--example", "expected 2, 4, 5 or all");
  }
  return out + "\n]\n";
}

Report repro(int example, const RunOptions& opt) {
  const std::string text = repro_document(example);
  const Json docs = Json::parse(text);
  Report all;
  all.input_hash = "sha256:" + sha256_hex(text);
  all.timing = opt.timing;
  for (const Json& doc : docs) {
    const Problem p = parse_problem(doc);
    Report r = run_problem(p, all.input_hash, opt);
    for (CheckRecord& rec : r.records) {
      all.records.push_back(std::move(rec));
    }
  }
  return all;
}

} // namespace econv::harness
