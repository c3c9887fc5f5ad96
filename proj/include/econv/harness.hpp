#pragma once

#include "econv/context.hpp"
#include "econv/directional_dc.hpp"
#include "econv/function_model.hpp"
#include "econv/verdict.hpp"

#include "json.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace econv::harness {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kVersion = "econv 1.0.0";

/// One entry of the `checks` list. `params` is the whole check object; `path`
/// locates it in the problem file for error messages.
struct CheckSpec {
  std::string id;
  std::string label;
  std::optional<std::uint64_t> seed;
  std::optional<Outcome> expect;
  Json params;
  std::string path;
};

struct Problem {
  std::size_t space_dim = 1;
  EvalContext ctx;
  std::map<std::string, FunctionModel> functions;
  std::map<std::string, WFunctionModel> w_functions;
  std::optional<DCProblem> dc;
  std::vector<CheckSpec> checks;
};

/// Parses and validates a problem document. Throws ValidationError with a
/// JSON-pointer style path on malformed input.
Problem parse_problem(const Json& doc);
Problem parse_problem_text(const std::string& text);

struct RunOptions {
  unsigned threads = 1;
  bool timing = false;
  /// Replaces every check seed when set.
  std::optional<std::uint64_t> seed;
  /// Replaces eq_tol and strict_margin of GRID-mode policies.
  std::optional<double> tol;
  std::optional<std::size_t> max_nodes;
};

/// Applies the tolerance and budget overrides of `opt` to a context.
EvalContext apply_options(EvalContext ctx, const RunOptions& opt);

struct CheckRecord {
  std::string check_id;
  std::string label;
  std::string anchor;
  std::string mode;
  /// Final verdict; with an expectation it is PASS exactly when the module
  /// outcome matched it.
  Verdict verdict;
  std::optional<Outcome> outcome;
  std::optional<Outcome> expected;
  double runtime_s = 0.0;
};

struct Report {
  std::string input_hash;
  std::vector<CheckRecord> records;
  bool timing = false;
};

/// Registry ids in a fixed order.
const std::vector<std::string>& registry_ids();
/// Short statement of the result a registry entry exercises.
std::string anchor_for(const std::string& id);

/// Runs one check. Computation errors become INCONCLUSIVE (or VACUOUS for an
/// uncertified hypothesis); validation errors propagate.
CheckRecord run_check(const Problem& p, const CheckSpec& spec, const RunOptions& opt = {});

/// Validates every check (ids, parameters, seeds) without running them.
void validate_checks(const Problem& p);

/// Runs the checks (optionally restricted to `only`) in a pool of opt.threads workers.
Report run_problem(const Problem& p, const std::string& input_hash, const RunOptions& opt = {},
                   const std::vector<std::string>& only = {});

/// Built-in worked examples: 2, 4, 5, or 0 for all of them.
std::string repro_document(int example);
Report repro(int example, const RunOptions& opt = {});

Json to_json(const Report& r);
/// Serialises with 17 significant digits for numbers and "inf"/"-inf" for infinities.
std::string dump(const Json& j);
/// Text table: check, anchor, verdict.
std::string traceability_table(const Report& r);

/// 0 all PASS/VACUOUS, 1 any FAIL, 2 any INCONCLUSIVE without FAIL.
int exit_code(const Report& r);
inline constexpr int kInputError = 3;

std::string sha256_hex(std::string_view data);

/// Number or "inf"/"-inf"/"+inf".
ExtReal ext_from_json(const Json& j, const std::string& path);
Json ext_to_json(ExtReal v);

/// Comma-separated doubles, as used on the command line.
std::vector<double> parse_list(const std::string& text, const std::string& what);

} // namespace econv::harness
