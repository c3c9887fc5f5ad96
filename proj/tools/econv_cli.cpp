#include "econv/conjugation.hpp"
#include "econv/directional_dc.hpp"
#include "econv/errors.hpp"
#include "econv/harness.hpp"
#include "econv/subdifferential.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace econv;
using namespace econv::harness;

namespace {

struct Common {
  double tol = 0.0;
  std::size_t budget = 0;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  bool timing = false;
  CLI::Option* tol_opt = nullptr;
  CLI::Option* budget_opt = nullptr;
  CLI::Option* seed_opt = nullptr;

  RunOptions options() const {
    RunOptions o;
    o.threads = threads;
    o.timing = timing;
    if (*seed_opt) {
      o.seed = seed;
    }
    if (*tol_opt) {
      o.tol = tol;
    }
    if (*budget_opt) {
      o.max_nodes = budget;
    }
    return o;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError(path, "cannot read file");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Loaded {
  Problem problem;
  std::string hash;
};

Loaded load(const std::string& path) {
  const std::string text = read_file(path);
  return {parse_problem_text(text), "sha256:" + sha256_hex(text)};
}

void write_output(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) {
    throw ValidationError(out, "cannot write file");
  }
  f << text;
}

const FunctionModel& lookup(const Problem& p, const std::string& name) {
  auto it = p.functions.find(name);
  if (it == p.functions.end()) {
    throw ValidationError("--function", "unknown function \"" + name + "\"");
  }
  return it->second;
}

Vec to_vec(const std::vector<double>& v, std::size_t n, const std::string& what) {
  if (v.size() != n) {
    throw ValidationError(what, "expected " + std::to_string(n) + " coordinates");
  }
  Vec out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = v[i];
  }
  return out;
}

DualTriple to_triple(const std::vector<double>& v, std::size_t n, const std::string& what) {
  if (v.size() != 2 * n + 1) {
    throw ValidationError(what, "expected " + std::to_string(2 * n + 1) + " numbers x*,u*,alpha");
  }
  return triple_from_coords(v, n);
}

Json vec_json(const Vec& v) {
  Json out = Json::array();
  for (double x : v) {
    out.push_back(ext_to_json(x));
  }
  return out;
}

EvalContext context_for(const Problem& p, const std::string& mode, const RunOptions& opt) {
  EvalContext ctx = p.ctx;
  if (mode == "exact") {
    ctx.tol = TolerancePolicy::exact();
  } else if (mode == "grid") {
    if (ctx.tol.is_exact()) {
      ctx.tol = TolerancePolicy::grid();
    }
  } else if (!mode.empty()) {
    throw ValidationError("--mode", "expected exact or grid");
  }
  return apply_options(ctx, opt);
}

Json interval_json(const Interval& iv) {
  if (iv.empty) {
    return "empty";
  }
  return Json{{"lo", ext_to_json(iv.lo)}, {"hi", ext_to_json(iv.hi)}, {"lo_closed", iv.lo_closed},
              {"hi_closed", iv.hi_closed}};
}

int finish_report(const Report& r, const std::string& out, bool table) {
  write_output(dump(to_json(r)), out);
  if (table) {
    (out.empty() ? std::cerr : std::cout) << traceability_table(r);
  }
  return exit_code(r);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evenly convex conjugation and DC optimality checks"};
  app.require_subcommand(1);
  Common common;
  common.tol_opt = app.add_option("--tol", common.tol, "GRID comparison tolerance (eq_tol and strict margin)")
                       ->check(CLI::NonNegativeNumber);
  common.budget_opt = app.add_option("--budget", common.budget, "node budget for every grid")->check(CLI::PositiveNumber);
  app.add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);
  common.seed_opt = app.add_option("--seed", common.seed, "seed for sampled checks (overrides the problem file)");
  app.add_flag("--timing", common.timing, "include runtimes in reports (breaks byte-stability)");

  std::string problem_path;
  std::string function_name;
  std::string out_path;

  auto* conj = app.add_subcommand("conjugate", "c-conjugate of a function at a triple");
  std::string at_text;
  std::string mode;
  conj->add_option("--problem", problem_path)->required();
  conj->add_option("--function", function_name)->required();
  conj->add_option("--at", at_text, "x*,u*,alpha")->required();
  conj->add_option("--mode", mode)->check(CLI::IsMember({"exact", "grid"}));

  auto* sub = app.add_subcommand("subdiff", "eps-c-subdifferential descriptor");
  std::string point_text;
  double eps = 0.0;
  bool extract = false;
  std::string w_text;
  sub->add_option("--problem", problem_path)->required();
  sub->add_option("--function", function_name)->required();
  sub->add_option("--point", point_text)->required();
  sub->add_option("--eps", eps)->check(CLI::NonNegativeNumber);
  sub->add_flag("--extract-interval", extract, "report the Fenchel part as an interval (n = 1)");
  sub->add_option("--w", w_text, "also test membership of x*,u*,alpha");
  sub->add_option("--mode", mode)->check(CLI::IsMember({"exact", "grid"}));

  auto* dd = app.add_subcommand("dirderiv", "eps-directional derivative");
  std::string dir_text;
  dd->add_option("--problem", problem_path)->required();
  dd->add_option("--function", function_name)->required();
  dd->add_option("--point", point_text)->required();
  dd->add_option("--dir", dir_text)->required();
  dd->add_option("--eps", eps)->check(CLI::NonNegativeNumber);

  auto* dcc = app.add_subcommand("dc-check", "optimality checks for the dc section of a problem");
  std::string eps_grid_text = "0,0.5,1,2";
  std::string lambda_grid_text = "0,0.1,0.5,1,5";
  dcc->add_option("--problem", problem_path)->required();
  dcc->add_option("--point", point_text)->required();
  dcc->add_option("--eps-grid", eps_grid_text);
  dcc->add_option("--lambda-grid", lambda_grid_text);
  dcc->add_option("--out", out_path);

  auto* ver = app.add_subcommand("verify", "run the checks of a problem file");
  std::string only_text;
  ver->add_option("--problem", problem_path)->required();
  ver->add_option("--only", only_text, "comma-separated check ids or labels");
  ver->add_option("--out", out_path);

  auto* rep = app.add_subcommand("repro", "run the built-in worked examples");
  std::string example = "all";
  rep->add_option("--example", example)->check(CLI::IsMember({"2", "4", "5", "all"}));
  rep->add_option("--out", out_path);
  bool print_doc = false;
  rep->add_flag("--print-problems", print_doc, "print the built-in problem documents and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  const RunOptions opt = common.options();
  if (opt.max_nodes) {
    setenv("ECONV_BUDGET", std::to_string(*opt.max_nodes).c_str(), 1);
  }

  try {
    if (*conj) {
      const Loaded l = load(problem_path);
      const FunctionModel& f = lookup(l.problem, function_name);
      const std::size_t n = l.problem.space_dim;
      const DualTriple w = to_triple(parse_list(at_text, "--at"), n, "--at");
      const EvalContext ctx = context_for(l.problem, mode, opt);
      const ConjugateResult r = c_conjugate(f, w, ctx);
      Json coords = Json::array();
      for (double c : coords_from_triple(w)) {
        coords.push_back(c);
      }
      Json j{{"function", function_name},
             {"w", coords},
             {"mode", ctx.is_exact() ? "EXACT" : "GRID"},
             {"value", ext_to_json(r.value)}};
      j["argmax"] = r.argmax ? vec_json(*r.argmax) : Json(nullptr);
      std::cout << dump(j);
      return 0;
    }
    if (*sub) {
      const Loaded l = load(problem_path);
      const FunctionModel& f = lookup(l.problem, function_name);
      const std::size_t n = l.problem.space_dim;
      const Point x0 = to_vec(parse_list(point_text, "--point"), n, "--point");
      const EvalContext ctx = context_for(l.problem, mode, opt);
      const CSubdiffDescriptor d(f, x0, eps, ctx);
      Json j{{"function", function_name}, {"point", vec_json(x0)}, {"eps", eps},
             {"mode", ctx.is_exact() ? "EXACT" : "GRID"}, {"empty", d.empty()}};
      j["fenchel_seed"] = d.seed() ? vec_json(*d.seed()) : Json(nullptr);
      if (extract) {
        if (n != 1) {
          throw ValidationError("--extract-interval", "interval extraction needs space_dim 1");
        }
        j["fenchel_interval"] = d.fenchel_interval() ? interval_json(*d.fenchel_interval()) : Json("empty");
      }
      if (!w_text.empty()) {
        const DualTriple w = to_triple(parse_list(w_text, "--w"), n, "--w");
        j["member"] = d.member(w);
        j["fenchel_part"] = d.fenchel_member(w.xstar);
        j["vcone_part"] = d.vcone_member(w.ustar, w.alpha);
      }
      std::cout << dump(j);
      return 0;
    }
    if (*dd) {
      const Loaded l = load(problem_path);
      const FunctionModel& f = lookup(l.problem, function_name);
      const std::size_t n = l.problem.space_dim;
      const Point x0 = to_vec(parse_list(point_text, "--point"), n, "--point");
      const Vec u = to_vec(parse_list(dir_text, "--dir"), n, "--dir");
      const ExtReal v = eps_directional_derivative(f, x0, u, eps);
      std::cout << dump(Json{{"function", function_name}, {"point", vec_json(x0)}, {"direction", vec_json(u)},
                             {"eps", eps}, {"value", ext_to_json(v)}});
      return 0;
    }
    if (*dcc) {
      const std::string text = read_file(problem_path);
      Json doc;
      try {
        doc = Json::parse(text);
      } catch (const Json::parse_error& e) {
        throw ValidationError("/", std::string("not valid JSON: ") + e.what());
      }
      const std::vector<double> eps_grid = parse_list(eps_grid_text, "--eps-grid");
      const std::vector<double> lambdas = parse_list(lambda_grid_text, "--lambda-grid");
      const std::vector<double> point = parse_list(point_text, "--point");
      const std::uint64_t seed = opt.seed.value_or(1);
      Json checks = Json::array();
      checks.push_back({{"id", "dc-value"}, {"point", point}});
      checks.push_back({{"id", "cor-global-necessary"}, {"point", point}, {"eps_grid", eps_grid}, {"seed", seed}});
      for (double e : eps_grid) {
        std::ostringstream tag;
        tag << e;
        checks.push_back({{"id", "eps-minimizer"}, {"label", "eps-minimizer eps=" + tag.str()}, {"point", point}, {"eps", e}});
        checks.push_back({{"id", "cor-eps-necessary"}, {"label", "cor-eps-necessary eps=" + tag.str()}, {"point", point},
                          {"eps", e}, {"lambdas", lambdas}, {"seed", seed}});
      }
      doc["checks"] = checks;
      const Problem p = parse_problem(doc);
      if (!p.dc) {
        throw ValidationError("/dc", "dc-check needs a dc section");
      }
      return finish_report(run_problem(p, "sha256:" + sha256_hex(text), opt), out_path, false);
    }
    if (*ver) {
      const Loaded l = load(problem_path);
      std::vector<std::string> only;
      std::stringstream ss(only_text);
      for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) {
          only.push_back(item);
        }
      }
      return finish_report(run_problem(l.problem, l.hash, opt, only), out_path, false);
    }
    if (*rep) {
      const int which = example == "all" ? 0 : std::stoi(example);
      if (print_doc) {
        std::cout << repro_document(which);
        return 0;
      }
      return finish_report(repro(which, opt), out_path, true);
    }
  } catch (const ValidationError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const DimensionMismatch& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const PointNotInDomain& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
