#include "internal.hpp"

#include "econv/conjugation.hpp"

#include <cmath>
#include <set>

namespace econv::harness {

namespace detail {

Node Node::at(const std::string& key) const {
  if (!j_->is_object()) {
    fail("expected an object");
  }
  auto it = j_->find(key);
  if (it == j_->end()) {
    fail("missing field \"" + key + "\"");
  }
  return Node(*it, path_ + "/" + key);
}

std::optional<Node> Node::find(const std::string& key) const {
  if (!has(key)) {
    return std::nullopt;
  }
  return Node((*j_)[key], path_ + "/" + key);
}

Node Node::index(std::size_t i) const {
  if (!j_->is_array()) {
    fail("expected an array");
  }
  return Node((*j_)[i], path_ + "/" + std::to_string(i));
}

std::size_t Node::size() const {
  if (!j_->is_array()) {
    fail("expected an array");
  }
  return j_->size();
}

double Node::number() const { return ext().value(); }

double Node::real() const {
  const ExtReal v = ext();
  if (!v.is_finite()) {
    fail("expected a finite number");
  }
  return v.value();
}

ExtReal Node::ext() const { return ext_from_json(*j_, path_); }

bool Node::boolean() const {
  if (!j_->is_boolean()) {
    fail("expected true or false");
  }
  return j_->get<bool>();
}

std::string Node::string() const {
  if (!j_->is_string()) {
    fail("expected a string");
  }
  return j_->get<std::string>();
}

std::uint64_t Node::unsigned_int() const {
  if (!j_->is_number_integer() || (j_->is_number_integer() && !j_->is_number_unsigned() && j_->get<long long>() < 0)) {
    fail("expected a non-negative integer");
  }
  return j_->get<std::uint64_t>();
}

std::vector<double> Node::numbers() const {
  std::vector<double> out;
  for (std::size_t i = 0; i < size(); ++i) {
    out.push_back(index(i).number());
  }
  return out;
}

Vec Node::vec(std::size_t n) const {
  if (n == 1 && j_->is_number()) {
    return Vec{real()};
  }
  if (size() != n) {
    fail("expected " + std::to_string(n) + " coordinates, got " + std::to_string(size()));
  }
  Vec v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = index(i).real();
  }
  return v;
}

std::vector<Point> Node::points(std::size_t n) const {
  std::vector<Point> out;
  for (std::size_t i = 0; i < size(); ++i) {
    out.push_back(index(i).vec(n));
  }
  return out;
}

DualTriple Node::triple(std::size_t n) const {
  if (j_->is_object()) {
    return {at("xstar").vec(n), at("ustar").vec(n), at("alpha").real()};
  }
  if (size() != 2 * n + 1) {
    fail("expected a triple of " + std::to_string(2 * n + 1) + " coordinates (x*, u*, alpha)");
  }
  std::vector<double> c;
  for (std::size_t i = 0; i < size(); ++i) {
    c.push_back(index(i).real());
  }
  return triple_from_coords(c, n);
}

std::vector<DualTriple> Node::triples(std::size_t n) const {
  std::vector<DualTriple> out;
  for (std::size_t i = 0; i < size(); ++i) {
    out.push_back(index(i).triple(n));
  }
  return out;
}

namespace {

Box parse_box(const Node& node, std::size_t n) {
  Box b;
  const Vec lo = node.at("lo").vec(n);
  const Vec hi = node.at("hi").vec(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lo[i] <= hi[i])) {
      node.fail("box needs lo <= hi on every axis");
    }
    b.lo.push_back(lo[i]);
    b.hi.push_back(hi[i]);
  }
  return b;
}

double positive(const Node& node) {
  const double v = node.real();
  if (!(v > 0.0)) {
    node.fail("expected a positive number");
  }
  return v;
}

} // namespace

GridConfig parse_grid(const Node& node, std::size_t n, GridConfig base) {
  if (auto b = node.find("x_box")) {
    base.x_box = parse_box(*b, n);
  }
  if (auto s = node.find("x_step")) {
    base.x_step = positive(*s);
  }
  if (auto b = node.find("w_box")) {
    base.w_box = parse_box(*b, 2 * n + 1);
  }
  if (auto s = node.find("w_step")) {
    base.w_step = positive(*s);
  }
  return base;
}

EvalContext check_context(const Problem& p, const Node& check) {
  EvalContext ctx = p.ctx;
  if (auto m = check.find("mode")) {
    const std::string mode = m->string();
    if (mode == "exact") {
      ctx.tol = TolerancePolicy::exact();
    } else if (mode == "grid") {
      if (ctx.tol.is_exact()) {
        ctx.tol = TolerancePolicy::grid();
      }
    } else {
      m->fail("mode must be \"exact\" or \"grid\"");
    }
  }
  if (auto g = check.find("grid")) {
    ctx.grid = parse_grid(*g, p.space_dim, ctx.grid);
  }
  return ctx;
}

} // namespace detail

using detail::Node;

namespace {

/// A list of halfspaces, or for n = 1 an interval {lo, hi, lo_closed, hi_closed}.
FlaggedConvexSet parse_set(const Node& node, std::size_t n) {
  if (node.json().is_object()) {
    if (n != 1) {
      node.fail("interval sets need space_dim 1");
    }
    std::vector<XHalfspace> hs;
    if (auto lo = node.find("lo")) {
      const ExtReal v = lo->ext();
      if (v.is_pos_inf()) {
        lo->fail("lower end cannot be +inf");
      }
      if (v.is_finite()) {
        const bool closed = node.has("lo_closed") && node.at("lo_closed").boolean();
        hs.push_back({Vec{-1.0}, -v.value(), !closed});
      }
    }
    if (auto hi = node.find("hi")) {
      const ExtReal v = hi->ext();
      if (v.is_neg_inf()) {
        hi->fail("upper end cannot be -inf");
      }
      if (v.is_finite()) {
        const bool closed = node.has("hi_closed") && node.at("hi_closed").boolean();
        hs.push_back({Vec{1.0}, v.value(), !closed});
      }
    }
    return FlaggedConvexSet(1, hs);
  }
  std::vector<XHalfspace> hs;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const Node h = node.index(i);
    const Vec normal = h.at("normal").vec(n);
    if (normal.is_zero()) {
      h.at("normal").fail("normal must be non-zero");
    }
    hs.push_back({normal, h.at("level").real(), h.at("strict").boolean()});
  }
  return FlaggedConvexSet(n, hs);
}

FlaggedConvexSet optional_set(const Node& spec, std::size_t n) {
  if (auto d = spec.find("domain")) {
    return parse_set(*d, n);
  }
  return FlaggedConvexSet::whole_space(n);
}

Matrix parse_matrix(const Node& node, std::size_t n) {
  if (node.json().is_number()) {
    if (n != 1) {
      node.fail("a scalar Q needs space_dim 1");
    }
    return Matrix::diagonal(Vec{node.real()});
  }
  if (node.size() != n) {
    node.fail("Q needs " + std::to_string(n) + " rows");
  }
  Matrix m = Matrix::zero(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec row = node.index(i).vec(n);
    for (std::size_t j = 0; j < n; ++j) {
      m(i, j) = row[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (m(i, j) != m(j, i)) {
        node.fail("Q must be symmetric");
      }
    }
  }
  return m;
}

class FunctionResolver {
public:
  FunctionResolver(const Node& functions, std::size_t n, std::size_t max_nodes)
      : functions_(functions), n_(n), max_nodes_(max_nodes) {}

  FunctionModel named(const std::string& name, const Node& where) {
    if (auto it = done_.find(name); it != done_.end()) {
      return it->second;
    }
    if (!functions_.has(name)) {
      where.fail("unknown function \"" + name + "\"");
    }
    if (!active_.insert(name).second) {
      where.fail("function \"" + name + "\" refers to itself");
    }
    FunctionModel f = build(functions_.at(name));
    active_.erase(name);
    done_.emplace(name, f);
    return f;
  }

  FunctionModel build(const Node& spec) {
    if (spec.json().is_string()) {
      return named(spec.string(), spec);
    }
    try {
      return build_spec(spec);
    } catch (const ValidationError&) {
      throw;
    } catch (const Error& e) {
      spec.fail(e.what());
    } catch (const std::invalid_argument& e) {
      spec.fail(e.what());
    }
  }

private:
  FunctionModel build_spec(const Node& spec) {
    const std::string type = spec.at("type").string();
    if (type == "affine") {
      return FunctionModel::affine(spec.at("a").vec(n_), spec.has("b") ? spec.at("b").real() : 0.0);
    }
    if (type == "quadratic") {
      return FunctionModel::quadratic(parse_matrix(spec.at("q"), n_), spec.has("b") ? spec.at("b").vec(n_) : Vec(n_),
                                      spec.has("const") ? spec.at("const").real() : 0.0, optional_set(spec, n_));
    }
    if (type == "indicator") {
      return FunctionModel::indicator(optional_set(spec, n_));
    }
    if (type == "xlogxy") {
      if (n_ != 2) {
        spec.fail("xlogxy needs space_dim 2");
      }
      return FunctionModel::xlogxy(parse_set(spec.at("domain"), n_),
                                   !spec.has("include_origin") || spec.at("include_origin").boolean());
    }
    if (type == "sum") {
      const Node terms = spec.at("terms");
      std::vector<FunctionModel> fs;
      for (std::size_t i = 0; i < terms.size(); ++i) {
        fs.push_back(build(terms.index(i)));
      }
      return FunctionModel::sum(std::move(fs));
    }
    if (type == "grid") {
      const Vec lo = spec.at("lo").vec(n_);
      const Vec hi = spec.at("hi").vec(n_);
      const double step = spec.at("step").real();
      if (!(step > 0.0)) {
        spec.at("step").fail("expected a positive number");
      }
      Lattice lattice(std::vector<double>(lo.begin(), lo.end()), std::vector<double>(hi.begin(), hi.end()), step,
                      max_nodes_);
      if (auto of = spec.find("of")) {
        return grid_sample(build(*of), lattice);
      }
      const Node values = spec.at("values");
      std::vector<ExtReal> vs;
      for (std::size_t i = 0; i < values.size(); ++i) {
        vs.push_back(values.index(i).ext());
      }
      return FunctionModel::grid(std::move(lattice), std::move(vs));
    }
    spec.at("type").fail("unknown function type \"" + type + "\"");
  }

  Node functions_;
  std::size_t n_;
  std::size_t max_nodes_;
  std::map<std::string, FunctionModel> done_;
  std::set<std::string> active_;
};

Outcome parse_outcome(const Node& node) {
  const std::string s = node.string();
  if (s == "PASS" || s == "pass" || s == "HOLDS" || s == "holds") {
    return Outcome::Pass;
  }
  if (s == "FAIL" || s == "fail" || s == "FAILS" || s == "fails") {
    return Outcome::Fail;
  }
  if (s == "VACUOUS" || s == "vacuous") {
    return Outcome::Vacuous;
  }
  if (s == "INCONCLUSIVE" || s == "inconclusive") {
    return Outcome::Inconclusive;
  }
  node.fail("unknown verdict \"" + s + "\"");
}

} // namespace

FlaggedConvexSet detail::parse_flagged_set(const Node& node, std::size_t n) { return parse_set(node, n); }

ExtReal ext_from_json(const Json& j, const std::string& path) {
  if (j.is_number()) {
    const double v = j.get<double>();
    if (std::isnan(v)) {
      throw ValidationError(path, "NaN is not a value");
    }
    return ExtReal(v);
  }
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") {
      return ExtReal::pos_inf();
    }
    if (s == "-inf") {
      return ExtReal::neg_inf();
    }
  }
  throw ValidationError(path, "expected a number or \"inf\"/\"-inf\"");
}

Json ext_to_json(ExtReal v) {
  if (v.is_pos_inf()) {
    return "inf";
  }
  if (v.is_neg_inf()) {
    return "-inf";
  }
  return v.value();
}

Problem parse_problem(const Json& doc) {
  const Node root(doc, "");
  if (!doc.is_object()) {
    root.fail("problem file must be a JSON object");
  }
  Problem p;
  const Node dim = root.at("space_dim");
  p.space_dim = dim.unsigned_int();
  if (p.space_dim != 1 && p.space_dim != 2) {
    dim.fail("space_dim must be 1 or 2");
  }
  const std::size_t n = p.space_dim;

  if (auto t = root.find("tolerance")) {
    const std::string mode = t->at("mode").string();
    if (mode == "exact") {
      p.ctx.tol = TolerancePolicy::exact();
    } else if (mode == "grid") {
      const double eq = t->has("eq_tol") ? t->at("eq_tol").real() : 1e-9;
      const double margin = t->has("strict_margin") ? t->at("strict_margin").real() : 1e-9;
      if (eq < 0.0 || margin < 0.0) {
        t->fail("tolerances must be non-negative");
      }
      p.ctx.tol = TolerancePolicy::grid(eq, margin);
    } else {
      t->at("mode").fail("mode must be \"exact\" or \"grid\"");
    }
  }
  if (auto b = root.find("budgets")) {
    if (auto m = b->find("max_nodes")) {
      p.ctx.grid.max_nodes = m->unsigned_int();
      if (p.ctx.grid.max_nodes == 0) {
        m->fail("max_nodes must be positive");
      }
    }
  }
  if (auto g = root.find("grid")) {
    p.ctx.grid = detail::parse_grid(*g, n, p.ctx.grid);
  }

  const Json empty_object = Json::object();
  const Node functions = root.find("functions").value_or(Node(empty_object, "/functions"));
  if (!functions.json().is_object()) {
    functions.fail("expected an object of named functions");
  }
  FunctionResolver resolver(functions, n, p.ctx.grid.max_nodes);
  for (const auto& [name, spec] : functions.json().items()) {
    p.functions.emplace(name, resolver.named(name, functions.at(name)));
  }

  if (auto wf = root.find("w_functions")) {
    for (const auto& [name, spec_json] : wf->json().items()) {
      const Node spec = wf->at(name);
      const std::string type = spec.at("type").string();
      if (type == "conjugate") {
        p.w_functions.emplace(name, WFunctionModel::conjugate_of(resolver.build(spec.at("of"))));
      } else if (type == "grid") {
        const std::size_t wd = 2 * n + 1;
        const std::vector<double> lo = spec.at("lo").numbers();
        const std::vector<double> hi = spec.at("hi").numbers();
        if (lo.size() != wd || hi.size() != wd) {
          spec.fail("W grid boxes need " + std::to_string(wd) + " coordinates");
        }
        const Node values = spec.at("values");
        std::vector<ExtReal> vs;
        for (std::size_t i = 0; i < values.size(); ++i) {
          vs.push_back(values.index(i).ext());
        }
        try {
          p.w_functions.emplace(
              name, WFunctionModel::grid(n, Lattice(lo, hi, spec.at("step").real(), p.ctx.grid.max_nodes), vs));
        } catch (const Error& e) {
          spec.fail(e.what());
        } catch (const std::invalid_argument& e) {
          spec.fail(e.what());
        }
      } else {
        spec.at("type").fail("unknown W function type \"" + type + "\"");
      }
    }
  }

  if (auto dc = root.find("dc")) {
    FunctionModel f = resolver.build(dc->at("f"));
    FunctionModel g = resolver.build(dc->at("g"));
    const Node box = dc->at("search_box");
    const Vec lo = box.at("lo").vec(n);
    const Vec hi = box.at("hi").vec(n);
    try {
      p.dc.emplace(std::move(f), std::move(g),
                   Box{std::vector<double>(lo.begin(), lo.end()), std::vector<double>(hi.begin(), hi.end())},
                   dc->at("search_step").real());
    } catch (const Error& e) {
      dc->fail(e.what());
    } catch (const std::invalid_argument& e) {
      dc->fail(e.what());
    }
  }

  if (auto checks = root.find("checks")) {
    for (std::size_t i = 0; i < checks->size(); ++i) {
      const Node c = checks->index(i);
      CheckSpec spec;
      spec.id = c.at("id").string();
      spec.label = c.has("label") ? c.at("label").string() : spec.id;
      if (auto s = c.find("seed")) {
        spec.seed = s->unsigned_int();
      }
      if (auto e = c.find("expect")) {
        spec.expect = parse_outcome(*e);
      }
      spec.params = c.json();
      spec.path = c.path();
      p.checks.push_back(std::move(spec));
    }
  }
  validate_checks(p);
  return p;
}

Problem parse_problem_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError("/", std::string("not valid JSON: ") + e.what());
  }
  return parse_problem(doc);
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    std::size_t used = 0;
    double v = 0.0;
    try {
      if (item == "inf" || item == "+inf" || item == "-inf") {
        v = item == "-inf" ? -INFINITY : INFINITY;
        used = item.size();
      } else {
        v = std::stod(item, &used);
      }
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) {
      throw ValidationError(what, "expected comma-separated numbers, got \"" + text + "\"");
    }
    out.push_back(v);
    if (comma == std::string::npos) {
      break;
    }
    pos = comma + 1;
  }
  return out;
}

} // namespace econv::harness
