#include "parea/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "parea/expression.hpp"

namespace parea {

namespace fs = std::filesystem;

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void dump_rec(const Json& j, std::string& out, int depth) {
  const std::string pad(2 * (depth + 1), ' '), close(2 * depth, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        dump_rec(it.value(), out, depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // short numeric arrays on one line
      bool flat = j.size() <= 8;
      for (const auto& e : j) flat = flat && e.is_primitive();
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad;
        dump_rec(e, out, depth + 1);
      }
      out += flat ? "]" : "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const Json& j) {
  std::string out;
  dump_rec(j, out, 0);
  out += "\n";
  return out;
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
  if (!f) throw std::runtime_error("write failed for " + p.string());
}

Json read_json_file(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw SchemaError("cannot open " + p.string());
  try {
    return Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw SchemaError("malformed JSON in " + p.string() + ": " + e.what());
  }
}

namespace {

std::vector<double> number_array(const Json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + " must be an array of numbers");
  std::vector<double> v;
  for (const auto& e : j) {
    if (!e.is_number()) throw SchemaError(where + " must be an array of numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw SchemaError(where + " must be a number");
  return j.get<double>();
}

int integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) throw SchemaError(where + " must be an integer");
  return j.get<int>();
}

std::string string(const Json& j, const std::string& where) {
  if (!j.is_string()) throw SchemaError(where + " must be a string");
  return j.get<std::string>();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path q(p);
  return q.is_absolute() ? q : base / q;
}

}  // namespace

void require_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw SchemaError("unknown key '" + it.key() + "' in " + where);
  }
}

Json measure_to_json(const VectorMeasure& m) {
  Json j;
  j["d"] = m.dim();
  Json cells = Json::array();
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    Json e;
    e["id"] = c;
    e["weight"] = m.weights()[c];
    e["density"] = std::vector<double>(m.density(c), m.density(c) + m.dim());
    cells.push_back(e);
  }
  j["cells"] = cells;
  Json atoms = Json::array();
  for (const Atom& a : m.atoms()) atoms.push_back(Json{{"site", a.site}, {"mass", a.mass}});
  j["atoms"] = atoms;
  return j;
}

VectorMeasure measure_from_json(const Json& j) {
  require_keys(j, {"d", "cells", "atoms"}, "measure");
  if (!j.contains("d")) throw SchemaError("measure needs 'd'");
  const int d = integer(j["d"], "measure.d");
  if (d < 1) throw SchemaError("measure.d must be >= 1");
  std::vector<double> w, dens;
  if (j.contains("cells")) {
    if (!j["cells"].is_array()) throw SchemaError("measure.cells must be an array");
    std::size_t expect = 0;
    for (const auto& c : j["cells"]) {
      require_keys(c, {"id", "weight", "density"}, "measure cell");
      if (c.contains("id") && integer(c["id"], "cell id") != static_cast<int>(expect))
        throw SchemaError("cell ids must be 0, 1, 2, ... in order");
      ++expect;
      w.push_back(number(c.value("weight", Json()), "cell weight"));
      const auto v = number_array(c.value("density", Json()), "cell density");
      if (static_cast<int>(v.size()) != d) throw SchemaError("cell density length differs from d");
      dens.insert(dens.end(), v.begin(), v.end());
    }
  }
  std::vector<Atom> atoms;
  if (j.contains("atoms")) {
    if (!j["atoms"].is_array()) throw SchemaError("measure.atoms must be an array");
    for (const auto& a : j["atoms"]) {
      require_keys(a, {"site", "mass"}, "measure atom");
      if (!a.contains("site") || !a["site"].is_number_integer()) throw SchemaError("atom site must be an integer");
      const auto v = number_array(a.value("mass", Json()), "atom mass");
      if (static_cast<int>(v.size()) != d) throw SchemaError("atom mass length differs from d");
      atoms.push_back({a["site"].get<std::int64_t>(), v});
    }
  }
  try {
    return VectorMeasure(d, std::move(w), std::move(dens), std::move(atoms));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("invalid measure: ") + e.what());
  }
}

std::string scalar_csv(const ScalarField& f) {
  const GridDomain& d = f.domain();
  std::string s = "i,j,x,y,value\n";
  for (int j = 0; j <= d.ny(); ++j)
    for (int i = 0; i <= d.nx(); ++i)
      s += std::to_string(i) + "," + std::to_string(j) + "," + format_double(d.x(i)) + "," + format_double(d.y(j)) +
           "," + format_double(f.at(i, j)) + "\n";
  return s;
}

std::string vector_csv(const VectorField& f) {
  const GridDomain& d = f.domain();
  std::string s = "i,j,x,y,v1,v2\n";
  for (int c = 0; c < d.num_cells(); ++c) {
    const int i = d.cell_i(c), j = d.cell_j(c);
    s += std::to_string(i) + "," + std::to_string(j) + "," + format_double(d.cell_x(i)) + "," +
         format_double(d.cell_y(j)) + "," + format_double(f.at(c)[0]) + "," + format_double(f.at(c)[1]) + "\n";
  }
  return s;
}

std::string cell_csv(const CellField& f) {
  const GridDomain& d = f.dom;
  std::string s = "i,j,x,y,value,valid\n";
  for (int c = 0; c < d.num_cells(); ++c) {
    const int i = d.cell_i(c), j = d.cell_j(c);
    s += std::to_string(i) + "," + std::to_string(j) + "," + format_double(d.cell_x(i)) + "," +
         format_double(d.cell_y(j)) + "," + format_double(f.values[c]) + "," + (f.valid[c] ? "1" : "0") + "\n";
  }
  return s;
}

namespace {

struct CsvRow {
  int i, j;
  std::vector<double> v;  // x, y, then values
};

std::vector<CsvRow> read_rows(const fs::path& p, const std::string& header, std::size_t ncols) {
  std::ifstream f(p);
  if (!f) throw SchemaError("cannot open " + p.string());
  std::string line;
  if (!std::getline(f, line)) throw SchemaError(p.string() + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw SchemaError(p.string() + ": expected header '" + header + "'");
  std::vector<CsvRow> rows;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<std::string> toks;
    while (std::getline(ss, tok, ',')) toks.push_back(tok);
    if (toks.size() != ncols) throw SchemaError(p.string() + ":" + std::to_string(lineno) + ": wrong column count");
    CsvRow r{};
    try {
      std::size_t used = 0;
      r.i = std::stoi(toks[0], &used);
      r.j = std::stoi(toks[1], &used);
      for (std::size_t k = 2; k < ncols; ++k) {
        r.v.push_back(std::stod(toks[k], &used));
        if (used != toks[k].size()) throw std::invalid_argument("trailing characters");
      }
    } catch (const std::exception&) {
      throw SchemaError(p.string() + ":" + std::to_string(lineno) + ": bad number");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace

ScalarField read_scalar_csv(const fs::path& p, const std::optional<GridDomain>& dom, int quadrature_order) {
  const auto rows = read_rows(p, "i,j,x,y,value", 5);
  if (rows.empty()) throw SchemaError(p.string() + " has no rows");
  GridDomain d;
  if (dom) {
    d = *dom;
  } else {
    int nx = 0, ny = 0;
    for (const auto& r : rows) {
      nx = std::max(nx, r.i);
      ny = std::max(ny, r.j);
    }
    std::map<std::pair<int, int>, const CsvRow*> at;
    for (const auto& r : rows) at[{r.i, r.j}] = &r;
    auto corner = [&](int i, int j) {
      auto it = at.find({i, j});
      if (it == at.end()) throw SchemaError(p.string() + ": missing corner node");
      return it->second;
    };
    try {
      d = GridDomain::rectangle(corner(0, 0)->v[0], corner(nx, 0)->v[0], nx, corner(0, 0)->v[1],
                                corner(0, ny)->v[1], ny, quadrature_order);
    } catch (const std::invalid_argument& e) {
      throw SchemaError(p.string() + ": " + e.what());
    }
  }
  if (static_cast<int>(rows.size()) != d.num_nodes()) throw SchemaError(p.string() + ": node count does not match grid");
  std::vector<double> vals(d.num_nodes(), 0.0);
  std::vector<unsigned char> seen(d.num_nodes(), 0);
  for (const auto& r : rows) {
    if (r.i < 0 || r.j < 0 || r.i > d.nx() || r.j > d.ny()) throw SchemaError(p.string() + ": index out of range");
    if (!close(r.v[0], d.x(r.i)) || !close(r.v[1], d.y(r.j)))
      throw SchemaError(p.string() + ": coordinates do not match the grid");
    const int n = d.node(r.i, r.j);
    if (seen[n]) throw SchemaError(p.string() + ": duplicate node");
    seen[n] = 1;
    vals[n] = r.v[2];
  }
  try {
    return ScalarField(d, std::move(vals));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(p.string() + ": " + e.what());
  }
}

VectorField read_vector_csv(const fs::path& p, const GridDomain& d) {
  const auto rows = read_rows(p, "i,j,x,y,v1,v2", 6);
  if (static_cast<int>(rows.size()) != d.num_cells()) throw SchemaError(p.string() + ": cell count does not match grid");
  std::vector<double> vals(2 * d.num_cells(), 0.0);
  std::vector<unsigned char> seen(d.num_cells(), 0);
  for (const auto& r : rows) {
    if (r.i < 0 || r.j < 0 || r.i >= d.nx() || r.j >= d.ny()) throw SchemaError(p.string() + ": index out of range");
    if (!close(r.v[0], d.cell_x(r.i)) || !close(r.v[1], d.cell_y(r.j)))
      throw SchemaError(p.string() + ": coordinates do not match cell centres");
    const int c = d.cell(r.i, r.j);
    if (seen[c]) throw SchemaError(p.string() + ": duplicate cell");
    seen[c] = 1;
    vals[2 * c] = r.v[2];
    vals[2 * c + 1] = r.v[3];
  }
  try {
    return VectorField(d, 2, std::move(vals));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(p.string() + ": " + e.what());
  }
}

GridDomain parse_domain(const Json& j) {
  require_keys(j, {"x", "y", "n", "nx", "ny", "quadrature_order"}, "domain");
  auto interval = [&](const char* key) {
    if (!j.contains(key)) return std::array<double, 2>{-1.0, 1.0};
    const auto v = number_array(j[key], std::string("domain.") + key);
    if (v.size() != 2) throw SchemaError(std::string("domain.") + key + " must be [lo, hi]");
    return std::array<double, 2>{v[0], v[1]};
  };
  const auto x = interval("x"), y = interval("y");
  int n = j.contains("n") ? integer(j["n"], "domain.n") : 32;
  const int nx = j.contains("nx") ? integer(j["nx"], "domain.nx") : n;
  const int ny = j.contains("ny") ? integer(j["ny"], "domain.ny") : n;
  const int q = j.contains("quadrature_order") ? integer(j["quadrature_order"], "domain.quadrature_order") : 4;
  try {
    return GridDomain::rectangle(x[0], x[1], nx, y[0], y[1], ny, q);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("domain: ") + e.what());
  }
}

Json domain_json(const GridDomain& d) {
  Json j;
  j["x"] = {d.axes()[0].lo, d.axes()[0].hi};
  j["y"] = {d.axes()[1].lo, d.axes()[1].hi};
  j["nx"] = d.nx();
  j["ny"] = d.ny();
  j["quadrature_order"] = d.quadrature_order();
  return j;
}

EnergySpec parse_spec(const Json& j, const GridDomain& dom, const fs::path& base) {
  require_keys(j, {"preset", "F_csv", "H", "H_expression"}, "spec");
  const std::string preset = j.contains("preset") ? string(j["preset"], "spec.preset") : "p_area";
  EnergySpec s;
  if (preset == "p_area" || preset == "minus_X_star") {
    s = EnergySpec::p_area();
  } else if (preset == "least_gradient" || preset == "zero") {
    s = EnergySpec::least_gradient();
  } else if (preset == "custom") {
    if (!j.contains("F_csv")) throw SchemaError("custom preset needs F_csv");
    s = EnergySpec::custom(read_vector_csv(resolve(base, string(j["F_csv"], "spec.F_csv")), dom));
  } else {
    throw SchemaError("unknown preset '" + preset + "'");
  }
  if (j.contains("F_csv") && preset != "custom") throw SchemaError("F_csv is only valid with preset custom");
  if (j.contains("H") && j.contains("H_expression")) throw SchemaError("give H or H_expression, not both");
  if (j.contains("H")) {
    const double h = number(j["H"], "spec.H");
    if (h != 0.0) s = s.with_H(std::vector<double>(dom.num_cells(), h));
  } else if (j.contains("H_expression")) {
    try {
      const Expression e(string(j["H_expression"], "spec.H_expression"));
      std::vector<double> h(dom.num_cells());
      for (int c = 0; c < dom.num_cells(); ++c) h[c] = e(dom.cell_x(dom.cell_i(c)), dom.cell_y(dom.cell_j(c)));
      s = s.with_H(std::move(h));
    } catch (const std::invalid_argument& e) {
      throw SchemaError(e.what());
    }
  }
  try {
    s.check(dom);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("spec: ") + e.what());
  }
  return s;
}

SolverConfig parse_solver(const Json& j) {
  require_keys(j,
               {"a_schedule", "newton_tol", "max_newton_iters", "backtrack", "max_halvings", "continuation_stop",
                "linear_solver", "cg_tol", "cg_max_iters", "initial_guess"},
               "solver");
  SolverConfig c;
  if (j.contains("a_schedule")) c.a_schedule = number_array(j["a_schedule"], "solver.a_schedule");
  if (j.contains("newton_tol")) c.newton_tol = number(j["newton_tol"], "solver.newton_tol");
  if (j.contains("max_newton_iters")) c.max_newton_iters = integer(j["max_newton_iters"], "solver.max_newton_iters");
  if (j.contains("backtrack")) c.backtrack = number(j["backtrack"], "solver.backtrack");
  if (j.contains("max_halvings")) c.max_halvings = integer(j["max_halvings"], "solver.max_halvings");
  if (j.contains("continuation_stop")) c.continuation_stop = number(j["continuation_stop"], "solver.continuation_stop");
  if (j.contains("cg_tol")) c.cg_tol = number(j["cg_tol"], "solver.cg_tol");
  if (j.contains("cg_max_iters")) c.cg_max_iters = integer(j["cg_max_iters"], "solver.cg_max_iters");
  if (j.contains("linear_solver")) {
    const auto s = string(j["linear_solver"], "solver.linear_solver");
    if (s == "cg") c.linear_solver = LinearSolverKind::cg;
    else if (s == "cholesky") c.linear_solver = LinearSolverKind::cholesky;
    else throw SchemaError("solver.linear_solver must be cg or cholesky");
  }
  if (j.contains("initial_guess")) {
    const auto s = string(j["initial_guess"], "solver.initial_guess");
    if (s == "coons") c.initial_guess = InitialGuess::coons;
    else if (s == "zero_interior") c.initial_guess = InitialGuess::zero_interior;
    else if (s == "from_phi") c.initial_guess = InitialGuess::from_phi;
    else throw SchemaError("solver.initial_guess must be coons, zero_interior or from_phi");
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("solver: ") + e.what());
  }
  return c;
}

Json solver_config_json(const SolverConfig& c) {
  Json j;
  j["a_schedule"] = c.a_schedule;
  j["newton_tol"] = c.newton_tol;
  j["max_newton_iters"] = c.max_newton_iters;
  j["backtrack"] = c.backtrack;
  j["max_halvings"] = c.max_halvings;
  j["continuation_stop"] = c.continuation_stop;
  j["linear_solver"] = c.linear_solver == LinearSolverKind::cg ? "cg" : "cholesky";
  j["cg_tol"] = c.cg_tol;
  j["cg_max_iters"] = c.cg_max_iters;
  j["initial_guess"] = c.initial_guess == InitialGuess::coons           ? "coons"
                       : c.initial_guess == InitialGuess::zero_interior ? "zero_interior"
                                                                        : "from_phi";
  return j;
}

ScalarField parse_field(const Json& j, const GridDomain& dom, const fs::path& base) {
  require_keys(j, {"expression", "csv"}, "field");
  if (j.contains("expression") == j.contains("csv")) throw SchemaError("field needs exactly one of expression, csv");
  if (j.contains("csv")) return read_scalar_csv(resolve(base, string(j["csv"], "field.csv")), dom);
  try {
    const Expression e(string(j["expression"], "field.expression"));
    const ScalarField f = ScalarField::sample(dom, [&](double x, double y) { return e(x, y); });
    return f;
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
}

}  // namespace parea
