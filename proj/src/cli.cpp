#include "parea/cli.hpp"

#include <cmath>
#include <functional>
#include <ostream>

#include "parea/expression.hpp"
#include "parea/heisenberg.hpp"
#include "parea/io.hpp"
#include "parea/random.hpp"
#include "parea/solver.hpp"
#include "parea/variation.hpp"
#include "parea/verify.hpp"

namespace parea::cli {

namespace fs = std::filesystem;

namespace {

struct Context {
  Json cfg = Json::object();
  fs::path base = ".";
  fs::path out = "out";
  std::uint64_t seed = 0;
};

Context load(const Options& o, bool config_required, std::initializer_list<const char*> keys,
             const std::string& command) {
  Context ctx;
  if (o.config) {
    ctx.cfg = read_json_file(*o.config);
    ctx.base = o.config->has_parent_path() ? o.config->parent_path() : fs::path(".");
  } else if (config_required) {
    throw SchemaError(command + " needs --config");
  }
  require_keys(ctx.cfg, keys, command + " config");
  if (ctx.cfg.contains("seed")) {
    if (!ctx.cfg["seed"].is_number_unsigned()) throw SchemaError("seed must be a non-negative integer");
    ctx.seed = ctx.cfg["seed"].get<std::uint64_t>();
  }
  if (ctx.cfg.contains("out")) {
    if (!ctx.cfg["out"].is_string()) throw SchemaError("out must be a string");
    ctx.out = ctx.base / ctx.cfg["out"].get<std::string>();
  }
  if (o.seed) ctx.seed = *o.seed;
  if (o.out) ctx.out = *o.out;
  return ctx;
}

const Json& section(const Context& ctx, const char* key, const Json& fallback) {
  return ctx.cfg.contains(key) ? ctx.cfg[key] : fallback;
}

// Domain from the config, or inferred from a field CSV when only that is given.
GridDomain domain_for(const Context& ctx, const char* field_key) {
  if (ctx.cfg.contains("domain")) return parse_domain(ctx.cfg["domain"]);
  if (ctx.cfg.contains(field_key) && ctx.cfg[field_key].is_object() && ctx.cfg[field_key].contains("csv") &&
      ctx.cfg[field_key]["csv"].is_string())
    return read_scalar_csv(ctx.base / ctx.cfg[field_key]["csv"].get<std::string>()).domain();
  return parse_domain(Json::object());
}

Json singular_json(const SingularSet& s) {
  Json j;
  j["cells"] = s.cells.size();
  j["measure"] = s.measure;
  j["threshold"] = s.threshold;
  return j;
}

Json variation_json(const VariationReport& v) {
  Json j;
  j["F_value"] = v.F_value;
  j["Fprime_minus"] = v.Fprime_minus;
  j["Fprime_plus"] = v.Fprime_plus;
  j["Fsecond"] = v.Fsecond ? Json(*v.Fsecond) : Json("undefined-at-singular");
  j["epsilon"] = v.epsilon;
  j["is_regular"] = v.is_regular;
  return j;
}

double double_or(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw SchemaError(std::string(key) + " must be a number");
  return j[key].get<double>();
}

int guarded(const std::function<int()>& body, std::ostream& log) {
  try {
    return body();
  } catch (const SchemaError& e) {
    log << "error: " << e.what() << "\n";
    return usage_error;
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << "\n";
    return usage_error;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return usage_error;
  }
}

}  // namespace

int run_solve(const Options& o, std::ostream& log) {
  return guarded([&] {
    Context ctx = load(o, true, {"domain", "spec", "boundary", "solver", "a", "singular_tol", "seed", "out"}, "solve");
    if (!ctx.cfg.contains("boundary")) throw SchemaError("solve needs a boundary section");
    const GridDomain dom = domain_for(ctx, "boundary");
    const EnergySpec spec = parse_spec(section(ctx, "spec", Json::object()), dom, ctx.base);
    const ScalarField phi = parse_field(ctx.cfg["boundary"], dom, ctx.base);
    const SolverConfig scfg = parse_solver(section(ctx, "solver", Json::object()));
    const double tol = double_or(ctx.cfg, "singular_tol", 1.0);
    if (!(tol >= 0.0)) throw SchemaError("singular_tol must be >= 0");

    SolveResult r;
    if (ctx.cfg.contains("a")) {
      const double a = double_or(ctx.cfg, "a", 1.0);
      if (!(a > 0.0)) throw SchemaError("a must be positive");
      r = solve_regularized(dom, spec, a, phi, scfg);
    } else {
      r = continuation_minimize(dom, spec, phi, scfg);
    }
    const SingularSet sing = singular_set(r.u, spec, tol);
    const EnergyBoundReport eb = energy_bound_check(r, spec, phi);

    Json rep;
    rep["command"] = "solve";
    rep["seed"] = ctx.seed;
    rep["domain"] = domain_json(dom);
    rep["preset"] = spec.preset_name();
    rep["mode"] = ctx.cfg.contains("a") ? "single" : "continuation";
    rep["converged"] = r.converged;
    if (!r.message.empty()) rep["message"] = r.message;
    rep["residual"] = r.residual_norm;
    rep["a_final"] = r.a_final;
    rep["iterations"] = r.iterations;
    rep["energy"] = r.energy;
    rep["energy_FH"] = energy_FH(r.u, spec);
    rep["singular_set"] = singular_json(sing);
    rep["boundary_sup_error"] = [&] {
      double m = 0.0;
      for (int n = 0; n < dom.num_nodes(); ++n)
        if (dom.is_boundary(n)) m = std::max(m, std::abs(r.u[n] - phi[n]));
      return m;
    }();
    rep["energy_bound"] = Json{{"lhs", eb.lhs}, {"rhs", eb.rhs}, {"slack", eb.slack}, {"pass", eb.pass}};
    Json stages = Json::array();
    for (const StageRecord& s : r.stages)
      stages.push_back(Json{{"a", s.a},
                            {"iterations", s.iterations},
                            {"residual", s.residual},
                            {"regularized_energy", s.regularized_energy},
                            {"change", s.change},
                            {"converged", s.converged}});
    rep["stages"] = stages;
    rep["solver"] = solver_config_json(scfg);

    write_text(ctx.out / "u.csv", scalar_csv(r.u));
    write_text(ctx.out / "gradient.csv", vector_csv(gradient(r.u)));
    write_text(ctx.out / "solve_report.json", dump_json(rep));
    log << "solve: " << (r.converged ? "converged" : "NOT converged") << ", residual " << format_double(r.residual_norm)
        << ", a_final " << format_double(r.a_final) << ", energy " << format_double(r.energy) << "\n";
    return r.converged ? ok : not_converged;
  }, log);
}

namespace {

DirectionField parse_direction(const Json& j, const GridDomain& dom, const fs::path& base, std::uint64_t seed,
                               double& zeroed) {
  require_keys(j, {"expression", "csv", "random_modes"}, "direction");
  zeroed = 0.0;
  if (j.contains("random_modes")) {
    if (!j["random_modes"].is_number_integer() || j["random_modes"].get<int>() < 1)
      throw SchemaError("direction.random_modes must be a positive integer");
    Rng rng(seed);
    return random_direction(dom, rng, j["random_modes"].get<int>());
  }
  ScalarField phi = parse_field(j, dom, base);
  if (j.contains("expression")) {
    // sampling leaves rounding noise on the boundary; accept only that
    const double scale = std::max(1.0, phi.sup());
    for (int n = 0; n < dom.num_nodes(); ++n)
      if (dom.is_boundary(n)) {
        zeroed = std::max(zeroed, std::abs(phi[n]));
        phi[n] = 0.0;
      }
    if (zeroed > 1e-12 * scale) throw SchemaError("direction does not vanish on the boundary");
  }
  try {
    return DirectionField(std::move(phi));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
}

}  // namespace

int run_vary(const Options& o, std::ostream& log) {
  return guarded([&] {
    Context ctx = load(o, true,
                       {"domain", "spec", "field", "direction", "mode", "tol", "h_list", "integrand_csv",
                        "check_optimality", "seed", "out"},
                       "vary");
    if (!ctx.cfg.contains("field")) throw SchemaError("vary needs a field section");
    const GridDomain dom = domain_for(ctx, "field");
    const EnergySpec spec = parse_spec(section(ctx, "spec", Json::object()), dom, ctx.base);
    const ScalarField u = parse_field(ctx.cfg["field"], dom, ctx.base);
    double zeroed = 0.0;
    const DirectionField dir =
        parse_direction(section(ctx, "direction", Json{{"random_modes", 3}}), dom, ctx.base, ctx.seed, zeroed);
    GraphMode mode = GraphMode::horizontal;
    if (ctx.cfg.contains("mode")) {
      const Json& m = ctx.cfg["mode"];
      if (m == "horizontal") mode = GraphMode::horizontal;
      else if (m == "riemannian") mode = GraphMode::riemannian;
      else throw SchemaError("mode must be horizontal or riemannian");
    }
    const double tol = double_or(ctx.cfg, "tol", 1.0);
    if (!(tol >= 0.0)) throw SchemaError("tol must be >= 0");
    std::vector<double> h_list{1e-2, 1e-3, 1e-4};
    if (ctx.cfg.contains("h_list")) {
      h_list.clear();
      if (!ctx.cfg["h_list"].is_array()) throw SchemaError("h_list must be an array");
      for (const auto& h : ctx.cfg["h_list"]) {
        if (!h.is_number() || !(h.get<double>() > 0.0)) throw SchemaError("h_list entries must be positive numbers");
        h_list.push_back(h.get<double>());
      }
    }
    const bool check = ctx.cfg.value("check_optimality", false);

    const VariationReport v = minimizer_first_variation(u, spec, dir, tol, mode);
    const double f2 = second_variation_graph(u, spec, dir, mode, tol);
    const FdReport fd = fd_validate(u, spec, dir, h_list, mode, 0.0);
    const double otol = optimality_tol(v);
    const bool optimal = v.Fprime_minus <= otol && v.Fprime_plus >= -otol;

    Json rep;
    rep["command"] = "vary";
    rep["seed"] = ctx.seed;
    rep["domain"] = domain_json(dom);
    rep["preset"] = spec.preset_name();
    rep["mode"] = mode == GraphMode::horizontal ? "horizontal" : "riemannian";
    rep["singular_tol"] = tol;
    rep["variation"] = variation_json(v);
    rep["second_variation"] = f2;
    rep["optimality"] = Json{{"tol", otol}, {"pass", optimal}};
    if (mode == GraphMode::horizontal) rep["singular_set"] = singular_json(singular_set(u, spec, tol));
    Json rows = Json::array();
    for (const FdRow& r : fd.rows)
      rows.push_back(Json{{"h", r.h},
                          {"q_plus", r.q_plus},
                          {"q_minus", r.q_minus},
                          {"q_second", r.q_second},
                          {"err_plus", r.err_plus},
                          {"err_minus", r.err_minus},
                          {"err_second", r.err_second}});
    rep["finite_differences"] = Json{{"singular_tol", 0.0},
                                     {"F_prime_plus", fd.analytic.Fprime_plus},
                                     {"F_prime_minus", fd.analytic.Fprime_minus},
                                     {"F_second", *fd.analytic.Fsecond},
                                     {"rows", rows},
                                     {"order_plus", fd.order_plus},
                                     {"order_minus", fd.order_minus},
                                     {"order_second", fd.order_second}};
    write_text(ctx.out / "vary_report.json", dump_json(rep));

    if (ctx.cfg.value("integrand_csv", false)) {
      // per-cell first-variation density: N . grad phi off S, |grad phi| on S
      const SingularSet sing = singular_set(u, spec, tol);
      const auto w = horizontal_samples(u, spec);
      CellField cf{dom, std::vector<double>(dom.num_cells(), 0.0), std::vector<unsigned char>(dom.num_cells(), 1)};
      for (int s = 0; s < dom.num_samples(); ++s) {
        const int c = dom.cell_of_sample(s);
        const auto g = dir.phi().sample_gradient(s);
        const double r = std::hypot(w[2 * s], w[2 * s + 1]);
        double val;
        if (sing.mask[c] || r == 0.0) {
          cf.valid[c] = 0;
          val = std::hypot(g[0], g[1]);
        } else {
          val = (w[2 * s] * g[0] + w[2 * s + 1] * g[1]) / r;
        }
        cf.values[c] += val * dom.sample_weight(s) / dom.cell_area();
      }
      write_text(ctx.out / "integrand.csv", cell_csv(cf));
    }
    log << "vary: F'(0-) = " << format_double(v.Fprime_minus) << ", F'(0+) = " << format_double(v.Fprime_plus)
        << ", F'' = " << format_double(f2) << "\n";
    return check && !optimal ? verification_failed : ok;
  }, log);
}

int run_verify(const Options& o, std::ostream& log) {
  return guarded([&] {
    Context ctx = load(o, false, {"seed", "thresholds", "out"}, "verify");
    std::map<std::string, double> overrides;
    if (ctx.cfg.contains("thresholds")) {
      const Json& t = ctx.cfg["thresholds"];
      if (!t.is_object()) throw SchemaError("thresholds must be an object");
      for (auto it = t.begin(); it != t.end(); ++it) {
        if (!it.value().is_number()) throw SchemaError("threshold '" + it.key() + "' must be a number");
        overrides[it.key()] = it.value().get<double>();
      }
    }
    const VerifyReport rep = run_invariant_suite(ctx.seed, overrides);
    write_text(ctx.out / "verify_report.json", dump_json(rep.to_json()));
    for (const auto& c : rep.checks)
      log << (c.pass ? "PASS " : "FAIL ") << c.name << "  measured " << format_double(c.measured) << " "
          << c.relation << " " << format_double(c.threshold) << "\n";
    return rep.all_pass() ? ok : verification_failed;
  }, log);
}

int run_area(const Options& o, std::ostream& log) {
  return guarded([&] {
    Context ctx = load(o, true, {"domain", "kind", "field", "seed", "out"}, "area");
    if (!ctx.cfg.contains("field")) throw SchemaError("area needs a field section");
    const GridDomain dom = domain_for(ctx, "field");
    const std::string kind_s = ctx.cfg.value("kind", std::string("heisenberg"));
    GraphKind kind;
    try {
      kind = parse_graph_kind(kind_s);
    } catch (const std::invalid_argument& e) {
      throw SchemaError(e.what());
    }
    const ScalarField u = parse_field(ctx.cfg["field"], dom, ctx.base);
    const CellField d = area_density_field(u, kind);
    std::vector<double> terms(dom.num_cells());
    for (int c = 0; c < dom.num_cells(); ++c) terms[c] = d.values[c] * dom.cell_area();
    Json rep;
    rep["command"] = "area";
    rep["seed"] = ctx.seed;
    rep["domain"] = domain_json(dom);
    rep["kind"] = graph_kind_name(kind);
    rep["min"] = *std::min_element(d.values.begin(), d.values.end());
    rep["max"] = *std::max_element(d.values.begin(), d.values.end());
    rep["integral"] = pairwise_sum(terms);
    write_text(ctx.out / "density.csv", cell_csv(d));
    write_text(ctx.out / "area_report.json", dump_json(rep));
    log << "area: " << graph_kind_name(kind) << " integral " << format_double(pairwise_sum(terms)) << "\n";
    return ok;
  }, log);
}

int run_curvature(const Options& o, std::ostream& log) {
  return guarded([&] {
    Context ctx = load(o, true, {"domain", "kind", "field", "spec", "tol", "seed", "out"}, "curvature");
    if (!ctx.cfg.contains("field")) throw SchemaError("curvature needs a field section");
    const GridDomain dom = domain_for(ctx, "field");
    const ScalarField u = parse_field(ctx.cfg["field"], dom, ctx.base);
    const std::string kind = ctx.cfg.value("kind", std::string("h22"));
    CellField H;
    if (kind == "h22") {
      H = mean_curvature_h22_euclidean(u);
    } else if (kind == "divergence") {
      H = mean_curvature_divergence(u);
    } else if (kind == "p_mean") {
      const EnergySpec spec = parse_spec(section(ctx, "spec", Json::object()), dom, ctx.base);
      H = p_mean_curvature(u, spec, double_or(ctx.cfg, "tol", 1.0));
    } else {
      throw SchemaError("curvature kind must be h22, divergence or p_mean");
    }
    int valid = 0;
    for (auto v : H.valid) valid += v;
    Json rep;
    rep["command"] = "curvature";
    rep["seed"] = ctx.seed;
    rep["domain"] = domain_json(dom);
    rep["kind"] = kind;
    rep["valid_cells"] = valid;
    rep["sup"] = H.sup_valid();
    write_text(ctx.out / "curvature.csv", cell_csv(H));
    write_text(ctx.out / "curvature_report.json", dump_json(rep));
    log << "curvature: " << kind << " sup " << format_double(H.sup_valid()) << " over " << valid << " cells\n";
    return ok;
  }, log);
}

int run_decompose(const Options& o, std::ostream& log) {
  return guarded([&] {
    Context ctx = load(o, true, {"mu", "nu", "eps", "seed", "out"}, "decompose");
    auto measure = [&](const char* key) {
      if (!ctx.cfg.contains(key)) throw SchemaError(std::string("decompose needs ") + key);
      const Json& j = ctx.cfg[key];
      if (j.is_string()) return measure_from_json(read_json_file(ctx.base / j.get<std::string>()));
      return measure_from_json(j);
    };
    const VectorMeasure mu = measure("mu"), nu = measure("nu");
    const double eps = double_or(ctx.cfg, "eps", 0.0);
    try {
      require_compatible(mu, nu);
    } catch (const std::invalid_argument& e) {
      throw SchemaError(e.what());
    }
    const VectorMeasure mu_eps = combine(mu, eps, nu);
    const RNDecomposition rn = decompose(nu, mu_eps);
    auto site_json = [](const SiteDecomposition& s) {
      return Json{{"support", s.support}, {"tv", s.tv}, {"N", s.N}, {"A", s.A}};
    };
    Json cells = Json::array();
    for (const auto& s : rn.cells) cells.push_back(site_json(s));
    Json atoms = Json::array();
    for (const auto& [site, s] : rn.atoms) {
      Json a = site_json(s);
      a["site"] = site;
      atoms.push_back(a);
    }
    Json rep;
    rep["command"] = "decompose";
    rep["seed"] = ctx.seed;
    rep["eps"] = eps;
    rep["total_variation_mu_eps"] = total_variation(mu_eps);
    rep["variation"] = variation_json(variation_report(mu, nu, eps));
    rep["singular_epsilons"] = singular_epsilons(mu, nu);
    rep["decomposition"] = Json{{"d", rn.d}, {"cells", cells}, {"atoms", atoms}, {"nu_s", measure_to_json(rn.nu_s)}};
    write_text(ctx.out / "decompose_report.json", dump_json(rep));
    log << "decompose: F(eps) = " << format_double(total_variation(mu_eps)) << "\n";
    return ok;
  }, log);
}

int run(const std::string& command, const Options& o, std::ostream& log) {
  if (command == "solve") return run_solve(o, log);
  if (command == "vary") return run_vary(o, log);
  if (command == "verify") return run_verify(o, log);
  if (command == "area") return run_area(o, log);
  if (command == "curvature") return run_curvature(o, log);
  if (command == "decompose") return run_decompose(o, log);
  log << "unknown command '" << command << "'\n";
  return usage_error;
}

}  // namespace parea::cli
