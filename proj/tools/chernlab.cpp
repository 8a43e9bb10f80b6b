// chernlab command-line driver.
//
//   chernlab check        run the verification suite, emit JSONL or CSV
//   chernlab scalar       scal^Ch at sampled points
//   chernlab linearize    gamma, gamma^*, second variation at a point
//   chernlab adjointness  L^2 adjointness of gamma and gamma^*
//   chernlab witness      the CP^1 x CP^1 obstruction integral
//   chernlab report       re-render saved JSONL
//
// Exit status: 0 all executed checks pass, 1 a check failed, 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chernlab/chernlab.hpp"

using namespace chernlab;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// Resolves a manifold name up front so bad names are usage errors.
ManifoldSpec manifold_or_usage(const std::string& name) {
  try {
    return make_manifold(name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void print_summary(const std::vector<CheckReport>& rs) {
  int failed = 0;
  for (const auto& r : rs)
    if (!r.pass) {
      ++failed;
      std::cout << "FAIL " << r.check << " on " << r.manifold << ": max_rel_err " << fmt("%.3e", r.max_rel_err)
                << ", max_abs_err " << fmt("%.3e", r.max_abs_err) << ", tol " << fmt("%.1e", r.tol)
                << (r.note.empty() ? "" : " (" + r.note + ")") << "\n";
    }
  std::cout << rs.size() << " reports, " << rs.size() - failed << " passed, " << failed << " failed\n";
}

// ---------------------------------------------------------------------------

struct CheckOpts {
  std::vector<std::string> manifolds{"all"};
  std::vector<std::string> checks;
  std::uint64_t seed = 42;
  std::vector<double> dts{1e-2, 1e-3};
  int samples = 20;
  int grid = 64;
  int grid4 = 16;
  int gl = 32;
  std::vector<std::string> tols;
  std::string out;
  std::string format = "jsonl";
  bool list = false;
};

int run_check_cmd(const CheckOpts& o) {
  if (o.list) {
    for (const auto& c : check_registry()) std::cout << c.name << "  " << c.description << "\n";
    return kOk;
  }
  SuiteConfig cfg;
  cfg.manifolds = split_list(o.manifolds);
  cfg.checks = split_list(o.checks);
  cfg.seed = o.seed;
  cfg.dts = o.dts;
  cfg.samples = o.samples;
  cfg.torus_grid = o.grid;
  cfg.torus4_grid = o.grid4;
  cfg.sphere_grid = o.gl;
  for (const auto& t : split_list(o.tols)) {
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw UsageError("tolerance override must be check=value, got '" + t + "'");
    try {
      cfg.tolerances[t.substr(0, eq)] = std::stod(t.substr(eq + 1));
    } catch (const std::logic_error&) {
      throw UsageError("bad tolerance value in '" + t + "'");
    }
  }
  for (const auto& m : cfg.manifolds)
    if (m != "all") manifold_or_usage(m);

  std::vector<CheckReport> rs;
  try {
    rs = run_suite(cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file) throw UsageError("cannot open " + o.out);
  }
  std::ostream& os = o.out.empty() ? std::cout : file;
  if (o.format == "csv")
    write_csv(os, rs);
  else
    for (const auto& r : rs) os << to_jsonl(r) << "\n";
  if (!o.out.empty()) print_summary(rs);
  return all_pass(rs) ? kOk : kFail;
}

// ---------------------------------------------------------------------------

int run_scalar_cmd(const std::string& manifold, int points, std::uint64_t seed) {
  const auto s = manifold_or_usage(manifold);
  CounterRng rng(seed, detail::fnv1a("scalar/" + manifold));
  double worst = 0;
  for (int k = 0; k < points; ++k) {
    const Point p = s.sample(rng);
    const double v = chern_scalar(s.metric_jet(p));
    std::cout << "point";
    for (int a = 0; a < p.n; ++a) std::cout << " " << fmt("%.6f", p[a]);
    std::cout << "  scal " << fmt("%.15f", v) << "\n";
    if (s.scal) worst = std::max(worst, std::abs(v - *s.scal));
  }
  if (s.scal) {
    const bool ok = worst <= 1e-10;
    std::cerr << points << " points, max |scal - " << *s.scal << "| = " << fmt("%.3e", worst) << (ok ? " PASS" : " FAIL")
              << "\n";
    return ok ? kOk : kFail;
  }
  std::cerr << points << " points (no closed-form value for " << manifold << ")\n";
  return kOk;
}

// ---------------------------------------------------------------------------

ScalarFieldPtr u_preset(const ManifoldSpec& s, const std::string& name) {
  if (name == "one") return make_scalar_field([](const auto& x) { return detail::constant_like(x, 1.0); });
  if (name == "cos_x") return make_scalar_field([](const auto& x) { return cos(x[0]); });
  if (name == "height") {
    if (s.chart.kind != ChartKind::Stereographic) throw UsageError("u preset 'height' needs a sphere chart");
    return height_function();
  }
  throw UsageError("unknown u preset '" + name + "' (valid: one, cos_x, height)");
}

int run_linearize_cmd(const std::string& manifold, const std::string& preset, const std::string& upreset,
                      std::uint64_t seed) {
  const auto s = manifold_or_usage(manifold);
  MatrixFieldPtr h;
  try {
    h = named_perturbation(s, preset);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const std::string uname = upreset.empty() ? (s.chart.kind == ChartKind::Stereographic ? "height" : "cos_x") : upreset;
  const auto u = u_preset(s, uname);
  CounterRng rng(seed, detail::fnv1a("linearize/" + manifold));
  const Point p = s.sample(rng);

  const MetricGeometry geo(s.metric_jet(p));
  const PerturbationJet eta = h->eval2(p);
  const ScalarJet uj = u->eval2(p);
  const auto gs = gamma_star(geo, uj);
  const auto sv = second_var_both(geo, eta, eta, s.is_kahler);

  std::cout << "manifold " << manifold << ", h = " << preset << ", u = " << uname << "\npoint";
  for (int a = 0; a < p.n; ++a) std::cout << " " << fmt("%.6f", p[a]);
  std::cout << "\nscal^Ch          " << fmt("%.15g", chern_scalar(geo.g)) << "\n";
  std::cout << "gamma(h)         " << fmt("%.15g", gamma(geo, eta)) << "\n";
  std::cout << "gamma*(u) endo   [";
  const CMat H = gs.endo();
  for (int i = 0; i < H.rows(); ++i)
    for (int j = 0; j < H.cols(); ++j)
      std::cout << (i || j ? ", " : "") << fmt("%.12g", H(i, j).real())
                << (H(i, j).imag() != 0 ? fmt("%+.12gi", H(i, j).imag()) : "");
  std::cout << "]\n|gamma*(u)|      " << fmt("%.3e", std::sqrt(std::max(0.0, inner(geo.G, gs, gs)))) << "\n";
  std::cout << "(scal)''(h, h)   " << fmt("%.15g", sv.general) << "\n";
  if (sv.kahler) std::cout << "Kahler form      " << fmt("%.15g", *sv.kahler) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

int run_adjointness_cmd(const std::string& manifold, int grid, int pairs, std::uint64_t seed, double tol) {
  const auto s = manifold_or_usage(manifold);
  if (!s.quadrature) throw UsageError(manifold + " has no quadrature rule");
  SuiteConfig cfg;
  const int n = grid > 0 ? grid : cfg.grid_for(s);
  if (n < 2 || (n & (n - 1)) != 0) throw UsageError("grid must be a power of two");
  auto r = adjointness_test(s, s.rule(n), seed, pairs > 0 ? pairs : default_adjointness_pairs(s));
  r.tol = tol > 0 ? tol : default_adjointness_tol(s);
  r.finalize();
  std::cout << to_jsonl(r) << "\n";
  std::cout << manifold << " grid " << n << ": max relative defect " << fmt("%.3e", r.max_rel_err) << " (tol "
            << fmt("%.0e", r.tol) << ") " << (r.pass ? "PASS" : "FAIL") << "\n";
  return r.pass ? kOk : kFail;
}

// ---------------------------------------------------------------------------

int run_witness_cmd(int gl, double shift) {
  if (gl < 2 || (gl & (gl - 1)) != 0) throw UsageError("grid must be a power of two");
  WitnessReport w;
  try {
    w = instability_witness(gl, shift);
  } catch (const KernelError& e) {
    std::cout << "refused: " << e.what() << "\nFAIL\n";
    return kFail;
  }
  const auto& o = w.obstruction;
  const double rel = std::abs(o.value - kWitnessValue) / kWitnessValue;
  std::cout << "CP^1 x CP^1, lambda = " << w.lambda << ", u = " << o.u_description << ", h = " << o.h_description
            << "\n";
  std::cout << "nodes " << o.nodes << " (Gauss-Legendre " << o.quadrature_order << " per sphere)\n";
  std::cout << "residuals: scal " << fmt("%.2e", w.scal_residual) << ", first-Chern-Einstein "
            << fmt("%.2e", w.fce_residual) << ", Delta u - 2u " << fmt("%.2e", w.eigen_residual) << ", gamma*(u) "
            << fmt("%.2e", o.gamma_star_residual) << ", gamma(h) " << fmt("%.2e", o.gamma_residual) << "\n";
  std::cout << "obstruction " << fmt("%.10f", o.value) << "  (128 pi^2 / 3 = " << fmt("%.10f", kWitnessValue)
            << ", relative error " << fmt("%.2e", rel) << ", half-grid difference " << fmt("%.2e", o.estimated_error)
            << ")\n";
  const bool ok = rel <= 1e-6;
  std::cout << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kOk : kFail;
}

// ---------------------------------------------------------------------------

int run_report_cmd(const std::string& in, const std::string& format, const std::string& out) {
  std::ifstream f(in);
  if (!f) throw UsageError("cannot open " + in);
  std::vector<CheckReport> rs;
  try {
    rs = parse_jsonl(f);
  } catch (const std::exception& e) {
    throw UsageError(in + ": " + e.what());
  }
  std::ofstream file;
  if (!out.empty()) {
    file.open(out);
    if (!file) throw UsageError("cannot open " + out);
  }
  std::ostream& os = out.empty() ? std::cout : file;
  if (format == "csv")
    write_csv(os, rs);
  else
    write_markdown(os, rs);
  const bool ok = all_pass(rs);
  std::cerr << rs.size() << " reports: " << (ok ? "all pass" : "failures present") << "\n";
  return ok ? kOk : kFail;
}

// Options given on the command line win; the file fills in the rest.
void apply_config(CLI::App& sub, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open config file " + path);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string x) {
    const auto a = x.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    return x.substr(a, x.find_last_not_of(" \t\r") - a + 1);
  };
  while (std::getline(f, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = path + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw UsageError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    CLI::Option* opt = key == "config" ? nullptr : sub.get_option_no_throw("--" + key);
    if (!opt) throw UsageError(where + ": unknown key '" + key + "' for " + sub.get_name());
    if (opt->count() > 0) continue;
    try {
      opt->add_result(value);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError(where + ": " + e.what());
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chern scalar curvature linearization toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CheckOpts co;
  auto* check = app.add_subcommand("check", "run the verification suite");
  check->add_option("--manifold,--manifolds", co.manifolds, "manifolds, comma separated, or 'all'")
      ->delimiter(',');
  check->add_option("--checks,--check", co.checks, "checks to run (default: all)")->delimiter(',');
  check->add_option("--seed", co.seed, "RNG seed");
  check->add_option("--dt", co.dts, "finite-difference steps, decreasing")->delimiter(',');
  check->add_option("--samples", co.samples, "random samples per check");
  check->add_option("--grid", co.grid, "torus nodes per direction, complex dimension 1");
  check->add_option("--grid4", co.grid4, "torus nodes per direction, complex dimension 2");
  check->add_option("--gl", co.gl, "Gauss-Legendre nodes per sphere factor");
  check->add_option("--tol", co.tols, "tolerance override check=value")->delimiter(',');
  check->add_option("--out", co.out, "output file (default stdout)");
  check->add_option("--format", co.format, "jsonl or csv")->check(CLI::IsMember({"jsonl", "csv"}));
  check->add_flag("--list", co.list, "list registered checks");

  std::string s_manifold;
  int s_points = 10;
  std::uint64_t s_seed = 42;
  auto* scalar = app.add_subcommand("scalar", "print scal^Ch at sampled points");
  scalar->add_option("--manifold", s_manifold);
  scalar->add_option("--points", s_points)->check(CLI::PositiveNumber);
  scalar->add_option("--seed", s_seed);

  std::string l_manifold, l_preset = "identity", l_u;
  std::uint64_t l_seed = 42;
  auto* lin = app.add_subcommand("linearize", "gamma, gamma^* and the second variation at a point");
  lin->add_option("--manifold", l_manifold);
  lin->add_option("--preset", l_preset, "zero, identity, cos_identity, traceless, witness");
  lin->add_option("--u", l_u, "one, cos_x, height");
  lin->add_option("--seed", l_seed);

  std::string a_manifold;
  int a_grid = 0, a_pairs = 0;
  double a_tol = 0;
  std::uint64_t a_seed = 42;
  auto* adj = app.add_subcommand("adjointness", "check <gamma h, u> = <h, gamma^* u>");
  adj->add_option("--manifold", a_manifold);
  adj->add_option("--grid", a_grid, "nodes per direction (Gauss-Legendre per sphere)");
  adj->add_option("--pairs", a_pairs, "random (u, h) pairs");
  adj->add_option("--tol", a_tol, "relative tolerance");
  adj->add_option("--seed", a_seed);

  int w_grid = 32;
  double w_shift = 0;
  auto* wit = app.add_subcommand("witness", "obstruction integral on CP^1 x CP^1");
  wit->add_option("--grid", w_grid, "Gauss-Legendre nodes per sphere");
  wit->add_option("--shift", w_shift, "add a constant to u (leaves the kernel unless 0)");

  std::string r_in, r_format = "markdown", r_out;
  auto* rep = app.add_subcommand("report", "re-render JSONL as CSV or markdown");
  rep->add_option("input", r_in, "JSONL file");
  rep->add_option("--format", r_format)->check(CLI::IsMember({"csv", "markdown"}));
  rep->add_option("--out", r_out);

  std::string config;
  for (auto* sub : {check, scalar, lin, adj, wit, rep})
    sub->add_option("--config", config, "key = value file, keys are option names without dashes");

  try {
    app.parse(argc, argv);
    CLI::App* active = app.get_subcommands().front();
    if (!config.empty()) apply_config(*active, config);
    for (const char* req : {"--manifold"})
      if (auto* o = active->get_option_no_throw(req); o && active != check && o->count() == 0)
        throw UsageError(std::string(req) + " is required");
    if (active == rep && r_in.empty()) throw UsageError("input file is required");
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*check) return run_check_cmd(co);
    if (*scalar) return run_scalar_cmd(s_manifold, s_points, s_seed);
    if (*lin) return run_linearize_cmd(l_manifold, l_preset, l_u, l_seed);
    if (*adj) return run_adjointness_cmd(a_manifold, a_grid, a_pairs, a_seed, a_tol);
    if (*wit) return run_witness_cmd(w_grid, w_shift);
    if (*rep) return run_report_cmd(r_in, r_format, r_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
