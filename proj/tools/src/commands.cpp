#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <srlab/config.hpp>
#include <srlab/operators.hpp>
#include <srlab/parallel.hpp>
#include <srlab/spectrum.hpp>
#include <unistd.h>

namespace srlab::cli {

using json = nlohmann::ordered_json;

namespace {

struct Options {
  std::string config;
  std::uint64_t seed = kDefaultSeed;
  int samples = 0;
  std::optional<double> tol;
  std::string out;
  std::string format;
  std::vector<int> grid;
  std::vector<double> eps;
  bool sublaplacian = false;
  int count = 6;
  std::string solver = "auto";
  bool reference = false;
};

// Exceptions that mean "the input is wrong" rather than "a check failed".
[[noreturn]] void input_error(const std::string& message) { throw ConfigError(message, 0); }

std::string fmt(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string join(const std::vector<double>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : "") + fmt(v[i]);
  return s;
}

std::string join(const std::vector<int>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : "") + std::to_string(v[i]);
  return s;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(); }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

bool want_csv(const Options& o, bool csv_default) {
  if (o.format.empty()) return csv_default;
  return o.format == "csv";
}

struct Result {
  std::string text;
  int code = kExitOk;
};

// ---------------------------------------------------------------------------
// check

Result cmd_check(const Options& o) {
  auto cfg = load_config(o.config);
  auto s = cfg.structure();
  auto pts = o.samples > 0 ? lattice(cfg.periods, o.samples) : cfg.sample_points(3);
  Rng rng(o.seed);

  BracketFlag flag(s, s.dim);
  std::vector<BracketFlag::Result> flags(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { flags[i] = flag.at(pts[i]); });

  // Fatness draws random covectors, so it stays sequential.
  std::vector<FatnessReport> fat;
  for (const auto& p : pts) fat.push_back(is_fat(s, p, 32, rng));

  std::map<std::vector<int>, int> signatures;
  for (const auto& f : flags) ++signatures[f.dims];
  auto generic = std::max_element(signatures.begin(), signatures.end(),
                                   [](const auto& a, const auto& b) { return a.second < b.second; })
                     ->first;

  bool generating = true, all_fat = true;
  std::vector<int> degrees, qs;
  json points = json::array();
  json witness;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& f = flags[i];
    json r;
    r["point"] = pts[i];
    r["flag_dims"] = f.dims;
    r["degree"] = f.degree ? json(*f.degree) : json();
    std::optional<int> q;
    if (f.degree) q = hausdorff_dimension(f.dims, s.dim);
    r["Q"] = q ? json(*q) : json();
    r["regular"] = f.dims == generic;
    r["fat"] = fat[i].fat;
    if (fat[i].witness) r["witness"] = *fat[i].witness;
    points.push_back(std::move(r));

    generating = generating && f.degree.has_value();
    all_fat = all_fat && fat[i].fat;
    if (f.degree) degrees.push_back(*f.degree);
    if (q) qs.push_back(*q);
    if (fat[i].witness && witness.is_null()) witness = json{{"point", pts[i]}, {"covector", *fat[i].witness}};
  }
  auto common = [](std::vector<int> v, std::size_t total) -> json {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v.size() == 1 && total > 0 ? json(v[0]) : json();
  };
  auto distinct = [](std::vector<int> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };

  Result res;
  res.code = generating ? kExitOk : kExitTolerance;
  if (want_csv(o, false)) {
    res.text = "point,flag_dims,degree,Q,regular,fat\n";
    for (const auto& r : points) {
      res.text += join(r["point"].get<std::vector<double>>(), ' ') + "," +
                  join(r["flag_dims"].get<std::vector<int>>(), ' ') + "," +
                  (r["degree"].is_null() ? "" : std::to_string(r["degree"].get<int>())) + "," +
                  (r["Q"].is_null() ? "" : std::to_string(r["Q"].get<int>())) + "," +
                  (r["regular"].get<bool>() ? "true" : "false") + "," + (r["fat"].get<bool>() ? "true" : "false") +
                  "\n";
    }
    return res;
  }
  json j;
  j["name"] = cfg.name;
  j["dim"] = s.dim;
  j["rank"] = s.rank();
  j["samples"] = pts.size();
  j["bracket_generating"] = generating;
  j["regular"] = signatures.size() == 1;
  j["fat"] = all_fat;
  j["degree"] = generating ? common(degrees, degrees.size()) : json();
  j["Q"] = generating ? common(qs, qs.size()) : json();
  j["degrees"] = distinct(degrees);
  j["Q_values"] = distinct(qs);
  j["flag_dims"] = generic;
  j["witness"] = witness;
  j["points"] = std::move(points);
  res.text = dump(j);
  return res;
}

// ---------------------------------------------------------------------------
// canonicalize

Result cmd_canonicalize(const Options& o) {
  auto cfg = load_config(o.config);
  auto s = cfg.structure();
  auto pts = o.samples > 0 ? lattice(cfg.periods, o.samples) : cfg.sample_points(5);
  Rng rng(o.seed);
  double tol = o.tol.value_or(1e-10);

  auto ac = canonical_complement(s, pts, rng);
  double flat = verify_flat_complement(ac, pts);
  bool symbolic = ac.mode == ComplementMode::Symbolic;

  Result res;
  res.code = flat < tol ? kExitOk : kExitTolerance;

  std::vector<std::vector<std::string>> adapted;
  if (symbolic)
    for (const auto& T : ac.adapted_fields) adapted.push_back(T.to_strings());
  if (!o.out.empty()) {
    if (!symbolic) {
      res.code = kExitTolerance;
      ac.warnings.push_back("complement depends on the point; no adapted config written");
    } else {
      StructureConfig out = cfg;
      out.complement = adapted;
      write_atomic(o.out, out.to_yaml());
    }
  }

  std::vector<std::string> modes;
  for (auto m : ac.solvability) modes.push_back(to_string(m));
  if (want_csv(o, false)) {
    res.text = "beta,solvability,flat_residual,max_condition\n";
    for (std::size_t b = 0; b < modes.size(); ++b)
      res.text += std::to_string(b + 1) + "," + modes[b] + "," + fmt(flat) + "," + fmt(ac.max_condition) + "\n";
    return res;
  }
  json j;
  j["name"] = cfg.name;
  j["mode"] = symbolic ? "symbolic" : "pointwise";
  j["solvability"] = modes;
  j["least_squares"] = !ac.unique();
  j["samples"] = pts.size();
  j["solve_residual"] = number_or_null(ac.max_residual);
  j["flat_residual"] = number_or_null(flat);
  j["tolerance"] = tol;
  j["max_condition"] = number_or_null(ac.max_condition);
  if (symbolic) {
    json A = json::array();
    for (const auto& row : ac.A) {
      json r = json::array();
      for (const auto& e : row) r.push_back(e.to_string());
      A.push_back(std::move(r));
    }
    j["A"] = std::move(A);
    j["complement"] = adapted;
  }
  j["warnings"] = ac.warnings;
  j["pass"] = res.code == kExitOk;
  if (!o.out.empty() && symbolic) j["adapted_config"] = o.out;
  res.text = dump(j);
  return res;
}

// ---------------------------------------------------------------------------
// spectrum

Grid make_grid(const Options& o, const StructureConfig& cfg) {
  std::vector<int> n = o.grid.empty() ? std::vector<int>{8} : o.grid;
  if (n.size() == 1) n.assign(static_cast<std::size_t>(cfg.dim), n[0]);
  if (static_cast<int>(n.size()) != cfg.dim)
    input_error("--grid needs 1 or " + std::to_string(cfg.dim) + " sizes");
  return Grid(n, cfg.periods);
}

// The canonical complement when it is available in closed form.
MetricExtension choose_extension(const StructureConfig& cfg, const SubRiemannianStructure& s, bool reference,
                                 Rng& rng, std::string& note) {
  if (!reference) {
    auto ac = canonical_complement(s, lattice(cfg.periods, 5), rng);
    if (ac.mode == ComplementMode::Symbolic) {
      note = "canonical complement";
      return MetricExtension::canonical(ac);
    }
    note = "reference complement (canonical complement is not in closed form)";
  } else {
    note = "reference complement";
  }
  return MetricExtension::from_structure(s);
}

Result cmd_spectrum(const Options& o, std::ostream& err) {
  auto cfg = load_config(o.config);
  auto s = cfg.structure();
  Grid grid = make_grid(o, cfg);
  Rng rng(o.seed);
  std::string note;
  auto ext = choose_extension(cfg, s, o.reference, rng, note);
  err << "srlab spectrum: " << cfg.name << ", " << note << ", N = " << grid.size() << "\n";

  if (o.count < 1) input_error("--count must be positive");
  SweepOptions so;
  so.count = std::min<int>(o.count, static_cast<int>(grid.size()));
  if (cfg.density) so.density = cfg.density_expr();
  if (o.tol) so.lanczos.tol = *o.tol;
  if (o.solver == "dense") {
    so.solver = EigenSolver::Dense;
  } else if (o.solver == "lanczos") {
    so.solver = EigenSolver::Lanczos;
  } else {
    bool small = grid.size() <= 1024 || 3 * static_cast<std::size_t>(so.count) >= grid.size();
    so.solver = small ? EigenSolver::Dense : EigenSolver::Lanczos;
  }

  Result res;
  bool csv = want_csv(o, true);
  if (!o.eps.empty()) {
    auto table = epsilon_sweep(ext, grid, o.eps, so, rng);
    bool ok = table.limit.converged;
    for (const auto& r : table.reports) ok = ok && r.converged;
    res.code = ok ? kExitOk : kExitTolerance;
    res.text = csv ? table.to_csv() : table.to_json();
    return res;
  }
  auto wf = assemble_weak_laplacian<double>(ext, grid, {.eps = std::nullopt, .density = so.density});
  auto r = smallest_eigenpairs(wf, so, rng);
  r.grid = grid.resolution();
  res.code = r.converged ? kExitOk : kExitTolerance;
  res.text = csv ? r.to_csv() : r.to_json();
  return res;
}

// ---------------------------------------------------------------------------
// verify

struct SuiteRow {
  std::string suite;
  std::string variant;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::string note;
};

// Smooth test function with small integer coefficients. Draws are sequenced
// explicitly so the result does not depend on operand evaluation order.
Expr test_function(Rng& rng, int dim) {
  std::uniform_int_distribution<int> var(0, dim - 1), coef(-3, 3), pos(1, 3);
  std::vector<std::string> v;
  for (int i = 0; i < 8; ++i) v.push_back("x" + std::to_string(var(rng)));
  std::vector<std::string> c;
  for (int i = 0; i < 3; ++i) c.push_back(std::to_string(pos(rng)));
  std::string c1 = std::to_string(coef(rng));
  std::string c2 = std::to_string(coef(rng));
  std::string f = c[0] + "*sin(" + v[0] + " + " + c1 + "*" + v[1] + " + 1)";
  f += " + " + c[1] + "*cos(" + v[2] + " - " + v[3] + ")";
  f += " + " + c2 + "*" + v[4] + "*" + v[5] + " + " + v[6] + "^2/" + c[2];
  f += " + exp(sin(" + v[7] + "))";
  return parse(f, dim);
}

double rel(double residual, double scale) { return residual / std::max(1.0, std::abs(scale)); }

SuiteRow max_over(const std::string& suite, const std::string& variant, double tol,
                  const std::vector<double>& values) {
  SuiteRow r{suite, variant, 0.0, tol, true, ""};
  for (double v : values) r.value = std::max(r.value, std::isfinite(v) ? v : INFINITY);
  r.pass = r.value < tol;
  return r;
}

std::vector<SuiteRow> identity_suites(const StructureConfig& cfg, const SubRiemannianStructure& s, const Options& o,
                                      Rng& rng) {
  const double tol = o.tol.value_or(1e-9);
  const int count = o.samples > 0 ? o.samples : 30;
  auto points = random_points(cfg.periods, count, rng);
  std::vector<Expr> fs;
  for (int t = 0; t < count; ++t) fs.push_back(test_function(rng, s.dim));
  const auto ref = MetricExtension::from_structure(s);
  const auto sub = sublaplacian(ref);
  const auto h = mean_curvature(ref);
  const FrameAlgebra alg(ref.frame(), ref.rank());
  const int k = ref.rank(), m = s.dim;
  const auto n = static_cast<std::size_t>(count);

  std::vector<SuiteRow> rows;
  std::vector<double> conn(n), lemma(n), product(n), cartan(n), div(n);
  parallel_for(n, [&](std::size_t t) {
    const auto& p = points[t];
    const auto& f = fs[t];
    auto data = alg.at(p);
    auto g = connection_coefficients(data);
    double cmax = 1.0;
    for (double c : data.c) cmax = std::max(cmax, std::abs(c));
    double worst = 0.0;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        for (int a = 0; a < k; ++a) {
          worst = std::max(worst, std::abs(g(i, j, a) + g(i, a, j)));
          worst = std::max(worst, std::abs(g(i, j, a) - g(j, i, a) - data.horizontal(i, j, a)));
        }
    conn[t] = worst / cmax;

    double lhs = sub.apply_at(f, p);
    lemma[t] = rel(std::abs(lhs - horizontal_divergence(ref, horizontal_gradient_components(ref, f)).evaluate(p)), lhs);
    product[t] = rel(product_rule_residual(ref, sub, f, p), sub.apply_at(f * f, p));

    double cw = 0.0;
    for (int w = 0; w < m; ++w) {
      std::vector<Expr> omega;
      for (int j = 0; j < m; ++j) omega.push_back(alg.coframe(w, j));
      for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b) {
          double scale = alg.bracket(a, b).evaluate(p).cwiseAbs().maxCoeff();
          cw = std::max(cw, rel(cartan_residual(omega, alg.field(a), alg.field(b), p), scale));
        }
    }
    cartan[t] = cw;

    // X = sum_i phi^i X_i with phi^i shifted copies of f.
    VectorField X = VectorField::zero(m);
    double gxh = 0.0;
    for (int i = 0; i < k; ++i) {
      Expr phi = f + Expr(i);
      X = X + phi * ref.horizontal[static_cast<std::size_t>(i)];
      gxh += phi.evaluate(p) * h[static_cast<std::size_t>(i)].evaluate(p);
    }
    double a = horizontal_divergence(ref, X, p);
    div[t] = rel(std::abs(riemannian_divergence(ref, X, p) - (a - gxh)), a);
  });
  rows.push_back(max_over("connection-axioms", "reference", tol, conn));
  rows.push_back(max_over("laplacian-lemma", "reference", tol, lemma));
  rows.push_back(max_over("product-rule", "reference", tol, product));
  rows.push_back(max_over("cartan", "reference", tol, cartan));
  rows.push_back(max_over("divergence-lemma", "reference", tol, div));

  if (cfg.density) {
    rows.push_back(max_over("potential", "reference, config density", tol,
                            {potential_residual(ref, cfg.density_expr(), points)}));
  }
  auto ac = canonical_complement(s, lattice(cfg.periods, 5), rng);
  if (ac.mode == ComplementMode::Symbolic) {
    auto canon = MetricExtension::canonical(ac);
    rows.push_back(max_over("potential", "canonical, u = 1", tol, {potential_residual(canon, Expr(1), points)}));
  } else {
    rows.push_back({"potential", "canonical, u = 1", 0.0, tol, true, "skipped: complement not in closed form"});
  }
  return rows;
}

// The weak form with measure u vol_g realizes Delta^H + sum_i (X_i log u - h_i) X_i.
SuiteRow strong_weak_suite(const StructureConfig& cfg, const SubRiemannianStructure& s, const Options& o) {
  SuiteRow row{"strong-vs-weak", "reference", 0.0, 0.0, true, ""};
  auto ext = MetricExtension::from_structure(s);
  auto spec = sublaplacian(ext);
  Expr u = cfg.density_expr();
  auto h = mean_curvature(ext);
  for (int i = 0; i < ext.rank(); ++i) {
    const auto& Xi = ext.horizontal[static_cast<std::size_t>(i)];
    Expr drift = simplify(Xi.apply(u) / u - h[static_cast<std::size_t>(i)]);
    for (int j = 0; j < s.dim; ++j) {
      auto& bj = spec.b[static_cast<std::size_t>(j)];
      bj = simplify(bj + drift * Xi[j]);
    }
  }
  // sin(k0 x0) cos(kl xl) + cos(k1 x1 + kl xl), l the last axis.
  auto k = [&](std::size_t j) { return fmt(2 * std::numbers::pi / cfg.periods[j]); };
  const std::size_t last = cfg.periods.size() - 1;
  std::string xl = "x" + std::to_string(last);
  std::string f = "sin(" + k(0) + "*x0)*cos(" + k(last) + "*" + xl + ") + cos(" + k(1) + "*x1 + " + k(last) + "*" + xl + ")";
  Expr fe = parse(f, s.dim);
  int n0 = o.grid.empty() ? 8 : o.grid[0];
  std::vector<double> gap;
  try {
    for (int n : {n0, 2 * n0}) {
      Grid g = Grid::uniform(cfg.periods, n);
      std::optional<Expr> density;
      if (cfg.density) density = u;
      auto wf = assemble_weak_laplacian<double>(ext, g, {.eps = std::nullopt, .density = density});
      auto fv = sample(fe, g);
      auto Lf = wf.L.apply(fv);
      auto Sf = assemble_strong(spec, g).apply(fv);
      double d = 0.0;
      for (std::size_t i = 0; i < fv.size(); ++i) d = std::max(d, std::abs(-Lf[i] / wf.M.diag[i] - Sf[i]));
      gap.push_back(d);
    }
  } catch (const PeriodicityError& e) {
    row.note = std::string("skipped: ") + e.what();
    return row;
  }
  row.tolerance = 0.5;  // |ratio - 4|
  if (gap[0] < 1e-12 && gap[1] < 1e-12) {
    row.value = 4.0;
    row.note = "discretizations agree exactly";
  } else {
    row.value = gap[0] / gap[1];
    row.note = "n " + std::to_string(n0) + " -> " + std::to_string(2 * n0) + ", gaps " + fmt(gap[0]) + ", " + fmt(gap[1]);
  }
  row.pass = std::abs(row.value - 4.0) <= row.tolerance;
  return row;
}

Result cmd_verify(const Options& o) {
  auto cfg = load_config(o.config);
  auto s = cfg.structure();
  Rng rng(o.seed);
  auto rows = identity_suites(cfg, s, o, rng);
  rows.push_back(strong_weak_suite(cfg, s, o));

  bool pass = std::all_of(rows.begin(), rows.end(), [](const SuiteRow& r) { return r.pass; });
  Result res;
  res.code = pass ? kExitOk : kExitTolerance;
  if (want_csv(o, false)) {
    res.text = "suite,variant,value,tolerance,pass,note\n";
    for (const auto& r : rows)
      res.text += r.suite + ",\"" + r.variant + "\"," + fmt(r.value) + "," + fmt(r.tolerance) + "," +
                  (r.pass ? "true" : "false") + ",\"" + r.note + "\"\n";
    return res;
  }
  json j;
  j["name"] = cfg.name;
  j["seed"] = o.seed;
  j["suites"] = json::array();
  for (const auto& r : rows) {
    json e;
    e["suite"] = r.suite;
    e["variant"] = r.variant;
    e["value"] = number_or_null(r.value);
    e["tolerance"] = r.tolerance;
    e["pass"] = r.pass;
    if (!r.note.empty()) e["note"] = r.note;
    j["suites"].push_back(std::move(e));
  }
  j["pass"] = pass;
  res.text = dump(j);
  return res;
}

void add_common(CLI::App* cmd, Options& o, bool grid) {
  cmd->add_option("config", o.config, "Structure config (YAML)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Seed for every random draw")->capture_default_str();
  cmd->add_option("--samples", o.samples, "Lattice points per axis (check, canonicalize) or random points (verify)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol", o.tol, "Tolerance");
  cmd->add_option("--out", o.out, "Output path (written atomically)");
  cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  if (grid) cmd->add_option("-n,--grid", o.grid, "Grid points per axis: n or n0,n1,...")->delimiter(',');
}

}  // namespace

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move output to " + path + ": " + ec.message());
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"srlab: sub-Riemannian structures, their operators and spectra"};
  app.require_subcommand(1);
  Options o;
  auto* check = app.add_subcommand("check", "Bracket flag, regularity, fatness and Hausdorff dimension");
  auto* canon = app.add_subcommand("canonicalize", "Solve for the mean-curvature-free complement");
  auto* spectrum = app.add_subcommand("spectrum", "Smallest eigenvalues of the weak sublaplacian or penalty Laplacians");
  auto* verify = app.add_subcommand("verify", "Identity suites and strong-vs-weak consistency");
  add_common(check, o, false);
  add_common(canon, o, false);
  add_common(spectrum, o, true);
  add_common(verify, o, true);
  spectrum->add_option("--eps", o.eps, "Ascending penalty parameters, comma separated")->delimiter(',');
  spectrum->add_flag("--sublaplacian", o.sublaplacian, "Sublaplacian only (the default without --eps)");
  spectrum->add_option("--count", o.count, "Number of eigenvalues")->capture_default_str();
  spectrum->add_option("--solver", o.solver, "Eigensolver")
      ->check(CLI::IsMember({"auto", "dense", "lanczos"}))
      ->capture_default_str();
  spectrum->add_flag("--reference", o.reference, "Use the config complement instead of the canonical one");

  std::vector<std::string> argv_store = {"srlab"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    Result r;
    if (check->parsed()) {
      r = cmd_check(o);
    } else if (canon->parsed()) {
      r = cmd_canonicalize(o);
    } else if (spectrum->parsed()) {
      if (o.sublaplacian && !o.eps.empty()) err << "srlab spectrum: --eps given, the sweep includes the sublaplacian\n";
      r = cmd_spectrum(o, err);
    } else {
      r = cmd_verify(o);
    }
    // canonicalize uses --out for the adapted config; its report stays on stdout.
    if (!o.out.empty() && !canon->parsed()) {
      write_atomic(o.out, r.text);
    } else {
      out << r.text;
    }
    return r.code;
  } catch (const ConfigError& e) {
    err << "srlab: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "srlab: expression error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const GridError& e) {
    err << "srlab: grid error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const PeriodicityError& e) {
    err << "srlab: structure is not periodic on the box: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SpectrumError& e) {
    err << "srlab: eigensolver failed: " << e.what() << "\n";
    return kExitTolerance;
  } catch (const std::invalid_argument& e) {
    err << "srlab: invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "srlab: error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace srlab::cli
