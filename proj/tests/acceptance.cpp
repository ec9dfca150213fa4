// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.
#include <gmpxx.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <json.hpp>
#include <sstream>
#include <srlab/config.hpp>
#include <srlab/operators.hpp>
#include <srlab/spectrum.hpp>
#include <string>
#include <vector>

#include "commands.hpp"

using namespace srlab;
using json = nlohmann::json;

namespace {

std::string g_fixtures = SRLAB_FIXTURE_DIR;

std::string fixture(const std::string& name) { return g_fixtures + "/" + name + ".cfg"; }

SubRiemannianStructure load(const std::string& name) { return load_config(fixture(name)).structure(); }

MetricExtension canonical_ext(const SubRiemannianStructure& s, Rng& rng) {
  return MetricExtension::canonical(canonical_complement(s, lattice(s.periods, 5), rng));
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (detail.tellp() > 0) detail << "; ";
    detail << what << (ok ? "" : " [FAIL]");
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct CliRun {
  int code;
  std::string out;
};

CliRun srlab_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str()};
}

// Smooth test functions with integer coefficients, independent of the CLI's.
Expr smooth_function(Rng& rng, int dim) {
  std::uniform_int_distribution<int> var(0, dim - 1), c(1, 4);
  int i = var(rng), j = var(rng), k = var(rng), l = var(rng);
  int a = c(rng), b = c(rng), d = c(rng);
  std::string text = std::to_string(a) + "*cos(x" + std::to_string(i) + " - " + std::to_string(b) + "*x" +
                     std::to_string(j) + ") + x" + std::to_string(k) + "^3/" + std::to_string(d) + " + exp(sin(x" +
                     std::to_string(l) + ")) * x" + std::to_string(i);
  return parse(text, dim);
}

// ---------------------------------------------------------------------------

void criterion1(Outcome& o) {
  struct Expect {
    std::string name;
    std::function<bool(const json&)> ok;
    std::string text;
  };
  std::vector<Expect> cases = {
      {"heisenberg",
       [](const json& j) { return j["fat"] == true && j["regular"] == true && j["Q"] == 4 && j["degree"] == 2; },
       "fat, regular, Q=4, degree 2"},
      {"engel", [](const json& j) { return j["fat"] == false && j["Q"] == 7 && j["degree"] == 3; },
       "not fat, Q=7, degree 3"},
      {"martinet", [](const json& j) { return j["regular"] == false; }, "not regular"},
      {"integrable", [](const json& j) { return j["bracket_generating"] == false; }, "not bracket-generating"},
  };
  for (const auto& c : cases) {
    auto t0 = std::chrono::steady_clock::now();
    auto r = srlab_cli({"check", fixture(c.name)});
    double dt = seconds_since(t0);
    bool ok = false;
    try {
      ok = c.ok(json::parse(r.out));
    } catch (const std::exception&) {
      ok = false;
    }
    o.require(ok && dt < 5.0, c.name + " " + c.text + " (" + num(dt) + " s)");
  }
}

void criterion2(Outcome& o) {
  Rng rng(2);
  for (const char* name : {"heisenberg", "carnot-step2", "contact3torus"}) {
    auto s = load(name);
    auto pts = lattice(s.periods, 5);
    auto ac = canonical_complement(s, pts, rng);
    double r = verify_flat_complement(ac, pts);
    o.require(r < 1e-10, std::string(name) + " flat residual " + num(r) + " on " + std::to_string(pts.size()) + " points");
  }
  // Tilting the reference complement horizontally must not move T'. Only
  // fixtures with a unique solve have a unique T'.
  struct Tilt {
    const char* name;
    std::vector<std::string> a;  // T -> T + a^1 X_1 + a^2 X_2
  };
  for (const Tilt& t : {Tilt{"heisenberg", {"x0 - x2/3", "sin(x1) + 1"}},
                        Tilt{"contact3torus", {"sin(x0 + x2)", "cos(x1) - 2*sin(x2)"}}}) {
    auto s = load(t.name);
    auto tilted = s;
    VectorField T = s.complement[0];
    for (int i = 0; i < 2; ++i) T = T + parse(t.a[static_cast<std::size_t>(i)], s.dim) * s.horizontal[static_cast<std::size_t>(i)];
    tilted.complement[0] = T;
    auto pts = lattice(s.periods, 5);
    auto a = canonical_complement(s, pts, rng);
    auto b = canonical_complement(tilted, pts, rng);
    double worst = 0.0;
    for (const auto& p : pts) {
      auto Fa = frame_matrix(a.reference.frame(), p);
      auto Fb = frame_matrix(b.reference.frame(), p);
      Eigen::VectorXd Ta = Fa.col(2) + Fa.leftCols(2) * a.coefficients_at(p).col(0);
      Eigen::VectorXd Tb = Fb.col(2) + Fb.leftCols(2) * b.coefficients_at(p).col(0);
      worst = std::max(worst, (Ta - Tb).cwiseAbs().maxCoeff());
    }
    o.require(a.unique() && b.unique() && worst < 1e-10, std::string(t.name) + " tilt invariance " + num(worst));
  }
}

void criterion3(Outcome& o) {
  const double tol = 1e-9;
  Rng rng(3);
  for (const char* name : {"heisenberg", "heisenberg-tilted", "contact3torus", "engel", "carnot-step2", "martinet"}) {
    auto s = load(name);
    auto ext = MetricExtension::from_structure(s);
    auto sub = sublaplacian(ext);
    auto h = mean_curvature(ext);
    FrameAlgebra alg(ext.frame(), ext.rank());
    const int k = ext.rank(), m = s.dim;
    double conn = 0, lemma = 0, product = 0, cartan = 0, div = 0;
    int points = 30;
    for (int t = 0; t < points; ++t) {
      Point p = random_point(rng, s.periods);
      Expr f = smooth_function(rng, m);

      auto data = alg.at(p);
      auto g = connection_coefficients(data);
      double scale = 1.0;
      for (double c : data.c) scale = std::max(scale, std::abs(c));
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          for (int a = 0; a < k; ++a) {
            conn = std::max(conn, std::abs(g(i, j, a) + g(i, a, j)) / scale);
            conn = std::max(conn, std::abs(g(i, j, a) - g(j, i, a) - data.horizontal(i, j, a)) / scale);
          }

      double lhs = sub.apply_at(f, p);
      double rhs = horizontal_divergence(ext, horizontal_gradient_components(ext, f)).evaluate(p);
      lemma = std::max(lemma, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));

      product = std::max(product, product_rule_residual(ext, sub, f, p) / std::max(1.0, std::abs(sub.apply_at(f * f, p))));

      for (int w = 0; w < m; ++w) {
        std::vector<Expr> omega;
        for (int j = 0; j < m; ++j) omega.push_back(alg.coframe(w, j));
        for (int a = 0; a < m; ++a)
          for (int b = a + 1; b < m; ++b) {
            double sc = std::max(1.0, alg.bracket(a, b).evaluate(p).cwiseAbs().maxCoeff());
            cartan = std::max(cartan, cartan_residual(omega, alg.field(a), alg.field(b), p) / sc);
          }
      }

      VectorField X = VectorField::zero(m);
      double gxh = 0.0;
      for (int i = 0; i < k; ++i) {
        Expr phi = f * Expr(i + 1);
        X = X + phi * ext.horizontal[static_cast<std::size_t>(i)];
        gxh += phi.evaluate(p) * h[static_cast<std::size_t>(i)].evaluate(p);
      }
      double dh = horizontal_divergence(ext, X, p);
      div = std::max(div, std::abs(riemannian_divergence(ext, X, p) - (dh - gxh)) / std::max(1.0, std::abs(dh)));
    }
    double worst = std::max({conn, lemma, product, cartan, div});
    o.require(worst < tol, std::string(name) + " max " + num(worst) + " (conn " + num(conn) + ", lemma " + num(lemma) +
                               ", product " + num(product) + ", cartan " + num(cartan) + ", div " + num(div) + ")");
  }
}

void criterion4(Outcome& o) {
  Rng rng(4);
  for (const char* name : {"contact3torus", "heisenberg"}) {
    auto s = load(name);
    auto ext = canonical_ext(s, rng);
    double hmax = 0.0;
    auto pts = random_points(s.periods, 20, rng);
    for (const auto& e : mean_curvature(ext))
      for (const auto& p : pts) hmax = std::max(hmax, std::abs(e.evaluate(p)));
    auto sub = sublaplacian(ext);
    std::vector<double> xs, ys;
    for (double eps : {10.0, 100.0, 1000.0}) {
      auto pen = penalty_laplacian(ext, eps);
      double d = 0.0;
      for (const auto& p : pts) {
        for (int j = 0; j < s.dim; ++j) {
          auto uj = static_cast<std::size_t>(j);
          d = std::max(d, std::abs(pen.b[uj].evaluate(p) - sub.b[uj].evaluate(p)));
          for (int l = 0; l < s.dim; ++l) {
            auto ul = static_cast<std::size_t>(l);
            d = std::max(d, std::abs(pen.a[uj][ul].evaluate(p) - sub.a[uj][ul].evaluate(p)));
          }
        }
        d = std::max(d, std::abs(pen.c.evaluate(p) - sub.c.evaluate(p)));
      }
      xs.push_back(std::log(eps));
      ys.push_back(-std::log(d));
    }
    double mx = (xs[0] + xs[1] + xs[2]) / 3, my = (ys[0] + ys[1] + ys[2]) / 3, sxy = 0, sxx = 0;
    for (int i = 0; i < 3; ++i) {
      sxy += (xs[static_cast<std::size_t>(i)] - mx) * (ys[static_cast<std::size_t>(i)] - my);
      sxx += (xs[static_cast<std::size_t>(i)] - mx) * (xs[static_cast<std::size_t>(i)] - mx);
    }
    double order = sxy / sxx;
    o.require(hmax < 1e-12 && std::abs(order - 2.0) <= 0.3,
              std::string(name) + " H-perp " + num(hmax) + ", decay order " + num(order));
  }
  for (const char* name : {"contact3torus", "carnot-step2", "engel"}) {
    auto s = load(name);
    auto ext = MetricExtension::from_structure(s);
    double worst = 0.0;
    for (const auto& p : random_points(s.periods, 20, rng)) {
      for (double eps : {0.5, 3.0, 10.0, 100.0}) {
        double expect = std::pow(eps, s.corank());
        double ratio = ext.penalty(eps).volume_density(p) / ext.volume_density(p);
        worst = std::max(worst, std::abs(ratio - expect) / expect);
      }
    }
    o.require(worst < 1e-12, std::string(name) + " volume scaling eps^(m-k) rel err " + num(worst));
  }
}

template <class T>
std::vector<T> random_values(Rng& rng, std::size_t n) {
  std::vector<T> v(n);
  for (auto& x : v) x = T(uniform(rng, -1, 1));
  return v;
}

void criterion5(Outcome& o) {
  Rng rng(5);
  auto s = load("contact3torus");
  auto ext = canonical_ext(s, rng);
  Grid g = Grid::uniform(s.periods, 8);
  for (std::optional<double> eps : {std::optional<double>{}, std::optional<double>{2.0}}) {
    std::string tag = eps ? "eps=2" : "sublaplacian";
    auto wd = assemble_weak_laplacian<double>(ext, g, {.eps = eps, .density = std::nullopt});
    double asym = wd.L.max_asymmetry();
    auto wq = assemble_weak_laplacian<mpq_class>(ext, g, {.eps = eps, .density = std::nullopt});
    bool exact_sym = wq.L.max_asymmetry() == 0;
    int mismatches = 0;
    for (int t = 0; t < 100; ++t) {
      auto e = random_values<mpq_class>(rng, g.size());
      auto f = random_values<mpq_class>(rng, g.size());
      if (wq.L.bilinear(f, e) != wq.energy(e, f, g)) ++mismatches;
    }
    o.require(asym == 0.0 && exact_sym && mismatches == 0,
              tag + ": max|L-L^T| = " + num(asym) + " (double), rational Green identity mismatches " +
                  std::to_string(mismatches) + "/100");
  }
  auto spec = sublaplacian(ext);
  Expr f = parse("sin(x0)*cos(x2) + cos(x1 + x2)", 3);
  std::vector<double> gap;
  for (int n : {8, 16}) {
    Grid gn = Grid::uniform(s.periods, n);
    auto wf = assemble_weak_laplacian<double>(ext, gn);
    auto fv = sample(f, gn);
    auto Lf = wf.L.apply(fv);
    auto Sf = assemble_strong(spec, gn).apply(fv);
    double d = 0.0;
    for (std::size_t i = 0; i < fv.size(); ++i) d = std::max(d, std::abs(-Lf[i] / wf.M.diag[i] - Sf[i]));
    gap.push_back(d);
  }
  double ratio = gap[0] / gap[1];
  o.require(ratio >= 3.5 && ratio <= 4.5, "strong-vs-weak ratio n 8->16 " + num(ratio));
}

void criterion6(Outcome& o) {
  Rng rng(6);
  auto s = load("contact3torus");
  auto ext = canonical_ext(s, rng);
  Grid g = Grid::uniform(s.periods, 12);
  std::vector<double> eps = {2, 4, 8, 16, 32};
  auto table = epsilon_sweep(ext, g, eps, {.count = 6, .solver = EigenSolver::Lanczos, .lanczos = {}, .density = {}}, rng);
  bool decreasing = true, converged = table.limit.converged;
  double final_rel = 0.0;
  for (std::size_t e = 0; e < eps.size(); ++e) converged = converged && table.reports[e].converged;
  for (std::size_t i = 0; i < 6; ++i) {
    double li = table.limit.eigenvalues[i];
    if (std::abs(li) < 1e-8) continue;  // the constant mode has gap identically zero
    for (std::size_t e = 1; e < eps.size(); ++e) decreasing = decreasing && table.gap[e][i] < table.gap[e - 1][i];
    final_rel = std::max(final_rel, table.gap.back()[i] / std::abs(li));
  }
  o.require(converged && decreasing, "gaps strictly decreasing over eps 2..32");
  o.require(final_rel < 0.05, "final relative gap " + num(final_rel));

  // Lanczos against the dense oracle: the sweep operators at N = 1728 and
  // the sublaplacian at N = 4096.
  double worst = 0.0;
  auto compare = [&](const Grid& grid, std::optional<double> e, const SpectrumReport& lz) {
    auto wf = assemble_weak_laplacian<double>(ext, grid, {.eps = e, .density = std::nullopt});
    auto dense = dense_spectrum(wf.L, wf.M, {.vectors = false});
    for (std::size_t i = 0; i < lz.eigenvalues.size(); ++i)
      worst = std::max(worst, std::abs(lz.eigenvalues[i] - dense.eigenvalues[i]) / std::max(1.0, std::abs(dense.eigenvalues[i])));
  };
  compare(g, std::nullopt, table.limit);
  for (std::size_t e = 0; e < eps.size(); ++e) compare(g, eps[e], table.reports[e]);
  Grid g16 = Grid::uniform(s.periods, 16);
  auto wf16 = assemble_weak_laplacian<double>(ext, g16);
  auto lz16 = lanczos_smallest(wf16.L, wf16.M, {.count = 6}, rng);
  converged = converged && lz16.converged;
  compare(g16, std::nullopt, lz16);
  o.require(converged && worst <= 1e-8, "Lanczos vs dense max rel diff " + num(worst) + " (N 1728, 4096)");
}

void criterion7(Outcome& o) {
  Rng rng(7);
  auto s = load("contact3torus");
  auto h = hopf_check(canonical_ext(s, rng), Grid::uniform(s.periods, 12));
  o.require(h.kernel_dim == 1 && h.flatness < 1e-6 && h.lambda2 > 0.0,
            "contact3torus kernel " + std::to_string(h.kernel_dim) + ", flatness " + num(h.flatness) + ", lambda2 " +
                num(h.lambda2));
  auto i = load("integrable");
  auto n = hopf_check(MetricExtension::from_structure(i), Grid::uniform(i.periods, 8));
  o.require(n.kernel_dim > 1, "integrable kernel " + std::to_string(n.kernel_dim));
}

void criterion8(Outcome& o) {
  std::vector<std::vector<std::string>> commands = {
      {"spectrum", fixture("contact3torus"), "--eps", "2,8", "-n", "12", "--count", "6", "--solver", "lanczos"},
      {"verify", fixture("contact3torus")},
      {"check", fixture("engel")},
      {"canonicalize", fixture("contact3torus")},
  };
  for (const auto& base : commands) {
    for (const char* fmt : {"csv", "json"}) {
      auto args = base;
      args.insert(args.end(), {"--seed", "42", "--format", fmt});
      auto a = srlab_cli(args);
      auto b = srlab_cli(args);
      o.require(a.code == 0 && !a.out.empty() && a.out == b.out, base[0] + " " + fmt + " identical");
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_fixtures = argv[1];
  if (const char* env = std::getenv("SRLAB_FIXTURES")) g_fixtures = env;

  struct Criterion {
    int id;
    const char* title;
    void (*run)(Outcome&);
    double limit;  // seconds, 0 for none
  };
  const Criterion criteria[] = {
      {1, "structural verdicts", criterion1, 0},
      {2, "canonical complement", criterion2, 10},
      {3, "operator identities", criterion3, 30},
      {4, "penalty limit and volume scaling", criterion4, 0},
      {5, "discrete Green identity and symmetry", criterion5, 0},
      {6, "spectral convergence", criterion6, 300},
      {7, "Hopf kernel", criterion7, 0},
      {8, "determinism", criterion8, 0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    double dt = seconds_since(t0);
    if (c.limit > 0) o.require(dt < c.limit, "runtime under " + num(c.limit) + " s");
    std::printf("[%s] criterion %d, %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, dt,
                o.detail.str().c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of 8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
