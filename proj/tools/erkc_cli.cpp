// Command-line driver: discontinuity tables, single runs, convergence
// studies, and the self-verification suite. All outputs are CSV (to --out or
// stdout) with `#`-prefixed comment lines; identical invocations produce
// byte-identical output. The environment variable ERKC_THREADS caps the
// number of concurrent study cells (default 1).

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "erkc/convergence.hpp"
#include "erkc/verification.hpp"

namespace {

using namespace erkc;

std::string fmt_g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_h(const std::string& text) {
  const auto v = parse_step_sizes(text);
  if (v.size() != 1) throw Error("expected a single step size, got '" + text + "'");
  return v[0];
}

Method parse_method(const std::string& name) {
  if (name == "erkc-i") return Method::erkc_i;
  if (name == "erkc-c") return Method::erkc_c;
  if (name == "merkc-i") return Method::merkc_i;
  throw Error("unknown method '" + name + "' (erkc-i | erkc-c | merkc-i)");
}

CollocationScheme parse_scheme(const std::string& name, int s) {
  if (name == "gauss") return CollocationScheme::gauss(s);
  if (name == "radau") return CollocationScheme::radau_iia(s);
  if (name.rfind("custom:", 0) == 0) {
    std::vector<double> nodes;
    std::stringstream ss(name.substr(7));
    std::string tok;
    while (std::getline(ss, tok, ',')) nodes.push_back(std::atof(tok.c_str()));
    return CollocationScheme(nodes);
  }
  throw Error("unknown scheme '" + name + "' (gauss | radau | custom:<c1,c2,...>)");
}

NormKind parse_norm(const std::string& name) {
  if (name == "linf") return NormKind::linf;
  if (name == "l2") return NormKind::l2;
  if (name == "valpha") return NormKind::v_alpha;
  throw Error("unknown norm '" + name + "' (linf | l2 | valpha)");
}

MeshPolicy parse_policy(const std::string& name) {
  if (name == "constrained") return MeshPolicy::constrained_uniform;
  if (name == "per-segment") return MeshPolicy::per_segment_uniform;
  throw Error("unknown mesh policy '" + name + "' (constrained | per-segment)");
}

int default_n(const std::string& problem) {
  if (problem == "ex2") return 64;
  if (problem == "ex4") return 128;
  if (problem == "ex3") return 200;
  return 256;
}

double default_ref_h(const std::string& problem) {
  // fine ERKC-C references used for the problems without exact solutions
  if (problem == "ex3") return std::pow(2.0, -14);
  return std::pow(2.0, -11);
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file '" + path + "'");
  out << content;
}

int cmd_disc(const std::string& problem, const std::string& out_path) {
  auto p = make_problem(problem, 4);
  auto disc = compute_discontinuities(p.delay, p.T);
  std::ostringstream csv;
  csv << "#schema=1\n";
  csv << "mu,xi,segment_start,segment_end\n";
  double prev = 0.0;
  for (std::size_t mu = 0; mu < disc.xi.size(); ++mu) {
    csv << (mu + 1) << "," << fmt_g(disc.xi[mu]) << "," << fmt_g(prev) << ","
        << fmt_g(disc.xi[mu]) << "\n";
    prev = disc.xi[mu];
  }
  write_output(out_path, csv.str());
  return 0;
}

struct RunArgs {
  std::string problem = "ex1";
  std::string method = "erkc-c";
  std::string scheme = "gauss";
  int s = 2;
  std::string h = "2^-6";
  std::string mesh = "constrained";
  int n = 0;
  double fp_tol = 1e-12;
  int fp_max_iter = 100;
  bool timing = false;
  int dense_samples = 0;
  std::string out;
};

int cmd_run(const RunArgs& a) {
  const int n = a.n > 0 ? a.n : default_n(a.problem);
  auto p = make_problem(a.problem, n);
  MethodConfig cfg{parse_method(a.method), parse_scheme(a.scheme, a.s)};
  cfg.fp_tol = a.fp_tol;
  cfg.fp_max_iter = a.fp_max_iter;
  const auto disc = compute_discontinuities(p.delay, p.T);
  const auto mesh = build_mesh(disc, p.delay, parse_h(a.h), parse_policy(a.mesh));
  const auto res = integrate(p, mesh, cfg);
  for (const auto& w : res.report.warnings) std::cerr << "warning: " << w << "\n";

  std::ostringstream csv;
  csv << "#schema=1\n";
  csv << "#problem=" << a.problem << " method=" << a.method << " s=" << cfg.scheme.size()
      << " n=" << n << " h=" << fmt_g(parse_h(a.h)) << " T=" << fmt_g(p.T) << "\n";
  long total_iters = 0;
  int max_iters = 0;
  for (int it : res.report.iterations) {
    total_iters += it;
    max_iters = std::max(max_iters, it);
  }
  csv << "#steps=" << mesh.intervals() << " fp_iterations_total=" << total_iters
      << " fp_iterations_max=" << max_iters
      << " ratio_increase=" << fmt_g(res.report.ratio.max_increase)
      << " ratio_decrease=" << fmt_g(res.report.ratio.max_decrease) << "\n";
  if (a.timing)
    csv << "#wall_seconds=" << fmt_g(res.report.wall_seconds) << "\n";
  if (p.has_exact) {
    const double err =
        error_norm(res.final_value, p.exact_at(p.T), NormKind::linf, 0.0, *p.op);
    csv << "#final_linf_error=" << fmt_g(err) << "\n";
  }
  const int dim = p.op->kind() == OperatorKind::dirichlet_laplacian_2d ? 2 : 1;
  if (dim == 1) {
    csv << "x,u\n";
    const bool periodic = p.op->kind() == OperatorKind::periodic_laplacian_1d;
    for (int i = 0; i < p.op->dof(); ++i) {
      const double x = periodic ? double(i) / n : double(i + 1) / (n + 1);
      csv << fmt_g(x) << "," << fmt_g(res.final_value[i]) << "\n";
    }
  } else {
    csv << "x,y,u\n";
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        csv << fmt_g(double(i + 1) / (n + 1)) << "," << fmt_g(double(j + 1) / (n + 1))
            << "," << fmt_g(res.final_value[static_cast<std::size_t>(i) * n + j]) << "\n";
  }
  if (a.dense_samples > 0) {
    csv << "#dense_samples t,dof_0..dof_" << (p.op->dof() - 1) << "\n";
    for (int q = 0; q <= a.dense_samples; ++q) {
      const double t = p.T * q / a.dense_samples;
      StateVector v;
      if (t <= 0.0) {
        v = p.history_at(t);
      } else
        switch (cfg.method) {
          case Method::erkc_i: v = res.interpolant->eval(t); break;
          case Method::erkc_c: v = res.dense->eval(t); break;
          case Method::merkc_i: v = res.node_store->eval(t); break;
        }
      csv << fmt_g(t);
      for (double x : v) csv << "," << fmt_g(x);
      csv << "\n";
    }
  }
  write_output(a.out, csv.str());
  return 0;
}

struct ConvArgs {
  std::string problem = "ex1";
  std::string method = "erkc-c";
  std::string scheme = "gauss";
  int s = 2;
  std::string hs = "2^-3..2^-8";
  std::string mesh = "constrained";
  std::string norm = "linf";
  double alpha = 0.5;
  int n = 0;
  std::string ref_h;
  bool global_error = false;
  double fp_tol = 1e-12;
  std::string out;
};

int cmd_converge(const ConvArgs& a) {
  const int n = a.n > 0 ? a.n : default_n(a.problem);
  auto p = make_problem(a.problem, n);
  ConvergenceStudy st;
  st.n = n;
  st.method = parse_method(a.method);
  st.scheme = parse_scheme(a.scheme, a.s);
  st.policy = parse_policy(a.mesh);
  st.steps = parse_step_sizes(a.hs);
  st.norm = parse_norm(a.norm);
  st.alpha = st.norm == NormKind::v_alpha ? a.alpha : 0.0;
  st.use_exact = p.has_exact;
  st.global_error = a.global_error;
  st.fp_tol = a.fp_tol;
  if (!st.use_exact)
    st.ref_h = a.ref_h.empty() ? default_ref_h(a.problem) : parse_h(a.ref_h);
  const auto res = run_study(p, st);
  write_output(a.out, res.csv);
  return 0;
}

int cmd_selftest(bool fast, int only) {
  const auto results = erkc::verify::run_acceptance(fast, only);
  int failures = 0;
  for (const auto& r : results) {
    const char* tag = r.skipped ? "SKIP" : (r.pass ? "PASS" : "FAIL");
    std::printf("%s criterion %d: %s (%s) [%.2fs]\n", tag, r.id, r.name.c_str(),
                r.detail.c_str(), r.seconds);
    if (!r.pass && !r.skipped) ++failures;
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exponential Runge-Kutta collocation methods for delay parabolic problems"};
  // keep -h free for the step-size option's sake; help is --help
  app.set_help_flag("--help", "print help");
  app.set_config("--config", "", "plain-text key=value configuration file (subcommand options in a [subcommand] section)");
  app.require_subcommand(1);

  std::string disc_problem = "ex1", disc_out;
  auto* disc = app.add_subcommand("disc", "print the primary discontinuity table as CSV");
  disc->add_option("--problem", disc_problem, "ex1 | ex2 | ex3 | ex4");
  disc->add_option("--out", disc_out, "output file (default stdout)");

  RunArgs ra;
  auto* run = app.add_subcommand("run", "integrate once and emit the final-time solution");
  run->add_option("--problem", ra.problem, "ex1 | ex2 | ex3 | ex4");
  run->add_option("--method", ra.method, "erkc-i | erkc-c | merkc-i");
  run->add_option("--scheme", ra.scheme, "gauss | radau | custom:<c1,c2,...>");
  run->add_option("--s", ra.s, "stage count for named schemes");
  run->add_option("--h", ra.h, "base step size (2^-k or decimal)");
  run->add_option("--mesh", ra.mesh, "constrained | per-segment");
  run->add_option("--n", ra.n, "grid size per dimension (problem default if 0)");
  run->add_option("--fp-tol", ra.fp_tol, "stage fixed-point tolerance");
  run->add_option("--fp-max-iter", ra.fp_max_iter, "stage fixed-point iteration cap");
  run->add_flag("--timing", ra.timing, "report wall time (non-deterministic output)");
  run->add_option("--dense-samples", ra.dense_samples,
                  "append K+1 dense-output samples over [0, T]");
  run->add_option("--out", ra.out, "output file (default stdout)");

  ConvArgs ca;
  auto* conv = app.add_subcommand("converge", "step-size sweep with order fit");
  conv->add_option("--problem", ca.problem, "ex1 | ex2 | ex3 | ex4");
  conv->add_option("--method", ca.method, "erkc-i | erkc-c | merkc-i");
  conv->add_option("--scheme", ca.scheme, "gauss | radau | custom:<c1,c2,...>");
  conv->add_option("--s", ca.s, "stage count for named schemes");
  conv->add_option("--hs", ca.hs, "step sizes: 2^-a..2^-b or comma list");
  conv->add_option("--mesh", ca.mesh, "constrained | per-segment");
  conv->add_option("--norm", ca.norm, "linf | l2 | valpha");
  conv->add_option("--alpha", ca.alpha, "exponent for the valpha norm");
  conv->add_option("--n", ca.n, "grid size per dimension (problem default if 0)");
  conv->add_option("--ref-h", ca.ref_h,
                   "reference step for problems without exact solutions");
  conv->add_flag("--global", ca.global_error, "also report max node error over [0,T]");
  conv->add_option("--fp-tol", ca.fp_tol, "stage fixed-point tolerance");
  conv->add_option("--out", ca.out, "output file (default stdout)");

  bool st_fast = false;
  int st_only = 0;
  auto* st = app.add_subcommand("selftest", "run the verification suite");
  st->add_flag("--fast", st_fast, "skip the long 2D self-convergence check");
  st->add_option("--only", st_only, "run a single criterion (1..10)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (disc->parsed()) return cmd_disc(disc_problem, disc_out);
    if (run->parsed()) return cmd_run(ra);
    if (conv->parsed()) return cmd_converge(ca);
    if (st->parsed()) return cmd_selftest(st_fast, st_only);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
