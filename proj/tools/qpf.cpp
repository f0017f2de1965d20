// qpf: quasipattern Fourier toolkit for the steady Swift-Hohenberg equation
// on 2q-fold quasilattices.  All outputs are deterministic for a fixed set
// of flags (sorted JSON keys, shortest round-trip floats, fixed CSV format).

#include <CLI11.hpp>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fcntl.h>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "qpf/asymptotics.hpp"
#include "qpf/io.hpp"
#include "qpf/operators.hpp"
#include "qpf/solver.hpp"

using namespace qpf;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// one command per process; concurrent writers to an output directory are
// rejected via an exclusive lock file
struct DirLock {
  std::string path;
  explicit DirLock(const std::string& dir) {
    fs::create_directories(dir);
    path = (fs::path(dir) / ".qpf.lock").string();
    int fd = ::open(path.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0)
      throw std::runtime_error("output directory is locked: " + path);
    ::close(fd);
  }
  ~DirLock() { ::unlink(path.c_str()); }
};

int thread_cap() {
  // QPF_THREADS caps internal parallelism; the current kernels are
  // single-threaded, so the cap is validated and recorded only
  const char* env = std::getenv("QPF_THREADS");
  if (!env) return 1;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (!end || *end != '\0' || v < 1)
    throw std::runtime_error("QPF_THREADS must be a positive integer");
  return (int)v;
}

json run_header(const std::string& command, const json& params, uint64_t seed) {
  json h;
  h["command"] = command;
  h["parameters"] = params;
  h["seed"] = seed;
  h["threads"] = thread_cap();
  return h;
}

std::string out_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasipattern spectral toolkit"};
  app.require_subcommand(1);

  std::string out_dir = ".";
  uint64_t seed = 1;
  app.add_option("--out-dir", out_dir, "output directory");
  app.add_option("--seed", seed, "seed for randomized diagnostics");

  int q = 4, nmax = 5, max_iter = 50, count = 64, resolution = 256, steps = 10;
  double kcut = -1, lambda = 0.1, eps = 0.05, C = 2.0, tol = 1e-10;
  double window = 30.0, lambda_end = 0.1;
  std::string init = "asymptotic", out_file = "solution.json", in_file,
              render_file, init_file;

  auto* lat = app.add_subcommand("lattice", "build and export an atlas");
  lat->add_option("--q", q)->required();
  lat->add_option("--nmax", nmax)->required();
  lat->add_option("--kcut", kcut);

  auto* divs = app.add_subcommand("divisors", "small-divisor spectrum");
  divs->add_option("--q", q)->required();
  divs->add_option("--nmax", nmax)->required();

  auto* exp = app.add_subcommand("expand", "formal asymptotic expansion");
  exp->add_option("--q", q)->required();

  auto* split = app.add_subcommand("split", "sigma0/1/2 spectral splitting");
  split->add_option("--q", q)->required();
  split->add_option("--nmax", nmax)->required();
  split->add_option("--eps", eps)->required();
  split->add_option("--C", C);

  auto* blocks = app.add_subcommand("blocks", "Lambda_eps block spectra");
  blocks->add_option("--q", q)->required();
  blocks->add_option("--eps", eps, "base epsilon (sweep uses eps, eps/2, eps/4)");
  blocks->add_option("--count", count, "sector sample count");

  auto* solve = app.add_subcommand("solve", "Newton solve of the truncation");
  solve->add_option("--q", q)->required();
  solve->add_option("--lambda", lambda)->required();
  solve->add_option("--nmax", nmax)->required();
  solve->add_option("--kcut", kcut);
  solve->add_option("--tol", tol);
  solve->add_option("--max-iter", max_iter);
  solve->add_option("--init", init)->check(CLI::IsMember({"asymptotic", "zero", "file"}));
  solve->add_option("--init-file", init_file);
  solve->add_option("--out", out_file);
  solve->add_option("--render", render_file, "also emit a PGM image");
  solve->add_option("--resolution", resolution);
  solve->add_option("--window", window);

  auto* cont = app.add_subcommand("continue", "warm-started lambda sweep");
  cont->add_option("--q", q)->required();
  cont->add_option("--lambda", lambda, "path start")->required();
  cont->add_option("--lambda-end", lambda_end)->required();
  cont->add_option("--steps", steps);
  cont->add_option("--nmax", nmax)->required();
  cont->add_option("--kcut", kcut);
  cont->add_option("--tol", tol);

  auto* rend = app.add_subcommand("render", "sample a solution file to PGM");
  rend->add_option("--in", in_file)->required();
  rend->add_option("--out", render_file)->required();
  rend->add_option("--window", window);
  rend->add_option("--resolution", resolution);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the offending flag
    return 64;
  }

  try {
    DirLock lock(out_dir);
    std::optional<double> kc;
    if (kcut > 0) kc = kcut;

    if (*lat) {
      auto A = std::make_shared<LatticeAtlas>(q, nmax, kc);
      json j = atlas_to_json(*A);
      j["run"] = run_header("lattice", {{"q", q}, {"nmax", nmax}, {"kcut", kcut}}, seed);
      write_json(out_path(out_dir, "atlas.json"), j);
      auto census = A->shell_census();
      std::string csv = "N,count,c1_bound\n";
      double c1 = A->census_c1();
      for (int n = 0; n <= nmax; ++n)
        csv += std::to_string(n) + "," + std::to_string(census[n]) + "," +
               std::to_string(c1 * std::pow((double)std::max(n, 1), q - 1)) + "\n";
      write_text(out_path(out_dir, "census.csv"), csv);
      return 0;
    }

    if (*divs) {
      LatticeAtlas A(q, nmax);
      auto D = divisor_spectrum(A);
      write_text(out_path(out_dir, "divisors.csv"), divisor_csv(D));
      json rep;
      rep["fitted_exponent"] = D.fitted_exponent;
      rep["fitted_c"] = D.fitted_c;
      rep["run"] = run_header("divisors", {{"q", q}, {"nmax", nmax}}, seed);
      write_json(out_path(out_dir, "divisors.json"), rep);
      return 0;
    }

    if (*exp) {
      auto B = expand_bundle(q);
      json j;
      j["q"] = q;
      j["lambda2"] = B.lambda2;
      j["lambda4"] = B.lambda4;
      j["a0"] = B.a0;
      j["b0"] = B.b0;
      j["u0"] = field_to_json(B.u0);
      j["u1"] = field_to_json(B.u1);
      j["u2"] = field_to_json(B.u2);
      j["a"] = field_to_json(B.a_field);
      j["b"] = field_to_json(B.b_field);
      j["run"] = run_header("expand", {{"q", q}}, seed);
      write_json(out_path(out_dir, "bundle.json"), j);
      return 0;
    }

    if (*split) {
      LatticeAtlas A(q, nmax);
      auto L = classify_spectrum(A, eps, C);
      auto viol = check_disjointness(L);
      json j;
      j["delta"] = L.delta;
      j["delta1"] = L.delta1;
      json labels = json::array();
      for (int i = 0; i < (int)A.size(); ++i) {
        json rec;
        rec["site"] = i;
        rec["region"] = (L.region[i] == Region::S0   ? "S0"
                         : L.region[i] == Region::S1 ? "S1"
                                                     : "S2");
        if (L.disc[i] >= 0) rec["disc"] = L.disc[i];
        labels.push_back(std::move(rec));
      }
      j["labels"] = std::move(labels);
      json vj = json::array();
      for (auto& v : viol)
        vj.push_back({{"kind", v.kind}, {"site", v.site}, {"x", v.x}, {"y", v.y}});
      j["violations"] = vj;
      j["run"] = run_header(
          "split", {{"q", q}, {"nmax", nmax}, {"eps", eps}, {"C", C}}, seed);
      write_json(out_path(out_dir, "labels.json"), j);
      return viol.empty() ? 0 : 2;
    }

    if (*blocks) {
      double delta1 = std::sqrt(3.0 * C * std::sqrt(eps));
      auto pts = sector_grid(q, delta1, count);
      std::vector<BlockRow> rows;
      for (double e : {eps, eps / 2, eps / 4}) {
        for (auto& kp : pts) {
          auto B = assemble_block(q, kp, e);
          auto mu = block_eigenvalues(B);
          auto beta = B.beta;
          std::sort(beta.begin(), beta.end());
          for (int j = 0; j < 2 * q; ++j)
            rows.push_back({e, kp.x, kp.y, j, beta[j], mu[j],
                            mu[j] - beta[j] - 3 * e * e});
        }
      }
      write_text(out_path(out_dir, "blocks.csv"), blocks_csv(rows));
      return 0;
    }

    if (*solve || *cont) {
      auto B = expand_bundle(q);
      auto A = std::make_shared<LatticeAtlas>(q, nmax, kc);
      auto sys = make_system(A);
      NewtonConfig cfg{tol, max_iter, 10};

      if (*cont) {
        std::vector<double> path;
        for (int i = 0; i < steps; ++i)
          path.push_back(lambda + (lambda_end - lambda) * i / (steps - 1));
        auto branch = continuation(sys, B, path, cfg);
        json j = json::array();
        for (auto& p : branch)
          j.push_back({{"lambda", p.lambda},
                       {"branch_norm", p.branch_norm},
                       {"final_residual", p.report.final_residual},
                       {"iterations", p.report.iterates.size()}});
        json top;
        top["branch"] = j;
        top["run"] = run_header("continue",
                                {{"q", q}, {"lambda", lambda},
                                 {"lambda_end", lambda_end}, {"steps", steps},
                                 {"nmax", nmax}, {"kcut", kcut}},
                                seed);
        write_json(out_path(out_dir, "branch.json"), top);
        return 0;
      }

      double eps_used = epsilon_from_lambda(B, lambda);
      Vec u0(sys.dof, 0.0);
      if (init == "asymptotic") {
        u0 = asymptotic_init(sys, B, eps_used);
      } else if (init == "file") {
        std::ifstream f(init_file);
        if (!f) throw std::runtime_error("cannot open init file: " + init_file);
        json j;
        f >> j;
        u0 = from_field(sys, field_from_json(j.at("field"), *A));
      }
      auto [u, rep] = newton_solve(sys, lambda, u0, cfg);
      rep.epsilon_used = eps_used;
      Vec ue = asymptotic_init(sys, B, eps_used);
      double d2 = 0;
      for (int p = 0; p < sys.dof; ++p)
        d2 += sys.weight[p] * (u[p] - ue[p]) * (u[p] - ue[p]);
      rep.diff_ueps = std::sqrt(d2);
      rep.diff_ueps_scaled = rep.diff_ueps / std::pow(eps_used, 4);

      json j;
      j["field"] = field_to_json(to_field(sys, u));
      json rj;
      rj["converged"] = rep.converged;
      rj["final_residual"] = rep.final_residual;
      rj["epsilon_used"] = rep.epsilon_used;
      rj["diff_ueps"] = rep.diff_ueps;
      rj["diff_ueps_scaled"] = rep.diff_ueps_scaled;
      rj["quad_M"] = rep.quad_M;
      rj["residual_hs3"] = hs_norm(sys, residual(sys, u, lambda), 3.0);
      json its = json::array();
      for (auto& [r, s] : rep.iterates) its.push_back({{"residual", r}, {"step", s}});
      rj["iterates"] = its;
      rj["conv_loss"] = rep.conv_loss;
      j["report"] = rj;
      j["run"] = run_header("solve",
                            {{"q", q}, {"lambda", lambda}, {"nmax", nmax},
                             {"kcut", kcut}, {"tol", tol},
                             {"max_iter", max_iter}, {"init", init}},
                            seed);
      write_json(out_path(out_dir, out_file), j);

      if (!render_file.empty()) {
        auto img = sample(to_field(sys, u), window, resolution);
        auto [lo, hi] = write_pgm16(out_path(out_dir, render_file), img, resolution);
        json side;
        side["min"] = lo;
        side["max"] = hi;
        side["window"] = window;
        side["resolution"] = resolution;
        write_json(out_path(out_dir, render_file + ".json"), side);
      }
      return rep.converged ? 0 : 2;
    }

    if (*rend) {
      std::ifstream f(in_file);
      if (!f) throw std::runtime_error("cannot open " + in_file);
      json j;
      f >> j;
      auto& h = j.at("field").at("atlas_header");
      std::optional<double> kcopt;
      if (!h.at("k_cut").is_null()) kcopt = h.at("k_cut").get<double>();
      LatticeAtlas A(h.at("q").get<int>(), h.at("n_max").get<int>(), kcopt);
      SpectralField fld = field_from_json(j.at("field"), A);
      auto img = sample(fld, window, resolution);
      auto [lo, hi] = write_pgm16(out_path(out_dir, render_file), img, resolution);
      json side;
      side["min"] = lo;
      side["max"] = hi;
      side["window"] = window;
      side["resolution"] = resolution;
      write_json(out_path(out_dir, render_file + ".json"), side);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
