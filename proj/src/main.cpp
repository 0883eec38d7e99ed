#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#ifdef _OPENMP
#include <omp.h>
#endif

#include "tnspec/mps.hpp"
#include "tnspec/oracle.hpp"
#include "tnspec/physics.hpp"
#include "tnspec/pts.hpp"
#include "tnspec/state_io.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Run manifest sidecar: carries the full flag set plus wall time.  Wall time
// lives here (not in the CSV) so result files stay byte-identical across
// reruns with the same seed.
void write_manifest(const std::string& out, const std::string& command,
                    const nlohmann::json& flags, std::uint64_t seed,
                    double wall_ms) {
  nlohmann::json m;
  m["schema_version"] = 1;
  m["command"] = command;
  m["flags"] = flags;
  m["seed"] = seed;
  m["version"] = kVersion;
  m["wall_ms"] = wall_ms;
  std::ofstream f(out + ".manifest.json");
  f << m.dump(2) << "\n";
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

tnspec::TriPartition central_partition(std::size_t L, std::size_t lab) {
  const std::size_t start = (L - lab) / 2;
  tnspec::TriPartition part;
  for (std::size_t i = 0; i < L; ++i) {
    if (i >= start && i < start + lab / 2)
      part.sites_a.push_back(i);
    else if (i >= start + lab / 2 && i < start + lab)
      part.sites_b.push_back(i);
    else
      part.sites_c.push_back(i);
  }
  return part;
}

int cmd_random(std::size_t L, std::size_t lab_min, std::size_t lab_max,
               std::size_t realizations, double tol, std::uint64_t seed,
               const std::string& out) {
  if (L < 2 || L > 24 || lab_min < 2 || lab_max > L || lab_min > lab_max ||
      lab_min % 2 || lab_max % 2 || realizations == 0) {
    std::cerr << "random: invalid ranges\n";
    return 1;
  }
  const auto t0 = Clock::now();
  std::ofstream csv(out);
  if (!csv) {
    std::cerr << "random: cannot open " << out << "\n";
    return 1;
  }
  csv << "L,L_AB,realization,E,E_err,E_analytic,n_samples\n";
  bool all_converged = true;
  for (std::size_t lab = lab_min; lab <= lab_max; lab += 2) {
    const double d_ab = std::pow(2.0, static_cast<double>(lab / 2));
    const double d_c = std::pow(2.0, static_cast<double>(L - lab));
    const double analytic = tnspec::analytic_random_logneg(d_ab, d_ab, d_c);
    for (std::size_t r = 0; r < realizations; ++r) {
      const std::uint64_t ss = seed ^ tnspec::splitmix64(lab * 1000 + r + 1);
      tnspec::PureState psi = tnspec::random_pure_state(L, ss);
      tnspec::TriPartition part = central_partition(L, lab);
      tnspec::SlqConfig cfg;
      cfg.tol = tol;
      cfg.seed = ss + 17;
      tnspec::LognegResult res = tnspec::logneg_pts(psi, part, cfg);
      all_converged = all_converged && res.trace.converged;
      csv << L << "," << lab << "," << r << "," << fmt(res.value) << ","
          << fmt(res.error) << "," << fmt(analytic) << ","
          << res.trace.n_used << "\n";
    }
  }
  write_manifest(out, "random",
                 {{"L", L},
                  {"lab_min", lab_min},
                  {"lab_max", lab_max},
                  {"realizations", realizations},
                  {"tol", tol}},
                 seed, ms_since(t0));
  return all_converged ? 0 : 2;
}

int cmd_quench(std::size_t L, double t_max, double dt,
               std::vector<std::size_t> labs, double tol, std::uint64_t seed,
               const std::string& out) {
  if (L < 2 || L > 20 || dt <= 0.0 || t_max < 0.0 || labs.empty()) {
    std::cerr << "quench: invalid ranges\n";
    return 1;
  }
  for (std::size_t lab : labs)
    if (lab < 2 || lab > L || lab % 2) {
      std::cerr << "quench: bad L_AB " << lab << "\n";
      return 1;
    }
  const auto t0 = Clock::now();
  std::ofstream csv(out);
  if (!csv) {
    std::cerr << "quench: cannot open " << out << "\n";
    return 1;
  }
  csv << "Jt,L_AB,E,E_err\n";
  tnspec::HeisenbergModel model{L, 1.0};
  tnspec::QuenchConfig qc;
  qc.dt = dt;
  qc.t_max = t_max;
  std::vector<tnspec::QuenchStep> series =
      tnspec::evolve(tnspec::neel_state(L), model, qc);
  bool all_converged = true;
  for (std::size_t n = 0; n < series.size(); ++n) {
    for (std::size_t lab : labs) {
      tnspec::SlqConfig cfg;
      cfg.tol = tol;
      cfg.seed = seed ^ tnspec::splitmix64(n * 100 + lab);
      tnspec::LognegResult res = tnspec::logneg_pts(
          series[n].state, central_partition(L, lab), cfg);
      all_converged = all_converged && res.trace.converged;
      csv << fmt(series[n].t) << "," << lab << "," << fmt(res.value) << ","
          << fmt(res.error) << "\n";
    }
  }
  write_manifest(out, "quench",
                 {{"L", L}, {"t_max", t_max}, {"dt", dt}, {"tol", tol}},
                 seed, ms_since(t0));
  return all_converged ? 0 : 2;
}

int cmd_heis_gs(std::size_t L, std::size_t chi_max, std::size_t lab_max,
                double tol, std::uint64_t seed, const std::string& out,
                const std::string& save_mps_dir) {
  if (L < 4 || chi_max < 2 || lab_max < 4 || lab_max > L || lab_max % 2) {
    std::cerr << "heis-gs: invalid ranges\n";
    return 1;
  }
  const auto t0 = Clock::now();
  tnspec::HeisenbergModel model{L, 1.0};
  tnspec::DmrgConfig dc;
  dc.chi_max = chi_max;
  tnspec::DmrgResult gs = tnspec::dmrg2(tnspec::heisenberg_mpo(model), dc, seed);
  if (!save_mps_dir.empty()) tnspec::save_mps(gs.mps, save_mps_dir);
  std::ofstream csv(out);
  if (!csv) {
    std::cerr << "heis-gs: cannot open " << out << "\n";
    return 1;
  }
  csv << "L_AB,E,E_err\n";
  bool all_converged = gs.converged;
  std::vector<std::pair<double, double>> points;
  for (std::size_t lab = 4; lab <= lab_max; lab += 2) {
    const std::size_t h = lab / 2, c = L / 2;
    tnspec::BlockSpec blocks{c - h, h, c, h};
    tnspec::SlqConfig cfg;
    cfg.tol = tol;
    cfg.seed = seed ^ tnspec::splitmix64(lab);
    tnspec::LognegResult res =
        tnspec::logneg_mps_blocks(gs.mps, blocks, cfg, 1e-10);
    all_converged = all_converged && res.trace.converged;
    points.push_back({static_cast<double>(lab), res.value});
    csv << lab << "," << fmt(res.value) << "," << fmt(res.error) << "\n";
  }
  nlohmann::json sidecar;
  sidecar["schema_version"] = 1;
  sidecar["energy"] = gs.energy;
  sidecar["dmrg_converged"] = gs.converged;
  sidecar["sweeps"] = gs.sweeps;
  sidecar["max_chi"] = gs.mps.max_chi();
  try {
    tnspec::CftFit fit = tnspec::cft_fit(points, L);
    sidecar["fit"] = {{"c", fit.c},
                      {"c_err", fit.c_err},
                      {"K", fit.k_const},
                      {"K_err", fit.k_err}};
  } catch (const std::exception& e) {
    sidecar["fit_error"] = e.what();
  }
  std::ofstream sf(out + ".fit.json");
  sf << sidecar.dump(2) << "\n";
  write_manifest(out, "heis-gs",
                 {{"L", L},
                  {"chi_max", chi_max},
                  {"lab_max", lab_max},
                  {"tol", tol},
                  {"save_mps", save_mps_dir}},
                 seed, ms_since(t0));
  return all_converged ? 0 : 2;
}

int cmd_logneg(const std::string& state_dir, const std::string& mps_dir,
               std::vector<std::size_t> sites_a,
               std::vector<std::size_t> sites_b, double tol,
               std::uint64_t seed, bool exact) {
  if (sites_a.empty() || sites_b.empty()) {
    std::cerr << "logneg: --sites-a and --sites-b required\n";
    return 1;
  }
  tnspec::SlqConfig cfg;
  cfg.tol = tol;
  cfg.seed = seed;
  nlohmann::json res;
  tnspec::LognegResult ln;
  try {
    if (!state_dir.empty()) {
      tnspec::PureState psi = tnspec::load_state(state_dir);
      tnspec::TriPartition part;
      part.sites_a = sites_a;
      part.sites_b = sites_b;
      std::vector<char> used(psi.num_sites, 0);
      for (std::size_t s : sites_a) used.at(s) = 1;
      for (std::size_t s : sites_b) used.at(s) = 1;
      for (std::size_t i = 0; i < psi.num_sites; ++i)
        if (!used[i]) part.sites_c.push_back(i);
      ln = tnspec::logneg_pts(psi, part, cfg);
      res["method"] = "pts";
      if (exact) {
        tnspec::DensityMatrix rho = tnspec::reduce_dense(psi, part);
        const double ex = tnspec::exact_logneg(rho);
        res["E_exact"] = ex;
        res["deviation"] = ln.value - ex;
      }
    } else if (!mps_dir.empty()) {
      tnspec::Mps m = tnspec::load_mps(mps_dir);
      auto contiguous = [](const std::vector<std::size_t>& v) {
        for (std::size_t i = 1; i < v.size(); ++i)
          if (v[i] != v[i - 1] + 1) return false;
        return true;
      };
      if (!contiguous(sites_a) || !contiguous(sites_b)) {
        std::cerr << "logneg: MPS path needs contiguous blocks\n";
        return 1;
      }
      tnspec::BlockSpec blocks{sites_a.front(), sites_a.size(),
                               sites_b.front(), sites_b.size()};
      ln = tnspec::logneg_mps_blocks(m, blocks, cfg, 1e-10);
      res["method"] = "mps";
      if (exact) {
        tnspec::PureState psi = tnspec::dense_from_mps(m);
        tnspec::TriPartition part;
        part.sites_a = sites_a;
        part.sites_b = sites_b;
        std::vector<char> used(psi.num_sites, 0);
        for (std::size_t s : sites_a) used.at(s) = 1;
        for (std::size_t s : sites_b) used.at(s) = 1;
        for (std::size_t i = 0; i < psi.num_sites; ++i)
          if (!used[i]) part.sites_c.push_back(i);
        const double ex = tnspec::exact_logneg(tnspec::reduce_dense(psi, part));
        res["E_exact"] = ex;
        res["deviation"] = ln.value - ex;
      }
    } else {
      std::cerr << "logneg: need --state-file or --mps-dir\n";
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "logneg: " << e.what() << "\n";
    return 1;
  }
  res["E"] = ln.value;
  res["E_err"] = ln.error;
  res["n_samples"] = ln.trace.n_used;
  std::cout << res.dump() << "\n";
  return ln.trace.converged ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor-network spectral sums: logarithmic negativity via "
               "stochastic Lanczos quadrature"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads,
                 "worker thread count (default: TNSPEC_THREADS or all cores)");

  std::size_t L = 12, lab_min = 2, lab_max = 12, realizations = 1;
  std::size_t chi_max = 64;
  double tol = 0.01, t_max = 6.0, dt = 0.25;
  std::uint64_t seed = 1;
  std::string out = "out.csv", save_mps_dir, state_dir, mps_dir;
  std::vector<std::size_t> labs{2, 4, 6}, sites_a, sites_b;
  bool exact = false;

  CLI::App* rnd = app.add_subcommand("random", "random pure states sweep");
  rnd->add_option("--L", L);
  rnd->add_option("--lab-min", lab_min);
  rnd->add_option("--lab-max", lab_max);
  rnd->add_option("--realizations", realizations);
  rnd->add_option("--tol", tol);
  rnd->add_option("--seed", seed);
  rnd->add_option("--out", out)->required();

  CLI::App* qn = app.add_subcommand("quench", "Neel-quench negativity traces");
  qn->add_option("--L", L);
  qn->add_option("--t-max", t_max);
  qn->add_option("--dt", dt);
  qn->add_option("--lab-list", labs)->delimiter(',');
  qn->add_option("--tol", tol);
  qn->add_option("--seed", seed);
  qn->add_option("--out", out)->required();

  CLI::App* hg = app.add_subcommand("heis-gs", "Heisenberg ground-state scaling");
  hg->add_option("--L", L);
  hg->add_option("--chi-max", chi_max);
  hg->add_option("--lab-max", lab_max);
  hg->add_option("--tol", tol);
  hg->add_option("--seed", seed);
  hg->add_option("--out", out)->required();
  hg->add_option("--save-mps", save_mps_dir);

  CLI::App* ln = app.add_subcommand("logneg", "negativity of a stored state");
  ln->add_option("--state-file", state_dir);
  ln->add_option("--mps-dir", mps_dir);
  ln->add_option("--sites-a", sites_a)->delimiter(',');
  ln->add_option("--sites-b", sites_b)->delimiter(',');
  ln->add_option("--tol", tol);
  ln->add_option("--seed", seed);
  ln->add_flag("--exact", exact);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

#ifdef _OPENMP
  if (threads <= 0)
    if (const char* env = std::getenv("TNSPEC_THREADS")) threads = std::atoi(env);
  if (threads > 0) omp_set_num_threads(threads);
#endif

  try {
    if (rnd->parsed())
      return cmd_random(L, lab_min, lab_max, realizations, tol, seed, out);
    if (qn->parsed()) return cmd_quench(L, t_max, dt, labs, tol, seed, out);
    if (hg->parsed())
      return cmd_heis_gs(L, chi_max, lab_max, tol, seed, out, save_mps_dir);
    if (ln->parsed())
      return cmd_logneg(state_dir, mps_dir, sites_a, sites_b, tol, seed, exact);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
