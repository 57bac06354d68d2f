#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pinnet/certificates.hpp"
#include "pinnet/config.hpp"
#include "pinnet/dynamics.hpp"
#include "pinnet/errors.hpp"
#include "pinnet/io.hpp"
#include "pinnet/markov.hpp"
#include "pinnet/matlin.hpp"
#include "pinnet/mobility.hpp"
#include "pinnet/rng.hpp"
#include "pinnet/switchnet.hpp"

namespace {

using namespace pinnet;

constexpr int kExitPass = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailedCheck = 2;

// Stream 0 of the master seed is reserved for experiment-level draws (the
// switching rates); run r uses stream r+1, so `simulate` equals run 1 of a
// one-run ensemble.
constexpr std::uint64_t kExperimentStream = 0;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t runs = 0;
};

ExperimentConfig load_with_overrides(const CommonArgs& args) {
  ExperimentConfig cfg = load_experiment(args.config_path);
  if (args.seed_set) cfg.seed = args.seed;
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  if (args.runs > 0) cfg.runs = args.runs;
  return cfg;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::vector<double> experiment_rates(const ExperimentConfig& cfg,
                                     bool& drawn) {
  if (!cfg.q.empty()) {
    drawn = false;
    return cfg.q;
  }
  if (!(cfg.q_high > cfg.q_low))
    throw ValidationError("chain rates: neither q nor a usable q_range given");
  drawn = true;
  Rng rng(cfg.seed, kExperimentStream);
  std::vector<double> q(cfg.embedded.rows);
  for (double& v : q)
    do {
      v = rng.uniform(cfg.q_low, cfg.q_high);
    } while (!(v > 0));
  return q;
}

struct SlowSetup {
  SwitchedTopology topo;
  MarkovGenerator gen;
  std::vector<double> q;
  bool q_drawn = false;
  DynamicsSpec dyn;
};

SlowSetup slow_setup(const ExperimentConfig& cfg) {
  if (cfg.L.empty())
    throw ValidationError("this experiment needs a [topology] section");
  if (cfg.embedded.rows == 0)
    throw ValidationError("this experiment needs a [chain] section");
  SlowSetup s;
  s.topo = make_switched_topology(cfg.L, cfg.C);
  const EmbeddedChain emb = make_embedded_chain(cfg.embedded);
  if (emb.states() != s.topo.states())
    throw DimensionError("chain and topology disagree on the state count");
  s.q = experiment_rates(cfg, s.q_drawn);
  s.gen = assemble_generator(emb, s.q);
  s.dyn = dynamics_from(cfg);
  return s;
}

std::string flag(bool b) { return b ? "true" : "false"; }

// ---------------------------------------------------------------- summaries

ConfigSection chain_section(const SlowSetup& s,
                            const InvariantDistribution& inv) {
  ConfigSection sec{"chain", {}};
  sec.entries.emplace_back("states", std::to_string(s.gen.states()));
  sec.entries.emplace_back("q", format_vector(s.q));
  sec.entries.emplace_back("q_drawn", flag(s.q_drawn));
  sec.entries.emplace_back("pi", format_vector(inv.pi));
  sec.entries.emplace_back("embedded_pi", format_vector(inv.bar_pi));
  sec.entries.emplace_back("embedded_primitive", flag(inv.embedded_primitive));
  return sec;
}

ConfigSection theorem1_section(const SlowCertificate& cert) {
  ConfigSection sec{"theorem1", {}};
  sec.entries.emplace_back("lambda_max", format_vector(cert.lmi_lambda_max));
  sec.entries.emplace_back("tolerance", format_double(cert.tol));
  sec.entries.emplace_back("lmi_pass", flag(cert.lmi_pass));
  sec.entries.emplace_back("rate_bound", format_vector(cert.rate_bound));
  sec.entries.emplace_back("q", format_vector(cert.q));
  sec.entries.emplace_back("rate_pass", flag(cert.rate_pass));
  sec.entries.emplace_back("pass", flag(cert.pass));
  sec.entries.emplace_back("decay", format_double(cert.decay));
  return sec;
}

// --------------------------------------------------------------- gnuplot

const char* kTrajPlot =
    "set datafile separator ','\n"
    "set xlabel 'time'\n"
    "set ylabel 'max node deviation'\n"
    "set logscale y\n"
    "set key off\n"
    "plot 'trajectory.csv' using 1:3 skip 1 with lines\n";

const char* kMsqPlot =
    "set datafile separator ','\n"
    "set xlabel 'time'\n"
    "set ylabel 'ensemble mean square error'\n"
    "set logscale y\n"
    "set key off\n"
    "plot 'msq.csv' using 1:2 skip 1 with lines\n";

std::string positions_plot(const Rect& region) {
  std::string s = "set datafile separator ','\n";
  s += "set size square\n";
  s += "set xlabel 'x'\nset ylabel 'y'\n";
  s += "set object 1 rect from " + format_double(region.x0) + "," +
       format_double(region.y0) + " to " + format_double(region.x1) + "," +
       format_double(region.y1) + " fc rgb 'gray90' behind\n";
  s += "set key off\n";
  s += "plot 'positions.csv' using 3:4 skip 1 with dots\n";
  return s;
}

// ------------------------------------------------------------------ check

int check_slow(const ExperimentConfig& cfg, ConfigFile& report) {
  const SlowSetup s = slow_setup(cfg);
  LyapunovWeights w = cfg.weights == "perron"
                          ? theorem2_construct(s.topo)
                          : identity_weights(s.topo.states(), s.topo.nodes());
  SlowCertificate cert =
      theorem1_check(s.topo, w, s.gen.Q, cfg.alpha, cfg.coupling, cfg.G,
                     cfg.Gamma);
  cert.decay = decay_rate(w, cfg.beta, cfg.G);
  const InvariantDistribution inv = invariant_distribution(s.gen);

  report.sections.push_back(chain_section(s, inv));
  report.sections.push_back(theorem1_section(cert));

  ConfigSection t2{"theorem2", {}};
  try {
    const LyapunovWeights pw = theorem2_construct(s.topo);
    const std::vector<double> b =
        theorem2_rate_bound(s.topo, pw, cfg.alpha, cfg.coupling);
    t2.entries.emplace_back("construction", "ok");
    for (std::size_t i = 0; i < pw.P.size(); ++i)
      t2.entries.emplace_back("weights" + std::to_string(i + 1),
                              format_vector(pw.P[i].diag()));
    t2.entries.emplace_back("rate_bound", format_vector(b));
  } catch (const Error& e) {
    t2.entries.emplace_back("construction", std::string("inapplicable: ") +
                                                 e.what());
  }
  try {
    const std::vector<double> b =
        theorem2_rate_bound(s.topo, w, cfg.alpha, cfg.coupling);
    t2.entries.emplace_back("rate_bound_configured_weights", format_vector(b));
  } catch (const Error& e) {
    t2.entries.emplace_back("rate_bound_configured_weights",
                            std::string("inapplicable: ") + e.what());
  }
  report.sections.push_back(std::move(t2));

  const auto [lbar, cbar] = average_matrices(inv.pi, s.topo);
  ConfigSection avg{"average", {}};
  avg.entries.emplace_back("lbar", format_matrix(lbar));
  avg.entries.emplace_back("cbar", format_vector(cbar.diag()));
  report.sections.push_back(std::move(avg));

  std::cout << "theorem1: " << (cert.pass ? "pass" : "FAIL")
            << "  (lmi " << flag(cert.lmi_pass) << ", rates "
            << flag(cert.rate_pass) << ", decay " << cert.decay << ")\n";
  return cert.pass ? kExitPass : kExitFailedCheck;
}

int check_mobile(const ExperimentConfig& cfg, ConfigFile& report) {
  validate_mobility_config(cfg.mobility);
  const MobilityConfig& mob = cfg.mobility;
  const auto [lbar, cbar] = rwp_average_matrices(mob);
  const Matrix p = Matrix::identity(mob.agents);

  ConfigSection avg{"average", {}};
  avg.entries.emplace_back("link_weight", format_double(lbar(0, 1)));
  avg.entries.emplace_back("pin_weight", format_double(cbar(0, 0)));
  report.sections.push_back(std::move(avg));

  const double d_arena = mob.arena_side * std::sqrt(2.0);
  const Rect& reg = mob.control_region;
  const double d_region = std::hypot(reg.x1 - reg.x0, reg.y1 - reg.y0);
  const EscapeBounds eb =
      escape_bounds(mob, cfg.p_meet, cfg.p_region, d_arena, d_region);
  ConfigSection esc{"escape", {}};
  esc.entries.emplace_back("meeting_bound", format_double(eb.w_bound));
  esc.entries.emplace_back("entry_bound", format_double(eb.e_bound));
  if (cfg.delta > 0 && cfg.r_steps > 0) {
    const double budget = double(cfg.r_steps) * cfg.delta;
    esc.entries.emplace_back("window_budget", format_double(budget));
    esc.entries.emplace_back("meeting_within_budget",
                             flag(eb.w_bound < budget));
    esc.entries.emplace_back("entry_within_budget", flag(eb.e_bound < budget));
  }
  report.sections.push_back(std::move(esc));

  if (!(cfg.k4 > 0)) {
    ConfigSection t3{"theorem3", {}};
    t3.entries.emplace_back("status",
                            "skipped: no k4 estimate in [certificates]");
    report.sections.push_back(std::move(t3));
    std::cout << "theorem3: skipped (no k4 estimate)\n";
    return kExitPass;
  }

  FastConstants fc;
  fc.K1 = cfg.beta * 1.0;
  fc.K2 = cfg.k2 != 0 ? cfg.k2 : cfg.alpha;
  fc.K3 = averaged_form_lambda_max(lbar, cbar, p, cfg.alpha, cfg.coupling,
                                   cfg.G, cfg.Gamma);
  fc.K4 = cfg.k4;
  const auto [pm, pM] = sym_eig_extremes(kron(p, cfg.G));
  fc.lam_m = pm;
  fc.lam_M = pM;
  fc.rho = 2 * fc.K2 / fc.lam_m + 2 * fc.K1 / fc.lam_M;

  const std::size_t r_steps = cfg.r_steps > 0 ? cfg.r_steps : 1;
  const DeltaSearch ds = feasible_delta(fc, r_steps);

  ConfigSection t3{"theorem3", {}};
  t3.entries.emplace_back("K1", format_double(fc.K1));
  t3.entries.emplace_back("K2", format_double(fc.K2));
  t3.entries.emplace_back("K3", format_double(fc.K3));
  t3.entries.emplace_back("K4", format_double(fc.K4));
  t3.entries.emplace_back("rho", format_double(fc.rho));
  t3.entries.emplace_back("lam_min", format_double(fc.lam_m));
  t3.entries.emplace_back("lam_max", format_double(fc.lam_M));
  t3.entries.emplace_back("feasible", flag(ds.feasible));
  if (!ds.note.empty()) t3.entries.emplace_back("note", ds.note);
  if (ds.feasible) {
    t3.entries.emplace_back("delta_star", format_double(ds.delta_star));
    t3.entries.emplace_back("q_min_required",
                            format_double(ds.q_min_required));
  }

  bool pass = ds.feasible;
  if (cfg.delta > 0) {
    const FastSwitchCertificate cert = fast_check(fc, cfg.delta, r_steps);
    t3.entries.emplace_back("delta", format_double(cert.delta));
    t3.entries.emplace_back("lhs", format_double(cert.lhs));
    t3.entries.emplace_back("window_pass", flag(cert.pass));
    t3.entries.emplace_back("q_min_at_delta",
                            format_double(cert.q_min_required));
    if (!cert.pass && ds.feasible)
      t3.entries.emplace_back(
          "discrepancy",
          "window condition is positive at the configured width; largest "
          "certified width is delta_star");
    pass = pass && cert.pass;
    std::cout << "theorem3: window " << (cert.pass ? "pass" : "FAIL")
              << " at delta " << cert.delta << " (lhs " << cert.lhs
              << ", feasible up to " << ds.delta_star << ")\n";
  } else {
    std::cout << "theorem3: feasible " << flag(ds.feasible);
    if (ds.feasible) std::cout << " up to delta " << ds.delta_star;
    std::cout << '\n';
  }
  report.sections.push_back(std::move(t3));
  return pass ? kExitPass : kExitFailedCheck;
}

int cmd_check(const CommonArgs& args) {
  const ExperimentConfig cfg = load_with_overrides(args);
  ensure_dir(cfg.out_dir);
  ConfigFile report;
  int rc = kExitPass;
  if (!cfg.L.empty()) rc = std::max(rc, check_slow(cfg, report));
  if (cfg.has_mobility) rc = std::max(rc, check_mobile(cfg, report));
  if (report.sections.empty())
    throw ValidationError("config defines nothing to check");
  const std::string path = join_path(cfg.out_dir, "certificates.txt");
  write_file_atomic(path, report.serialize());
  std::cout << "wrote " << path << '\n';
  return rc;
}

// --------------------------------------------------------------- simulate

void write_run_summary(const ExperimentConfig& cfg,
                       const TrajectoryRecord& rec,
                       std::vector<ConfigSection> extra) {
  ConfigFile summary;
  ConfigSection run{"run", {}};
  run.entries.emplace_back("seed", std::to_string(cfg.seed));
  run.entries.emplace_back("h", format_double(cfg.h));
  run.entries.emplace_back("horizon", format_double(cfg.horizon));
  run.entries.emplace_back("samples", std::to_string(rec.t.size()));
  run.entries.emplace_back("vs_initial", format_double(rec.vs.front()));
  run.entries.emplace_back("vs_final", format_double(rec.vs.back()));
  run.entries.emplace_back(
      "vs_ratio", format_double(rec.vs.front() > 0
                                    ? rec.vs.back() / rec.vs.front()
                                    : 0));
  run.entries.emplace_back("diverged", flag(rec.diverged));
  const RateFit fit = fit_exponential_rate(rec.t, rec.msq, 0.1 * cfg.horizon,
                                           0.5 * cfg.horizon);
  if (fit.valid)
    run.entries.emplace_back("msq_rate", format_double(fit.rate));
  summary.sections.push_back(std::move(run));
  for (ConfigSection& s : extra) summary.sections.push_back(std::move(s));
  write_file_atomic(join_path(cfg.out_dir, "summary.txt"),
                    summary.serialize());
}

int cmd_simulate(const CommonArgs& args) {
  const ExperimentConfig cfg = load_with_overrides(args);
  ensure_dir(cfg.out_dir);
  if (!cfg.L.empty()) {
    const SlowSetup s = slow_setup(cfg);
    Rng rng(cfg.seed, 1);
    const std::vector<double> uniform_init(s.gen.states(),
                                           1.0 / double(s.gen.states()));
    const SwitchPath path =
        sample_path(s.gen, uniform_init, cfg.horizon, rng);
    const std::size_t m = s.topo.nodes(), n = s.dyn.n;
    std::vector<double> x0(m * n), s0(n);
    for (double& v : x0) v = rng.uniform(-1, 1);
    for (double& v : s0) v = rng.uniform(-1, 1);
    const TrajectoryRecord rec = simulate(s.topo, s.dyn, cfg.coupling, path,
                                          x0, s0, cfg.h, cfg.horizon);
    write_file_atomic(join_path(cfg.out_dir, "switch_path.csv"),
                      switch_path_csv(path));
    write_file_atomic(join_path(cfg.out_dir, "trajectory.csv"),
                      trajectory_csv(rec));
    write_file_atomic(join_path(cfg.out_dir, "trajectory.gp"), kTrajPlot);
    ConfigSection chain{"chain", {}};
    chain.entries.emplace_back("q", format_vector(s.q));
    chain.entries.emplace_back("q_drawn", flag(s.q_drawn));
    chain.entries.emplace_back("jumps",
                               std::to_string(path.entries.size() - 1));
    write_run_summary(cfg, rec, {std::move(chain)});
    std::cout << "vs(0) = " << rec.vs.front() << "  vs(" << cfg.horizon
              << ") = " << rec.vs.back()
              << (rec.diverged ? "  [diverged]" : "") << '\n';
    std::cout << "wrote " << join_path(cfg.out_dir, "trajectory.csv") << '\n';
    return rec.diverged ? kExitFailedCheck : kExitPass;
  }
  if (cfg.has_mobility) {
    validate_mobility_config(cfg.mobility);
    const DynamicsSpec dyn = dynamics_from(cfg);
    Rng rng(cfg.seed, 1);
    const std::size_t m = cfg.mobility.agents, n = dyn.n;
    std::vector<double> x0(m * n), s0(n);
    for (double& v : x0) v = rng.uniform(-1, 1);
    for (double& v : s0) v = rng.uniform(-1, 1);
    MobileOptions opts;
    const auto steps =
        static_cast<std::size_t>(std::llround(cfg.horizon / cfg.h));
    opts.position_stride = std::max<std::size_t>(1, steps / 2000);
    const MobileRun run = simulate_mobile(cfg.mobility, dyn, cfg.coupling, x0,
                                          s0, cfg.h, cfg.horizon, rng, opts);
    write_file_atomic(join_path(cfg.out_dir, "trajectory.csv"),
                      trajectory_csv(run.traj));
    write_file_atomic(join_path(cfg.out_dir, "trajectory.gp"), kTrajPlot);
    write_file_atomic(join_path(cfg.out_dir, "positions.csv"),
                      positions_csv(run.positions));
    write_file_atomic(join_path(cfg.out_dir, "positions.gp"),
                      positions_plot(cfg.mobility.control_region));
    ConfigSection mob{"mobility", {}};
    mob.entries.emplace_back("pin_fraction",
                             format_double(run.pin_fraction));
    mob.entries.emplace_back("link_frequency",
                             format_double(run.link_frequency));
    write_run_summary(cfg, run.traj, {std::move(mob)});
    std::cout << "vs(0) = " << run.traj.vs.front() << "  vs(" << cfg.horizon
              << ") = " << run.traj.vs.back()
              << (run.traj.diverged ? "  [diverged]" : "") << '\n';
    std::cout << "wrote " << join_path(cfg.out_dir, "trajectory.csv") << '\n';
    return run.traj.diverged ? kExitFailedCheck : kExitPass;
  }
  throw ValidationError("config defines neither a topology nor mobility");
}

// ------------------------------------------------------------- montecarlo

int cmd_montecarlo(const CommonArgs& args) {
  const ExperimentConfig cfg = load_with_overrides(args);
  if (cfg.runs < 1) throw ValidationError("runs must be at least 1");
  ensure_dir(cfg.out_dir);

  std::vector<TrajectoryRecord> records;
  std::vector<ConfigSection> extra;
  records.reserve(cfg.runs);
  if (!cfg.L.empty()) {
    const SlowSetup s = slow_setup(cfg);
    const std::vector<double> uniform_init(s.gen.states(),
                                           1.0 / double(s.gen.states()));
    const std::size_t m = s.topo.nodes(), n = s.dyn.n;
    for (std::size_t r = 0; r < cfg.runs; ++r) {
      Rng rng(cfg.seed, r + 1);
      const SwitchPath path =
          sample_path(s.gen, uniform_init, cfg.horizon, rng);
      std::vector<double> x0(m * n), s0(n);
      for (double& v : x0) v = rng.uniform(-1, 1);
      for (double& v : s0) v = rng.uniform(-1, 1);
      records.push_back(simulate(s.topo, s.dyn, cfg.coupling, path, x0, s0,
                                 cfg.h, cfg.horizon));
    }
    ConfigSection chain{"chain", {}};
    chain.entries.emplace_back("q", format_vector(s.q));
    chain.entries.emplace_back("q_drawn", flag(s.q_drawn));
    extra.push_back(std::move(chain));
  } else if (cfg.has_mobility) {
    validate_mobility_config(cfg.mobility);
    const DynamicsSpec dyn = dynamics_from(cfg);
    const std::size_t m = cfg.mobility.agents, n = dyn.n;
    for (std::size_t r = 0; r < cfg.runs; ++r) {
      Rng rng(cfg.seed, r + 1);
      std::vector<double> x0(m * n), s0(n);
      for (double& v : x0) v = rng.uniform(-1, 1);
      for (double& v : s0) v = rng.uniform(-1, 1);
      records.push_back(simulate_mobile(cfg.mobility, dyn, cfg.coupling, x0,
                                        s0, cfg.h, cfg.horizon, rng)
                            .traj);
    }
  } else {
    throw ValidationError("config defines neither a topology nor mobility");
  }

  const EnsembleMsq ens =
      mean_square_error(records, 0.1 * cfg.horizon, 0.5 * cfg.horizon);

  std::string csv = "t,msq\n";
  {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t k = 0; k < ens.t.size(); ++k)
      os << ens.t[k] << ',' << ens.msq[k] << '\n';
    csv += os.str();
  }
  write_file_atomic(join_path(cfg.out_dir, "msq.csv"), csv);
  write_file_atomic(join_path(cfg.out_dir, "msq.gp"), kMsqPlot);

  ConfigFile summary;
  ConfigSection ms{"montecarlo", {}};
  ms.entries.emplace_back("seed", std::to_string(cfg.seed));
  ms.entries.emplace_back("runs", std::to_string(cfg.runs));
  ms.entries.emplace_back("diverged_runs",
                          std::to_string(ens.diverged_runs));
  ms.entries.emplace_back("fit_valid", flag(ens.fit_valid));
  if (ens.fit_valid) {
    ms.entries.emplace_back("msq_rate", format_double(ens.fitted_rate));
    ms.entries.emplace_back("rate_ci_low", format_double(ens.rate_ci_low));
    ms.entries.emplace_back("rate_ci_high", format_double(ens.rate_ci_high));
  }
  std::vector<double> ratios;
  ratios.reserve(records.size());
  for (const TrajectoryRecord& r : records)
    ratios.push_back(r.vs.front() > 0 ? r.vs.back() / r.vs.front() : 0);
  ms.entries.emplace_back("vs_ratios", format_vector(ratios));
  summary.sections.push_back(std::move(ms));
  for (ConfigSection& s : extra) summary.sections.push_back(std::move(s));
  write_file_atomic(join_path(cfg.out_dir, "montecarlo.txt"),
                    summary.serialize());

  std::cout << "runs " << cfg.runs << ", diverged " << ens.diverged_runs;
  if (ens.fit_valid)
    std::cout << ", msq rate " << ens.fitted_rate << " [" << ens.rate_ci_low
              << ", " << ens.rate_ci_high << "]";
  std::cout << '\n'
            << "wrote " << join_path(cfg.out_dir, "montecarlo.txt") << '\n';
  return ens.fit_valid ? kExitPass : kExitFailedCheck;
}

// --------------------------------------------------------------- mobility

int cmd_mobility(const CommonArgs& args) {
  const ExperimentConfig cfg = load_with_overrides(args);
  if (!cfg.has_mobility)
    throw ValidationError("config has no [mobility] section");
  validate_mobility_config(cfg.mobility);
  ensure_dir(cfg.out_dir);

  const auto steps =
      static_cast<std::size_t>(std::llround(cfg.horizon / cfg.h));
  const std::size_t stride = std::max<std::size_t>(1, steps / 5000);
  Rng rng(cfg.seed, 1);
  std::vector<PositionSample> log;
  const MobilityStats stats =
      rwp_statistics(cfg.mobility, cfg.h, cfg.horizon, stride, rng, &log);

  write_file_atomic(join_path(cfg.out_dir, "positions.csv"),
                    positions_csv(log));
  write_file_atomic(join_path(cfg.out_dir, "positions.gp"),
                    positions_plot(cfg.mobility.control_region));

  const auto [lbar, cbar] = rwp_average_matrices(cfg.mobility);
  ConfigFile summary;
  ConfigSection sec{"mobility", {}};
  sec.entries.emplace_back("seed", std::to_string(cfg.seed));
  sec.entries.emplace_back("dt", format_double(cfg.h));
  sec.entries.emplace_back("horizon", format_double(cfg.horizon));
  sec.entries.emplace_back("samples", std::to_string(stats.samples));
  sec.entries.emplace_back("pin_fraction", format_double(stats.pin_fraction));
  sec.entries.emplace_back("pin_fraction_theory",
                           format_double(cbar(0, 0)));
  sec.entries.emplace_back("link_frequency",
                           format_double(stats.link_frequency));
  sec.entries.emplace_back("link_frequency_theory",
                           format_double(lbar(0, 1)));
  summary.sections.push_back(std::move(sec));
  write_file_atomic(join_path(cfg.out_dir, "mobility.txt"),
                    summary.serialize());

  std::cout << "pin fraction " << stats.pin_fraction << " (theory "
            << cbar(0, 0) << "), link frequency " << stats.link_frequency
            << " (theory " << lbar(0, 1) << ")\n"
            << "wrote " << join_path(cfg.out_dir, "mobility.txt") << '\n';
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pinned switched-network simulator and certificate checker"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&](CLI::App* sub, bool with_runs) {
    sub->add_option("--config", args.config_path, "experiment config file")
        ->required();
    sub->add_option("--out", args.out_dir, "output directory override");
    auto* seed =
        sub->add_option("--seed", args.seed, "master seed override");
    sub->parse_complete_callback(
        [&args, seed] { args.seed_set = seed->count() > 0; });
    if (with_runs)
      sub->add_option("--runs", args.runs, "ensemble size override");
  };

  CLI::App* check =
      app.add_subcommand("check", "evaluate stability certificates");
  add_common(check, false);
  CLI::App* simulate =
      app.add_subcommand("simulate", "integrate a single run");
  add_common(simulate, false);
  CLI::App* montecarlo =
      app.add_subcommand("montecarlo", "seeded ensemble of runs");
  add_common(montecarlo, true);
  CLI::App* mobility =
      app.add_subcommand("mobility", "agent motion statistics");
  add_common(mobility, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (check->parsed()) return cmd_check(args);
    if (simulate->parsed()) return cmd_simulate(args);
    if (montecarlo->parsed()) return cmd_montecarlo(args);
    if (mobility->parsed()) return cmd_mobility(args);
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
