// Copyright 2026 The QFC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QFC_HARNESS_RUN_HPP
#define QFC_HARNESS_RUN_HPP

#include <cmath>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qfc/chaos/julia.hpp"
#include "qfc/chaos/smap.hpp"
#include "qfc/core/spin.hpp"
#include "qfc/harness/config.hpp"
#include "qfc/io/csv.hpp"
#include "qfc/protocols/entanglement.hpp"
#include "qfc/protocols/purification.hpp"
#include "qfc/protocols/stabilization.hpp"
#include "qfc/sme/integrator.hpp"
#include "qfc/sme/model.hpp"
#include "qfc/stochastic/ensemble.hpp"

namespace qfc::harness {

struct RunResult {
  std::vector<std::filesystem::path> files;
};

namespace detail {

using io::Cell;
using io::CsvTable;

class Writer {
 public:
  Writer(const ExperimentConfig& cfg, RunResult& res) : dir_(cfg.out_path), preamble_(cfg.preamble()), res_(res) {
    std::filesystem::create_directories(dir_);
  }

  void csv(const std::string& name, const CsvTable& t) { put(name, t.str(preamble_)); }
  void text(const std::string& name, const std::string& s) { put(name, s); }
  const io::Preamble& preamble() const { return preamble_; }

 private:
  void put(const std::string& name, const std::string& s) {
    const auto path = dir_ / name;
    io::write_text(path, s);
    res_.files.push_back(path);
  }

  std::filesystem::path dir_;
  io::Preamble preamble_;
  RunResult& res_;
};

inline CsvTable summary_table() { return CsvTable({"quantity", "value"}); }
inline void put(CsvTable& t, const std::string& k, double v) { t.add({k, v}); }

inline void run_stabilize(const ExperimentConfig& c, std::size_t threads, Writer& w) {
  namespace st = qfc::stabilization;
  const double p = c.real("p"), theta = c.real("theta");
  const auto n = static_cast<std::size_t>(c.integer("grid"));
  const auto samples = static_cast<std::size_t>(c.integer("samples"));
  st::GapGrid grid;
  grid.p_points = grid.theta_points = n;
  const st::GapSurface s = st::gap_surface(grid);
  CsvTable surf({"p", "theta", "f1", "f3", "f4", "gap"});
  for (const auto& r : s.rows) surf.add({r.p, r.theta, r.f1, r.f3, r.f4, r.gap});
  w.csv("stabilize_surface.csv", surf);

  const st::ChiOptimum chi = st::optimal_chi(p, theta);
  const auto mc1 = st::mc_do_nothing(p, theta, samples, c.seed, threads);
  const auto mc3 = st::mc_discriminate_prepare(p, theta, samples, c.seed + 1, threads);
  const auto mc4 = st::mc_weak_feedback(p, theta, chi.chi, samples, c.seed + 2, threads);
  CsvTable sum = summary_table();
  put(sum, "grid_max_gap", s.max_gap);
  put(sum, "grid_argmax_p", s.argmax_p);
  put(sum, "grid_argmax_theta", s.argmax_theta);
  put(sum, "grid_min_gap", s.min_gap);
  put(sum, "refined_max_gap", s.refined_max_gap);
  put(sum, "refined_argmax_p", s.refined_p);
  put(sum, "refined_argmax_theta", s.refined_theta);
  put(sum, "f1", st::f1_do_nothing(p, theta));
  put(sum, "f3", st::f3_discriminate_prepare(p, theta));
  put(sum, "f4", st::f4_closed(p, theta));
  put(sum, "chi_opt", chi.chi);
  put(sum, "f4_at_chi_opt", chi.fidelity);
  put(sum, "mc_do_nothing", mc1.mean);
  put(sum, "mc_do_nothing_se", mc1.standard_error);
  put(sum, "mc_discriminate_prepare", mc3.mean);
  put(sum, "mc_discriminate_prepare_se", mc3.standard_error);
  put(sum, "mc_weak_feedback", mc4.mean);
  put(sum, "mc_weak_feedback_se", mc4.standard_error);
  w.csv("stabilize_summary.csv", sum);
}

inline void run_purify(const ExperimentConfig& c, std::size_t threads, Writer& w) {
  namespace pu = qfc::purification;
  const double k = c.real("k"), dt = c.real("dt"), horizon = c.real("horizon"), fdt = c.real("feedback-dt");
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  const auto checkpoints = static_cast<std::size_t>(c.integer("checkpoints"));
  const std::size_t stride = std::max<std::size_t>(1, steps / checkpoints);
  const auto ens = pu::nofeedback_ensemble(k, dt, horizon, stride, static_cast<std::size_t>(c.integer("trajectories")),
                                           c.seed, threads);
  pu::PurificationRun run;
  run.k = k;
  run.dt = fdt;
  run.horizon = horizon;
  run.seed = c.seed;
  run.target_impurity = c.real("target");
  const auto fb = pu::feedback_purify(run);
  CsvTable t({"t", "impurity_nofeedback_mc", "impurity_nofeedback_se", "impurity_nofeedback_quadrature",
              "impurity_feedback", "impurity_feedback_closed"});
  for (std::size_t i = 0; i < ens.n_samples; ++i) {
    const double time = static_cast<double>(i * stride) * dt;
    const auto j = std::min<std::size_t>(fb.impurity.size() - 1, static_cast<std::size_t>(std::llround(time / fdt)));
    t.add({time, ens.mean_at(i, 0), ens.standard_error(i, 0), pu::nofeedback_impurity(time, k), fb.impurity[j],
           pu::feedback_impurity_closed(time, k)});
  }
  w.csv("purify.csv", t);
  const auto sp = pu::speedup_ratio(c.real("target"), k);
  CsvTable sum = summary_table();
  put(sum, "target", c.real("target"));
  put(sum, "t_feedback", sp.t_qf);
  put(sum, "t_nofeedback", sp.t_cl);
  put(sum, "ratio", sp.ratio);
  w.csv("purify_summary.csv", sum);
}

inline DensityMatrix entangle_initial(const std::string& init) {
  namespace en = qfc::entanglement;
  if (init == "psi+") return en::bell_density(en::BellState::PsiPlus);
  if (init == "phi+") return en::bell_density(en::BellState::PhiPlus);
  if (init == "product") return DensityMatrix(ComplexMatrix::Constant(4, 4, 0.25));
  return DensityMatrix::maximally_mixed(4);
}

inline void run_entangle(const ExperimentConfig& c, std::size_t threads, Writer& w) {
  namespace en = qfc::entanglement;
  en::EntangleOptions opt;
  opt.k = c.real("k");
  opt.dt = c.real("dt");
  opt.horizon_kt = c.real("horizon");
  opt.leakage_threshold = c.real("leakage");
  opt.purity_threshold = c.real("purity");
  opt.record_every = static_cast<std::size_t>(c.integer("record-every"));
  opt.throw_on_exhaustion = false;
  const DensityMatrix rho0 = entangle_initial(c.text("init"));
  const auto runs = static_cast<std::size_t>(c.integer("runs"));
  std::vector<en::EntangleResult> results(runs);
  parallel_for(runs, threads, [&](std::size_t i) {
    RngStream rng(c.seed, i);
    en::EntangleOptions o = opt;
    if (i > 0) o.record_every = std::numeric_limits<std::size_t>::max();
    results[i] = en::entangle_protocol(rho0, o, rng);
  });
  CsvTable path({"t", "stage", "r_squared", "leakage", "q1_z", "q2_purity", "fidelity_to_bell"});
  for (const auto& s : results[0].path) {
    path.add({s.t, static_cast<long long>(s.stage), s.r_squared, s.leakage, s.q1_z, s.q2_purity, s.fidelity});
  }
  w.csv("entangle.csv", path);
  CsvTable tab({"run", "converged", "t_stage1", "t_final", "final_r_squared", "final_fidelity", "target"});
  for (std::size_t i = 0; i < runs; ++i) {
    const auto& r = results[i];
    tab.add({static_cast<long long>(i), static_cast<long long>(r.converged), r.t_stage1, r.t_final, r.final_r_squared,
             r.final_fidelity, std::string(en::bell_name(r.target))});
  }
  w.csv("entangle_runs.csv", tab);
}

inline void run_bellpurify(const ExperimentConfig& c, std::size_t, Writer& w) {
  const auto f = qfc::chaos::bell_purify_iterate(qfc::chaos::perturbed_bell_fixture(),
                                                 static_cast<std::size_t>(c.integer("steps")), c.real("x"), c.real("phi"));
  CsvTable t({"step", "fidelity"});
  for (std::size_t k = 0; k < f.size(); ++k) t.add({static_cast<long long>(k), f[k]});
  w.csv("bellpurify.csv", t);
}

inline void run_julia(const ExperimentConfig& c, std::size_t threads, Writer& w) {
  namespace ch = qfc::chaos;
  ch::RasterJob job;
  job.re_min = c.real("re-min");
  job.re_max = c.real("re-max");
  job.im_min = c.real("im-min");
  job.im_max = c.real("im-max");
  std::tie(job.width, job.height) = c.grid("grid");
  job.max_iters = static_cast<int>(c.integer("max-iters"));
  job.cycle_tol = c.real("cycle-tol");
  job.max_period = static_cast<int>(c.integer("max-period"));
  job.p = Complex(c.real("p-re"), c.real("p-im"));
  const auto g = ch::julia_raster(job, threads);
  w.text("julia.pgm", io::pgm_string(g.counts, g.width, g.height, g.max_iters, w.preamble()));
  std::vector<std::string> header{"row"};
  for (int col = 0; col < g.width; ++col) header.push_back("c" + std::to_string(col));
  CsvTable counts(header);
  for (int r = 0; r < g.height; ++r) {
    std::vector<Cell> row{static_cast<long long>(r)};
    for (int col = 0; col < g.width; ++col) row.emplace_back(static_cast<long long>(g.at(r, col)));
    counts.add(std::move(row));
  }
  w.csv("julia_counts.csv", counts);
  long long nonconv = 0;
  for (int v : g.counts) nonconv += v < 0;
  const auto bc = ch::box_counting_dimension(g);
  CsvTable sum = summary_table();
  put(sum, "nonconvergent_pixels", static_cast<double>(nonconv));
  put(sum, "boundary_box_dimension", bc.dimension);
  w.csv("julia_summary.csv", sum);
}

inline StepScheme scheme_of(const ExperimentConfig& c) {
  return c.text("scheme") == "kraus" ? StepScheme::PositiveKraus : StepScheme::EulerMaruyama;
}

/// Mean and standard error of per-sample observables over trajectories.
template <class Obs>
EnsembleStatistics observe_ensemble(const SmeModel& model, const DensityMatrix& rho0, const TrajectoryOptions& opt,
                                    std::size_t n_obs, std::size_t n_traj, std::uint64_t seed, std::size_t threads,
                                    Obs&& obs) {
  const std::size_t samples = (opt.steps + opt.record_every - 1) / opt.record_every + 1;
  return run_ensemble(samples, n_obs, n_traj, seed, threads, [&](RngStream& rng, std::span<double> out) {
    run_trajectory(model, rho0, opt, rng, [&](std::size_t s, double, const ComplexMatrix& rho) {
      obs(rho, out.subspan(s * n_obs, n_obs));
    });
  });
}

inline std::vector<double> sample_times(const TrajectoryOptions& opt) {
  std::vector<double> t;
  for (std::size_t n = 0; n <= opt.steps; n += opt.record_every) t.push_back(static_cast<double>(n) * opt.dt);
  if ((opt.steps % opt.record_every) != 0) t.push_back(static_cast<double>(opt.steps) * opt.dt);
  return t;
}

inline void run_sme(const ExperimentConfig& c, std::size_t threads, Writer& w) {
  const SmeModel model = qubit_dephasing_model(c.real("k"), c.real("omega-x"));
  TrajectoryOptions opt;
  opt.dt = c.real("dt");
  opt.steps = static_cast<std::size_t>(c.integer("steps"));
  opt.record_every = static_cast<std::size_t>(c.integer("record-every"));
  opt.keep_states = false;
  opt.scheme = scheme_of(c);
  const DensityMatrix plus(0.5 * ComplexMatrix::Ones(2, 2));
  const ComplexMatrix x = pauli_x(), y = pauli_y(), z = pauli_z();
  const auto stats = observe_ensemble(model, plus, opt, 4, static_cast<std::size_t>(c.integer("trajectories")), c.seed,
                                      threads, [&](const ComplexMatrix& rho, std::span<double> o) {
                                        o[0] = expectation(x, rho);
                                        o[1] = expectation(y, rho);
                                        o[2] = expectation(z, rho);
                                        o[3] = purity(rho);
                                      });
  TrajectoryOptions lopt = opt;
  lopt.unconditioned = true;
  lopt.keep_states = true;
  RngStream unused(c.seed, 0);
  const auto lind = run_trajectory(model, plus, lopt, unused);
  const auto times = sample_times(opt);
  CsvTable t({"t", "x_mean", "x_se", "y_mean", "y_se", "z_mean", "z_se", "purity_mean", "x_lindblad", "y_lindblad",
              "z_lindblad"});
  for (std::size_t i = 0; i < stats.n_samples; ++i) {
    const ComplexMatrix& r = lind.states[i];
    t.add({times[i], stats.mean_at(i, 0), stats.standard_error(i, 0), stats.mean_at(i, 1), stats.standard_error(i, 1),
           stats.mean_at(i, 2), stats.standard_error(i, 2), stats.mean_at(i, 3), expectation(x, r), expectation(y, r),
           expectation(z, r)});
  }
  w.csv("sme_run.csv", t);
}

inline void run_spin(const ExperimentConfig& c, std::size_t threads, Writer& w) {
  const int two_j = static_cast<int>(c.integer("two-j"));
  const SmeModel model =
      spin_ensemble_model(two_j, control_laws::constant(c.real("u")), c.real("s"), c.real("m"), c.real("eta"));
  const AngularMomentum f = angular_momentum_ops(two_j);
  // coherent state along +x: top eigenvector of F_x
  const HermitianSpectrum sp = hermitian_spectrum(f.fx);
  const ComplexVector v = sp.vectors.col(sp.values.size() - 1);
  const DensityMatrix rho0(v * v.adjoint());
  TrajectoryOptions opt;
  opt.dt = c.real("dt");
  opt.steps = static_cast<std::size_t>(c.integer("steps"));
  opt.record_every = static_cast<std::size_t>(c.integer("record-every"));
  opt.keep_states = false;
  opt.scheme = scheme_of(c);
  const ComplexMatrix fz2 = f.fz * f.fz;
  const auto stats = observe_ensemble(model, rho0, opt, 4, static_cast<std::size_t>(c.integer("trajectories")), c.seed,
                                      threads, [&](const ComplexMatrix& rho, std::span<double> o) {
                                        const double m = expectation(f.fz, rho);
                                        o[0] = m;
                                        o[1] = expectation(fz2, rho) - m * m;
                                        o[2] = expectation(f.fx, rho);
                                        o[3] = purity(rho);
                                      });
  const auto times = sample_times(opt);
  CsvTable t({"t", "fz_mean", "fz_se", "fz_variance_mean", "fx_mean", "purity_mean"});
  for (std::size_t i = 0; i < stats.n_samples; ++i) {
    t.add({times[i], stats.mean_at(i, 0), stats.standard_error(i, 0), stats.mean_at(i, 1), stats.mean_at(i, 2),
           stats.mean_at(i, 3)});
  }
  w.csv("spin_collapse.csv", t);
}

} // namespace detail

/// Runs one experiment and writes its files under cfg.out_path.
inline RunResult run(const ExperimentConfig& cfg) {
  const std::size_t threads = resolve_thread_count(cfg.threads);
  RunResult res;
  detail::Writer w(cfg, res);
  const std::string& cmd = cfg.command;
  try {
    if (cmd == "stabilize") {
      detail::run_stabilize(cfg, threads, w);
    } else if (cmd == "purify") {
      detail::run_purify(cfg, threads, w);
    } else if (cmd == "entangle") {
      detail::run_entangle(cfg, threads, w);
    } else if (cmd == "bellpurify") {
      detail::run_bellpurify(cfg, threads, w);
    } else if (cmd == "julia") {
      detail::run_julia(cfg, threads, w);
    } else if (cmd == "sme-run") {
      detail::run_sme(cfg, threads, w);
    } else if (cmd == "spin-collapse") {
      detail::run_spin(cfg, threads, w);
    } else {
      throw ConfigError({"unknown command '" + cmd + "'"});
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(cmd + ": " + e.what());
  }
  return res;
}

} // namespace qfc::harness

#endif // QFC_HARNESS_RUN_HPP
