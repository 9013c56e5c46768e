#include "magbill/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <future>
#include <sstream>
#include <thread>

#include "magbill/csv.hpp"
#include "magbill/kernels/kernels.hpp"

namespace magbill {

void RunManifest::set(const std::string& key, const std::string& value) {
  entries.emplace_back(key, value);
}

void RunManifest::set(const std::string& key, double value) { entries.emplace_back(key, fmt17(value)); }

void RunManifest::check(const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ok = false;
  entries.emplace_back("check." + name, std::string(pass ? "pass" : "fail") + " (" + detail + ")");
}

std::string RunManifest::text() const {
  std::string out;
  out += "status = " + std::string(ok ? "ok" : "failed") + "\n";
  for (const auto& [k, v] : entries) out += k + " = " + v + "\n";
  return out;
}

namespace {

namespace fs = std::filesystem;

struct Workspace {
  Grid2D grid;
  BoundaryChart chart;
  PotentialSpec spec;
  LinkField links;
  BoundaryCondition bc;
};

Workspace make_workspace(const ExperimentConfig& cfg) {
  Workspace w;
  w.grid = cfg.build_grid();
  w.chart = boundary_chart(w.grid);
  w.spec = cfg.build_gauge();
  w.links = link_phases(w.grid, w.chart, w.spec, cfg.params);
  double perim = 0;
  for (int c = 0; c < w.chart.n_components(); ++c) perim += w.chart.perimeter(c);
  w.bc = make_bc(cfg.bc, w.chart, cfg.build_alpha(perim), cfg.beta);
  return w;
}

void emit_spectra_csv(const std::string& path, const std::vector<double>& params,
                      const std::vector<Spectrum>& spectra) {
  CsvTable t;
  t.header = {"param_value", "index", "lambda", "residual"};
  for (std::size_t p = 0; p < spectra.size(); ++p)
    for (std::size_t i = 0; i < spectra[p].values.size(); ++i)
      t.add_row({fmt17(params[p]), std::to_string(i), fmt17(spectra[p].values[i]),
                 fmt17(spectra[p].residuals[i])});
  emit_csv(t, path);
}

// bounded-concurrency map over sweep values, results ordered by index
template <typename F>
std::vector<Spectrum> parallel_solve(const std::vector<double>& values, int threads, F&& solve) {
  const int conc = threads > 0 ? threads
                               : std::max(1u, std::thread::hardware_concurrency());
  std::vector<Spectrum> out(values.size());
  std::size_t next = 0;
  while (next < values.size()) {
    const std::size_t batch = std::min<std::size_t>(conc, values.size() - next);
    std::vector<std::future<Spectrum>> futs;
    for (std::size_t j = 0; j < batch; ++j)
      futs.push_back(std::async(std::launch::async, solve, values[next + j]));
    for (std::size_t j = 0; j < batch; ++j) out[next + j] = futs[j].get();
    next += batch;
  }
  return out;
}

double rel_entry_diff(const Eigen::SparseMatrix<cplx, Eigen::RowMajor>& a,
                      const Eigen::SparseMatrix<cplx, Eigen::RowMajor>& b) {
  using Sp = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
  Sp diff = a - b;
  double dm = 0, scale = 0;
  for (int r = 0; r < diff.outerSize(); ++r)
    for (Sp::InnerIterator it(diff, r); it; ++it) dm = std::max(dm, std::abs(it.value()));
  for (int r = 0; r < a.outerSize(); ++r)
    for (Sp::InnerIterator it(a, r); it; ++it) scale = std::max(scale, std::abs(it.value()));
  return scale > 0 ? dm / scale : dm;
}

void run_single(const ExperimentConfig& cfg, const RunOptions& opt, const std::string& out,
                RunManifest& man) {
  Workspace w = make_workspace(cfg);
  const Hamiltonian ham = assemble(w.grid, w.chart, w.links, w.bc, cfg.params);
  EigsOptions eo;
  eo.method = cfg.method;
  eo.tol = cfg.tol;
  eo.seed = opt.seed;
  const Spectrum sp = eigs_lowest(ham, cfg.k, eo);

  emit_spectra_csv(out + "/eigenvalues.csv", {0.0}, {sp});
  man.set("grid_hash", [&] {
    char b[24];
    std::snprintf(b, sizeof b, "%016llx", static_cast<unsigned long long>(ham.grid_hash));
    return std::string(b);
  }());
  const double defect = hermiticity_defect(ham);
  man.check("hermiticity_defect", defect <= 1e-12, fmt17(defect));
  double rmax = 0, rallow = 0;
  for (std::size_t i = 0; i < sp.residuals.size(); ++i) {
    rmax = std::max(rmax, sp.residuals[i]);
    rallow = std::max(rallow, std::max(cfg.tol * std::max(1.0, std::abs(sp.values[i])),
                                       sp.residual_floor));
  }
  man.check("solver_residual", rmax <= rallow, fmt17(rmax));

  if (opt.dump_matrix) {
    std::ostringstream m, ww;
    ham.dump_matrix(m, ww);
    emit_text(m.str(), out + "/matrix.csv");
    emit_text(ww.str(), out + "/weights.txt");
  }
}

void run_compare(const ExperimentConfig& cfg, const RunOptions& opt, const std::string& out,
                 RunManifest& man) {
  Workspace w = make_workspace(cfg);
  const PotentialSpec spec2 = cfg.build_compare_gauge();
  const LinkField links2 = link_phases(w.grid, w.chart, spec2, cfg.params);
  const Hamiltonian h1 = assemble(w.grid, w.chart, w.links, w.bc, cfg.params);
  const Hamiltonian h2 = assemble(w.grid, w.chart, links2, w.bc, cfg.params);
  const GaugeFunction gf = gauge_function(w.spec, spec2, w.grid, w.chart, 0, cfg.params);

  // similarity by the diagonal gauge action
  Eigen::SparseMatrix<cplx, Eigen::RowMajor> sim = h1.h;
  for (int r = 0; r < sim.outerSize(); ++r)
    for (Eigen::SparseMatrix<cplx, Eigen::RowMajor>::InnerIterator it(sim, r); it; ++it)
      it.valueRef() = gf.action(h1.dof_to_node[r]) * it.value() *
                      std::conj(gf.action(h1.dof_to_node[it.col()]));
  const double sim_diff = rel_entry_diff(h2.h, sim);
  man.check("gauge_similarity_entrywise", sim_diff <= 1e-13, fmt17(sim_diff));

  EigsOptions eo;
  eo.method = cfg.method;
  eo.tol = std::min(cfg.tol, 1e-10);
  eo.seed = opt.seed;
  const Spectrum s1 = eigs_lowest(h1, cfg.k, eo);
  const Spectrum s2 = eigs_lowest(h2, cfg.k, eo);
  double sd = 0;
  for (int i = 0; i < cfg.k; ++i) sd = std::max(sd, std::abs(s1.values[i] - s2.values[i]));
  man.check("gauge_spectra_agree", sd <= 1e-9, fmt17(sd));
  emit_spectra_csv(out + "/eigenvalues.csv", {0.0, 1.0}, {s1, s2});
}

void run_flux_sweep(const ExperimentConfig& cfg, const RunOptions& opt, const std::string& out,
                    RunManifest& man) {
  Workspace w = make_workspace(cfg);
  EigsOptions eo;
  eo.method = cfg.method;
  eo.tol = std::min(cfg.tol, 1e-10);
  eo.seed = opt.seed;
  auto solve_at = [&](double phi) {
    const LinkField links =
        link_phases(w.grid, w.chart, PotentialSpec::aharonov_bohm(phi), cfg.params);
    return eigs_lowest(assemble(w.grid, w.chart, links, w.bc, cfg.params), cfg.k, eo);
  };
  const std::vector<Spectrum> spectra = parallel_solve(cfg.sweep_values, opt.threads, solve_at);
  emit_spectra_csv(out + "/eigenvalues.csv", cfg.sweep_values, spectra);

  const FluxPeriodicity fp = flux_periodicity_check(w.grid, w.chart, w.bc, cfg.params,
                                                    cfg.sweep_values.front(), cfg.k, eo);
  man.check("flux_quantum_periodicity", fp.quantum_diff <= 1e-9, fmt17(fp.quantum_diff));
  man.check("half_quantum_splits", fp.half_quantum_diff > 1e-4, fmt17(fp.half_quantum_diff));
}

void run_alpha_sweep(const ExperimentConfig& cfg, const RunOptions& opt, const std::string& out,
                     RunManifest& man) {
  Workspace w = make_workspace(cfg);
  EigsOptions eo;
  eo.method = cfg.method;
  eo.tol = cfg.tol;
  eo.seed = opt.seed;
  const RobinSweep rs = robin_sweep(w.grid, w.chart, cfg.sweep_values, w.spec, cfg.params, cfg.k, eo);
  emit_spectra_csv(out + "/eigenvalues.csv", rs.sweep.values, rs.sweep.spectra);
  man.check("alpha0_matches_neumann", rs.alpha0_matches_neumann, "entrywise");
  man.check("lambda1_nonincreasing", rs.lambda1_nonincreasing, fmt17(rs.worst_increase));
}

void run_resolution_sweep(const ExperimentConfig& cfg, const RunOptions& opt,
                          const std::string& out, RunManifest& man) {
  if (cfg.sweep_values.size() < 3)
    throw std::invalid_argument("resolution sweep needs >= 3 resolutions");
  EigsOptions eo;
  eo.method = cfg.method;
  eo.tol = std::min(cfg.tol, 1e-10);
  eo.seed = opt.seed;
  const int base = cfg.kind == GridKind::Rectangle ? cfg.nx : cfg.nr;
  std::vector<ConvergenceRow> rows;
  std::vector<Spectrum> spectra;
  for (double rv : cfg.sweep_values) {
    const int res = static_cast<int>(rv);
    const Grid2D grid = cfg.build_grid_at_resolution(res, base);
    const BoundaryChart chart = boundary_chart(grid);
    double perim = 0;
    for (int c = 0; c < chart.n_components(); ++c) perim += chart.perimeter(c);
    const BoundaryCondition bc = make_bc(cfg.bc, chart, cfg.build_alpha(perim), cfg.beta);
    const LinkField links = link_phases(grid, chart, cfg.build_gauge(), cfg.params);
    const Spectrum sp = eigs_lowest(assemble(grid, chart, links, bc, cfg.params), cfg.k, eo);
    ConvergenceRow row;
    row.h = grid.kind == GridKind::Rectangle ? grid.dx : grid.dr;
    row.lambdas = sp.values;
    rows.push_back(row);
    spectra.push_back(sp);
  }
  emit_spectra_csv(out + "/eigenvalues.csv", cfg.sweep_values, spectra);
  const ConvergenceTable tab = convergence_table(rows);
  CsvTable t;
  t.header = {"h", "index", "lambda", "richardson_order"};
  for (const auto& row : tab.rows)
    for (std::size_t i = 0; i < row.lambdas.size(); ++i)
      t.add_row({fmt17(row.h), std::to_string(i), fmt17(row.lambdas[i]),
                 fmt17(tab.richardson_order[i])});
  emit_csv(t, out + "/convergence.csv");
  bool ok = true;
  double worst = 2.0;
  for (double o : tab.richardson_order) {
    if (o < 1.7 || o > 2.3) ok = false;
    if (std::abs(o - 2.0) > std::abs(worst - 2.0)) worst = o;
  }
  man.check("convergence_order", ok, fmt17(worst));
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, const RunOptions& opt, RunManifest* manifest_out) {
  const auto t0 = std::chrono::steady_clock::now();
  RunManifest man;
  man.set("version", kVersion);
  man.set("simd_backend", kernels::backend_name());
  man.set("seed", std::to_string(opt.seed));
  man.set("solver_tol", cfg.tol);
  const std::string out = opt.out_dir.empty() ? cfg.out_dir : opt.out_dir;

  try {
    fs::create_directories(out);
    std::istringstream echo(cfg.echo);
    std::string line;
    while (std::getline(echo, line))
      if (!line.empty()) man.set("config." + line.substr(0, line.find(" = ")),
                                 line.substr(line.find(" = ") + 3));

    if (opt.dump_grid || opt.dump_links) {
      Workspace w = make_workspace(cfg);
      if (opt.dump_grid) {
        std::ostringstream g;
        w.grid.dump(g);
        emit_text(g.str(), out + "/grid.csv");
      }
      if (opt.dump_links) {
        std::string s;
        char buf[120];
        for (std::size_t i = 0; i < w.links.phase.size(); ++i) {
          std::snprintf(buf, sizeof buf, "%zu,%d,%d,%.17g\n", i, w.grid.edges[i].a,
                        w.grid.edges[i].b, w.links.phase[i]);
          s += buf;
        }
        emit_text(s, out + "/links.csv");
      }
    }

    if (!cfg.compare.empty()) {
      run_compare(cfg, opt, out, man);
    } else {
      switch (cfg.sweep) {
        case SweepParameter::None: run_single(cfg, opt, out, man); break;
        case SweepParameter::Phi: run_flux_sweep(cfg, opt, out, man); break;
        case SweepParameter::Alpha: run_alpha_sweep(cfg, opt, out, man); break;
        case SweepParameter::Resolution: run_resolution_sweep(cfg, opt, out, man); break;
      }
    }
  } catch (const std::exception& ex) {
    man.ok = false;
    man.set("error", ex.what());
  }

  const auto t1 = std::chrono::steady_clock::now();
  man.set("wall_clock_s", std::chrono::duration<double>(t1 - t0).count());
  try {
    fs::create_directories(out);
    emit_text(man.text(), out + "/manifest.txt");
  } catch (const std::exception&) {
    // manifest best effort; the exit status still reports the failure
  }
  if (manifest_out) *manifest_out = man;
  return man.ok ? 0 : 1;
}

}  // namespace magbill
