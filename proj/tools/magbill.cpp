// magbill: spectra of discrete magnetic billiards with configurable quantum
// boundary conditions.
//
//   magbill run <config>    execute the configured experiment
//   magbill check <config>  validate a configuration only
//   magbill sae1d ...       1D interval spectra for unitary boundary data

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "magbill/csv.hpp"
#include "magbill/runner.hpp"
#include "magbill/selfadjoint1d.hpp"

namespace {

int env_threads() {
  if (const char* v = std::getenv("MAGBILL_THREADS")) return std::atoi(v);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"magbill - quantum magnetic billiard workbench"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = env_threads();
  std::uint64_t seed = 12345;
  bool dump_grid = false, dump_links = false, dump_matrix = false;

  CLI::App* run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--out", out_dir, "output directory (overrides [output])");
  run->add_option("--threads", threads, "sweep concurrency (env MAGBILL_THREADS)");
  run->add_option("--seed", seed, "solver start-vector seed");
  run->add_flag("--dump-grid", dump_grid, "write grid.csv (index,class,x,y,weight)");
  run->add_flag("--dump-links", dump_links, "write links.csv (edge_index,node_i,node_j,phase)");
  run->add_flag("--dump-matrix", dump_matrix, "write matrix.csv (row,col,re,im) and weights.txt");

  CLI::App* check = app.add_subcommand("check", "validate a config and exit");
  check->add_option("config", config_path, "config file")->required();

  CLI::App* sae = app.add_subcommand("sae1d", "1D self-adjoint boundary families on a segment");
  double theta = 0;
  std::string theta_sweep, umat;
  double length = 3.14159265358979323846;
  int n1d = 2000, k1d = 3;
  double tol1d = 1e-9;
  double a_const = 0, a_sin = 0;
  std::string sae_out;
  sae->add_option("--theta", theta, "scalar family U = exp(i theta) I");
  sae->add_option("--theta-sweep", theta_sweep, "sweep start:stop:count");
  sae->add_option("--U", umat, "2x2 unitary, row major re,im x4");
  sae->add_option("--length", length, "segment length");
  sae->add_option("--n", n1d, "grid cells");
  sae->add_option("--k", k1d, "eigenvalue count");
  sae->add_option("--tol", tol1d, "solver tolerance");
  sae->add_option("--a-const", a_const, "constant 1D vector potential");
  sae->add_option("--a-sin", a_sin, "add amp*sin(x) to the 1D vector potential");
  sae->add_option("--out", sae_out, "write eigenvalues.csv into this directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) {
      magbill::parse_config_file(config_path);
      std::cout << "config ok\n";
      return 0;
    }
    if (*run) {
      const magbill::ExperimentConfig cfg = magbill::parse_config_file(config_path);
      magbill::RunOptions opt;
      opt.out_dir = out_dir;
      opt.threads = threads;
      opt.seed = seed;
      opt.dump_grid = dump_grid;
      opt.dump_links = dump_links;
      opt.dump_matrix = dump_matrix;
      magbill::RunManifest man;
      const int rc = magbill::run_experiment(cfg, opt, &man);
      std::cout << man.text();
      return rc;
    }

    // sae1d
    magbill::PhysicalParams params;
    magbill::Potential1D pot;
    if (a_const != 0 || a_sin != 0)
      pot = [a_const, a_sin](double x) { return a_const + a_sin * std::sin(x); };

    auto u_of_theta = [](double th) {
      Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
      u *= std::polar(1.0, th);
      return u;
    };

    std::vector<double> thetas;
    if (!theta_sweep.empty()) {
      double lo, hi;
      int cnt;
      if (std::sscanf(theta_sweep.c_str(), "%lf:%lf:%d", &lo, &hi, &cnt) != 3 || cnt < 2)
        throw std::invalid_argument("--theta-sweep expects start:stop:count");
      for (int i = 0; i < cnt; ++i) thetas.push_back(lo + (hi - lo) * i / (cnt - 1));
    } else if (umat.empty()) {
      thetas.push_back(theta);
    }

    magbill::EigsOptions eo;
    eo.tol = tol1d;
    magbill::CsvTable table;
    table.header = {"param_value", "index", "lambda", "residual"};

    auto report = [&](double pv, const magbill::Spectrum& sp) {
      for (std::size_t i = 0; i < sp.values.size(); ++i) {
        table.add_row({magbill::fmt17(pv), std::to_string(i), magbill::fmt17(sp.values[i]),
                       magbill::fmt17(sp.residuals[i])});
        std::cout << "param " << pv << "  lambda[" << i << "] = " << sp.values[i] << "\n";
      }
    };

    if (!umat.empty()) {
      double v[8];
      if (std::sscanf(umat.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &v[0], &v[1], &v[2], &v[3],
                      &v[4], &v[5], &v[6], &v[7]) != 8)
        throw std::invalid_argument("--U expects 8 comma-separated reals");
      Eigen::Matrix2cd u;
      u << magbill::cplx{v[0], v[1]}, magbill::cplx{v[2], v[3]}, magbill::cplx{v[4], v[5]},
          magbill::cplx{v[6], v[7]};
      const magbill::UnitaryBC bc = magbill::bc_from_unitary(u);
      report(0.0, magbill::interval_spectrum(bc, pot, length, n1d, k1d, params, eo));
    } else {
      for (double th : thetas) {
        const magbill::UnitaryBC bc = magbill::bc_from_unitary(u_of_theta(th));
        report(th, magbill::interval_spectrum(bc, pot, length, n1d, k1d, params, eo));
      }
    }

    if (pot) {
      // gauge-away cross-check: spectra with A and with A gauged to zero
      const magbill::UnitaryBC bc =
          magbill::bc_from_unitary(u_of_theta(thetas.empty() ? 0.0 : thetas[0]));
      const magbill::GaugeFunction1D chi = magbill::gauge_away_1d(pot, length, n1d, params);
      const magbill::Spectrum sa = magbill::interval_spectrum(bc, pot, length, n1d, k1d, params, eo);
      const magbill::Spectrum s0 = magbill::interval_spectrum(
          magbill::transform_bc_1d(bc, chi), nullptr, length, n1d, k1d, params, eo);
      double d = 0;
      for (int i = 0; i < k1d; ++i) d = std::max(d, std::abs(sa.values[i] - s0.values[i]));
      std::cout << "gauge-away spectral deviation: " << d << "\n";
    }

    if (!sae_out.empty()) {
      std::filesystem::create_directories(sae_out);
      magbill::emit_csv(table, sae_out + "/eigenvalues.csv");
    }
    return 0;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
}
