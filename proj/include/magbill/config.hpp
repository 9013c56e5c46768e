#pragma once

// Line-oriented [section] / key = value experiment configuration. Unknown
// keys, duplicate keys and inadmissible combinations are hard errors.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "magbill/boundary.hpp"
#include "magbill/gauge.hpp"
#include "magbill/geometry.hpp"
#include "magbill/spectral.hpp"

namespace magbill {

enum class SweepParameter { None, Phi, Alpha, Resolution };

struct ExperimentConfig {
  // [domain]
  GridKind kind = GridKind::Rectangle;
  double a = 1.0, b = 1.0;        // rectangle
  double r = 1.0;                 // disk
  double r_in = 0.5, r_out = 1.0; // annulus
  int nx = 32, ny = 32, nr = 32, ntheta = 64;

  // [gauge]
  std::string gauge = "none";    // none|landau|symmetric|ab|sum
  double field_b = 0.0;
  double phi = 0.0;
  std::string compare;           // optional second variant for covariance runs

  // [bc]
  BcFamily bc = BcFamily::Dirichlet;
  std::string alpha_expr = "0";  // float or cos:<amp> / sin:<amp>
  double beta = 0.0;

  // [physics]
  PhysicalParams params;

  // [solver]
  SolveMethod method = SolveMethod::Iterative;
  int k = 5;
  double tol = 1e-9;

  // [sweep]
  SweepParameter sweep = SweepParameter::None;
  std::vector<double> sweep_values;

  // [output]
  std::string out_dir = "out";

  std::string echo;  // normalized config text for the manifest

  Grid2D build_grid() const;
  Grid2D build_grid_at_resolution(int scale_num, int scale_den) const;
  PotentialSpec build_gauge() const;
  PotentialSpec build_compare_gauge() const;
  AlphaFn build_alpha(double perimeter) const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

}  // namespace magbill
