#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pbc/control.hpp"
#include "pbc/kernels.hpp"
#include "pbc/particles.hpp"
#include "pbc/reference.hpp"

namespace pbc {

/// amplitude * exp(-decay * x^2)
struct GaussianProfile {
  double amplitude = 0.0;
  double decay = 1.0;

  double operator()(double x) const { return amplitude * std::exp(-decay * x * x); }
  std::function<double(double)> function() const { return *this; }
  bool operator==(const GaussianProfile&) const = default;
};

/// Every tunable of the experiments. Defaults reproduce the published setting.
struct ProblemConfig {
  double nu = 1.0;
  double t_final = 1.0;
  int n_steps = 500;
  double sigma = 0.05;
  double u_lower = 0.0;
  double u_upper = 100.0;
  GaussianProfile y0{0.0, 1.0};
  GaussianProfile y_d{10.0, 2.0};
  GaussianProfile chi{1.0, 5.0};

  double h = 0.1;
  double epsilon = 0.3;
  double seed_lo = -5.0;
  double seed_hi = 5.0;
  double seed_margin = 2.0;
  double blowup_cap = 1e6;

  double ref_half_width = 12.0;
  double ref_spacing = 2e-3;
  double error_lo = -5.0;
  double error_hi = 5.0;

  double gradient_tol = 1e-3;
  int max_iterations = 200;
  double initial_step = 1.0;
  double contraction = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 30;

  std::vector<double> verify_eps{0.05, 0.1, 0.3, 1.0};
  double verify_tol = 1e-10;
  std::vector<double> sweep_eps{0.5, 0.4, 0.3, 0.2, 0.15, 0.1};
  double sweep_eps_h = 0.1;
  std::vector<double> sweep_inv_h{10, 20, 50, 100};
  double sweep_h_eps = 0.1;
  std::vector<double> sweep_coupled_h{0.2, 0.1, 0.05, 0.025};

  std::string output_dir = "out";
  std::string cache_dir;  ///< reference cache; empty means <output_dir>/cache

  /// Throws ConfigError on invalid combinations.
  void validate() const;

  /// Applies one `key=value` assignment. Throws ConfigError for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);

  TimeGrid grid() const { return {t_final, n_steps}; }
  KernelSpec kernel() const { return KernelSpec::gaussian(epsilon); }
  SeedLayout layout() const { return {seed_lo, seed_hi, h, seed_margin}; }
  OptimizerSettings optimizer() const;
  ReferenceSettings reference() const;
  ControlFunction initial_control() const;
  std::string resolved_cache_dir() const;

  /// FNV-1a hash of the settings that determine the reference optimum.
  std::uint64_t reference_hash() const;

  bool operator==(const ProblemConfig&) const = default;
};

/// Flat `key = value` text, `#` starts a comment.
ProblemConfig parse_config(std::istream& in);
ProblemConfig load_config(const std::string& path);
void serialize_config(std::ostream& out, const ProblemConfig& config);
std::string serialize_config(const ProblemConfig& config);

}  // namespace pbc
