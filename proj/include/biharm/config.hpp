#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "biharm/params.hpp"
#include "biharm/report.hpp"
#include "biharm/testfn.hpp"

namespace biharm::config {

/// Flat key = value configuration with dotted sections. Unknown keys are
/// rejected. Values for operator.lambda / operator.lambda0 may be "auto".
struct RunConfig {
  int N = 9;
  double alpha = 1.0;
  double beta = 2.0;
  std::optional<double> lambda;   // unset => fall back to computed lambda0
  std::optional<double> lambda0;  // unset => computed by lambda0_search

  double grid_r_min = 1e-3;
  double grid_r_max = 30.0;
  int grid_n = 2001;

  std::uint64_t seed = 42;
  int n_combos = 50;
  std::vector<int> gauss_p = {4, 5, 6, 7, 8};
  std::vector<double> gauss_sigma = {0.25, 0.5, 1.0, 2.0};
  std::vector<int> rational_p = {4, 6};
  int rational_q_count = 2;

  double tol_identity = 1e-6;
  double tol_stima = 1e-7;
  double tol_margin = 1e-8;
  double tol_rellich = 1e-6;

  int spectrum_l_max = 6;
  int spectrum_modes = 10;
  double spectrum_tol = 1e-8;
  bool spectrum_dense_oracle = false;
  bool spectrum_refine = true;

  std::string evolve_scheme = "implicit-euler";
  std::optional<double> evolve_T;   // unset => 10 / (mu1 + lambda)
  std::optional<double> evolve_dt;  // unset => 0.1 / (mu1 + lambda)
  std::string evolve_initial = "gaussian";  // gaussian | eigenvector | zero
  int evolve_trajectories = 1;

  int mc_points = 100000;
  std::vector<double> reverse_holder_q_extra;  // extra reverse-Hoelder exponents
  std::string out_dir = "biharmlab_out";
  int threads = 1;

  params::OperatorParams operator_params() const;
  void validate() const;  // throws std::invalid_argument on bad combinations

  /// Sorted canonical "key = value" text; hashed for the manifest.
  std::string canonical_dump() const;
  std::uint64_t config_hash() const;

  static RunConfig from_file(const std::string& path);  // throws on malformed input
  static RunConfig from_text(const std::string& text);
  /// BIHARMLAB_<SECTION>_<KEY> environment overrides, applied over *this.
  void apply_env_overrides();
  void set_key(const std::string& key, const std::string& value);  // throws on unknown key
};

struct Artifact {
  std::string name;
  std::size_t bytes = 0;
  std::string checksum;  // fnv1a-64 hex of the content
};

struct RunManifest {
  std::string run_id;
  std::string timestamp;  // the only field allowed to differ between reruns
  std::string config_hash;
  std::string tool_version;
  std::string config_copy;
  std::vector<Artifact> artifacts;

  report::ordered_json to_json() const;
};

std::uint64_t fnv1a(const std::string& data);
std::string hex64(std::uint64_t v);

/// Writes content to dir/name (creating dir), records it in the manifest.
void write_artifact(const std::string& dir, const std::string& name, const std::string& content,
                    RunManifest& manifest);

}  // namespace biharm::config
