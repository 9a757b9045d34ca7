#include "biharm/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "biharm/analysis.hpp"
#include "biharm/evolution.hpp"
#include "biharm/forms.hpp"
#include "biharm/spectral.hpp"
#include "biharm/version.hpp"

namespace biharm::cli {

namespace {

using config::RunConfig;
using config::RunManifest;
using report::ordered_json;

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

RunManifest start_manifest(const RunConfig& cfg) {
  RunManifest m;
  m.config_hash = config::hex64(cfg.config_hash());
  m.run_id = config::hex64(cfg.config_hash() ^ cfg.seed);
  m.timestamp = iso_timestamp();
  m.tool_version = std::string(kToolName) + " " + kToolVersion;
  m.config_copy = cfg.canonical_dump();
  return m;
}

void finish_manifest(const RunConfig& cfg, RunManifest& m) {
  // the manifest itself is written last and not self-referential
  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream out(std::filesystem::path(cfg.out_dir) / "manifest.json");
  out << m.to_json().dump(2) << "\n";
}

ordered_json params_json(const params::OperatorParams& p) {
  ordered_json j;
  j["N"] = p.N;
  j["alpha"] = p.alpha;
  j["beta"] = p.beta;
  j["lambda"] = p.lambda;
  if (p.lambda0) j["lambda0"] = *p.lambda0;
  return j;
}

analysis::CheckContext context_from(const RunConfig& cfg) {
  auto p = cfg.operator_params();
  testfn::FamilySpec spec;
  spec.seed = cfg.seed;
  spec.n_combos = cfg.n_combos;
  spec.gauss_p = cfg.gauss_p;
  spec.gauss_sigma = cfg.gauss_sigma;
  spec.rational_p = cfg.rational_p;
  spec.rational_q_count = cfg.rational_q_count;
  auto ctx = analysis::make_context(p, grid::build_grid(cfg.grid_r_min, cfg.grid_r_max, cfg.grid_n),
                                    spec, cfg.threads);
  ctx.tol_identity = cfg.tol_identity;
  ctx.tol_stima = cfg.tol_stima;
  ctx.tol_margin = cfg.tol_margin;
  ctx.tol_rellich = cfg.tol_rellich;
  ctx.mc_points = cfg.mc_points;
  ctx.reverse_holder_extra_q = cfg.reverse_holder_q_extra;
  return ctx;
}

int write_report_bundle(const RunConfig& cfg, const std::string& command,
                        const analysis::CheckContext& ctx,
                        const std::vector<report::InequalityReport>& reports,
                        const std::vector<report::ConstantEstimate>& constants,
                        const std::string& json_name,
                        const ordered_json& extra = ordered_json::object()) {
  int n_pass = 0, n_fail = 0, n_skip = 0;
  for (const auto& r : reports) {
    if (r.status == "pass") ++n_pass;
    if (r.status == "fail") ++n_fail;
    if (r.status == "skipped") ++n_skip;
    std::printf("%-32s %-7s margin=%.3e tol=%.1e %s\n", r.id.c_str(), r.status.c_str(), r.margin,
                r.tolerance, r.worst_sample.c_str());
  }
  std::printf("%s: %d pass, %d fail, %d skipped\n", command.c_str(), n_pass, n_fail, n_skip);

  ordered_json j;
  j["schema_version"] = report::kSchemaVersion;
  j["command"] = command;
  j["params"] = params_json(ctx.params);
  j["family_size"] = static_cast<int>(ctx.family.size());
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  auto arr = ordered_json::array();
  for (const auto& r : reports) arr.push_back(report::to_json(r));
  j["reports"] = arr;
  auto carr = ordered_json::array();
  for (const auto& c : constants) carr.push_back(report::to_json(c));
  j["constants"] = carr;
  ordered_json summary;
  summary["pass"] = n_pass;
  summary["fail"] = n_fail;
  summary["skipped"] = n_skip;
  j["summary"] = summary;

  auto manifest = start_manifest(cfg);
  config::write_artifact(cfg.out_dir, json_name, j.dump(2) + "\n", manifest);
  finish_manifest(cfg, manifest);
  return n_fail > 0 ? 1 : 0;
}

std::vector<double> initial_state(const RunConfig& cfg, const op::SectorOperator& so,
                                  const spectral::SectorEigenpairs& sol, int index) {
  const int n = so.n();
  std::vector<double> u0(static_cast<std::size_t>(n), 0.0);
  if (cfg.evolve_initial == "zero") return u0;
  if (cfg.evolve_initial == "eigenvector") {
    return sol.vectors[static_cast<std::size_t>(index % static_cast<int>(sol.vectors.size()))];
  }
  const int p = 4 + index % 5;
  const double sigmas[4] = {1.0, 0.5, 2.0, 0.25};
  const auto f = testfn::TestFunction::power_gaussian(p, sigmas[index % 4]);
  for (int i = 0; i < n; ++i) {
    u0[static_cast<std::size_t>(i)] = f(so.quad.grid.nodes[static_cast<std::size_t>(i)]);
  }
  return u0;
}

}  // namespace

int cmd_verify(const RunConfig& cfg) {
  cfg.validate();
  const auto ctx = context_from(cfg);
  std::vector<report::ConstantEstimate> constants;
  const auto reports = analysis::run_verify_suite(ctx, &constants);
  ordered_json extra;
  if (ctx.params.alpha > 0.0) {
    // the lambda0 search bundle this run used
    const auto l0 = analysis::lambda0_search(ctx.params);
    ordered_json lj;
    lj["lambda0"] = l0.lambda0;
    lj["c0"] = l0.c0;
    lj["k"] = l0.k;
    lj["argmin_r"] = l0.argmin_r;
    extra["lambda0_search"] = lj;
  }
  return write_report_bundle(cfg, "verify", ctx, reports, constants, "verify_report.json", extra);
}

int cmd_form_check(const RunConfig& cfg) {
  cfg.validate();
  const auto ctx = context_from(cfg);
  std::vector<report::ConstantEstimate> constants;
  std::vector<report::InequalityReport> reports;
  reports.push_back(analysis::form_identity_check(ctx, 20));
  if (ctx.params.lambda0) {
    reports.push_back(analysis::accretivity_check(ctx));
  } else {
    reports.push_back(report::InequalityReport::skipped(
        "accretivity", "lambda0 undefined in the degenerate alpha=0 case"));
  }
  report::ConstantEstimate est;
  reports.push_back(analysis::continuity_check(ctx, &est));
  constants.push_back(est);
  reports.push_back(analysis::norm_equivalence_check(ctx, &est));
  constants.push_back(est);
  return write_report_bundle(cfg, "form-check", ctx, reports, constants, "form_report.json");
}

int cmd_constants(const RunConfig& cfg) {
  cfg.validate();
  const auto ctx = context_from(cfg);
  const auto table = analysis::constants_table(ctx);
  for (const auto& e : table) {
    std::printf("%-28s %-4s %s\n", e.name.c_str(), e.direction.c_str(),
                report::number_repr(e.value).c_str());
  }
  ordered_json j;
  j["schema_version"] = report::kSchemaVersion;
  j["command"] = "constants";
  j["params"] = params_json(ctx.params);
  auto arr = ordered_json::array();
  for (const auto& e : table) arr.push_back(report::to_json(e));
  j["constants"] = arr;

  auto manifest = start_manifest(cfg);
  config::write_artifact(cfg.out_dir, "constants.json", j.dump(2) + "\n", manifest);
  config::write_artifact(cfg.out_dir, "constants.csv", report::constants_csv(table), manifest);
  finish_manifest(cfg, manifest);
  return 0;
}

int cmd_spectrum(const RunConfig& cfg) {
  cfg.validate();
  auto p = cfg.operator_params();
  p.validate();
  const auto g = grid::build_grid(cfg.grid_r_min, cfg.grid_r_max, cfg.grid_n);

  std::vector<spectral::SectorEigenpairs> raw;
  auto result = spectral::compute_spectrum(p, g, cfg.spectrum_l_max, cfg.spectrum_modes,
                                           cfg.spectrum_tol, cfg.threads, &raw);
  bool ok = true;
  for (const auto& m : result.modes) ok = ok && m.mu > 0.0;

  spectral::GrowthReport growth;
  const bool growth_applicable = result.modes.size() >= 20;
  if (growth_applicable) {
    growth = spectral::growth_check(result);
    ok = ok && growth.pass;
  }

  if (cfg.spectrum_refine) {
    const auto st = spectral::refinement_study(p, g, 1, cfg.spectrum_tol);
    result.refinement["mu1_coarse"] = st.mu_coarse;
    result.refinement["mu1_mid"] = st.mu_mid;
    result.refinement["mu1_fine"] = st.mu_fine;
    result.refinement["observed_order"] = st.observed_order;
    result.refinement["richardson"] = st.richardson;
    result.refinement["rel_gap_to_richardson"] = st.rel_gap_to_richardson;
    result.refinement["truncation_delta"] = st.truncation_delta;
  }
  if (cfg.spectrum_dense_oracle) {
    const int n_oracle = 201;
    const auto gc = grid::build_grid(cfg.grid_r_min, cfg.grid_r_max, n_oracle);
    const auto so = op::assemble(p, grid::build_quadrature(gc, p.N), op::SectorIndex{0, p.N});
    const auto banded = spectral::solve_sector(so, 1, cfg.spectrum_tol);
    const double dense = spectral::dense_oracle_lowest(so);
    const double delta = std::abs(banded.mu.front() - dense) / dense;
    result.refinement["dense_oracle_mu1"] = dense;
    result.refinement["dense_oracle_rel_delta"] = delta;
    ok = ok && delta <= 1e-8;
  }

  ordered_json j = report::to_json(result);
  ordered_json growth_j;
  if (growth_applicable) {
    growth_j["pass"] = growth.pass;
    growth_j["strictly_increasing"] = growth.strictly_increasing;
    growth_j["monotone_in_l"] = growth.monotone_in_l;
    growth_j["min_gap"] = growth.min_gap;
  } else {
    growth_j["skipped"] = "needs >= 20 merged eigenvalues";
  }
  j["growth"] = growth_j;

  auto manifest = start_manifest(cfg);
  config::write_artifact(cfg.out_dir, "spectrum.json", j.dump(2) + "\n", manifest);
  config::write_artifact(cfg.out_dir, "spectrum.csv", report::spectrum_csv(result), manifest);
  finish_manifest(cfg, manifest);

  std::printf("spectrum: %zu modes across %d sectors, mu1=%s, growth=%s\n", result.modes.size(),
              cfg.spectrum_l_max + 1, report::number_repr(result.modes.front().mu).c_str(),
              growth_applicable ? (growth.pass ? "pass" : "fail") : "skipped");
  return ok ? 0 : 1;
}

int cmd_evolve(const RunConfig& cfg) {
  cfg.validate();
  auto p = cfg.operator_params();
  if (!cfg.lambda) {
    // missing lambda falls back to the computed lambda0
    const auto l0 = analysis::lambda0_search(p);
    p.lambda = l0.lambda0;
    p.lambda0 = l0.lambda0;
  }
  const auto g = grid::build_grid(cfg.grid_r_min, cfg.grid_r_max, cfg.grid_n);
  const auto quad = grid::build_quadrature(g, p.N);
  const auto so = op::assemble(p, quad, op::SectorIndex{0, p.N});
  const auto sol = spectral::solve_sector(so, 3, cfg.spectrum_tol);
  const double mu1 = sol.mu.front();
  const double rate = mu1 + p.lambda;
  const double dt = cfg.evolve_dt.value_or(0.1 / rate);
  const double T = cfg.evolve_T.value_or(10.0 / rate);
  const auto scheme = evolution::scheme_from_string(cfg.evolve_scheme);

  bool ok = true;
  ordered_json trajs = ordered_json::array();
  report::TrajectoryResult first;
  for (int k = 0; k < cfg.evolve_trajectories; ++k) {
    const auto u0 = initial_state(cfg, so, sol, k);
    const auto traj = evolution::evolve(so, u0, T, dt, p.lambda, scheme);
    const auto contraction = evolution::contraction_check(traj);
    if (scheme == evolution::Scheme::ImplicitEuler && traj.norm_plain.front() > 0.0) {
      ok = ok && contraction.pass;
    }
    ordered_json tj;
    tj["index"] = k;
    tj["contraction_pass"] = contraction.pass;
    tj["worst_growth"] = contraction.worst_growth;
    if (traj.norm_plain.front() > 0.0) {
      try {
        tj["decay_slope"] = evolution::decay_rate(traj);
        tj["expected_slope"] = -rate;
      } catch (const std::exception& e) {
        tj["decay_slope_unavailable"] = e.what();
      }
    }
    trajs.push_back(tj);
    if (k == 0) first = traj;
  }

  ordered_json j = report::to_json(first);
  j["mu1"] = mu1;
  j["trajectories"] = trajs;

  auto manifest = start_manifest(cfg);
  config::write_artifact(cfg.out_dir, "trajectory.csv", report::trajectory_csv(first), manifest);
  config::write_artifact(cfg.out_dir, "evolve_report.json", j.dump(2) + "\n", manifest);
  finish_manifest(cfg, manifest);

  std::printf("evolve: %d trajectories, scheme=%s, dt=%s, contraction=%s\n",
              cfg.evolve_trajectories, cfg.evolve_scheme.c_str(),
              report::number_repr(dt).c_str(), ok ? "pass" : "fail");
  return ok ? 0 : 1;
}

int run_cli(int argc, char** argv) {
  CLI::App app{std::string(kToolName) +
               ": desk-scale verification of a fourth-order Schrodinger-type operator"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  bool have_seed = false, have_threads = false, dense_oracle = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file (key = value)");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "family RNG seed override")->each([&](const std::string&) {
      have_seed = true;
    });
    sub->add_option("--threads", threads, "worker threads")->each([&](const std::string&) {
      have_threads = true;
    });
  };

  auto* verify = app.add_subcommand("verify", "run the full identity/inequality suite");
  auto* spectrum = app.add_subcommand("spectrum", "compute the sector spectra");
  spectrum->add_flag("--dense-oracle", dense_oracle, "cross-check mu1 against a dense solve");
  auto* evolve = app.add_subcommand("evolve", "simulate the semigroup");
  auto* constants = app.add_subcommand("constants", "tabulate all constant estimates");
  auto* form_check = app.add_subcommand("form-check", "form identity/accretivity subset");
  for (auto* sub : {verify, spectrum, evolve, constants, form_check}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = RunConfig::from_file(config_path);
    cfg.apply_env_overrides();
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (have_seed) cfg.seed = seed;
    if (have_threads) cfg.threads = threads;
    if (dense_oracle) cfg.spectrum_dense_oracle = true;

    if (app.got_subcommand(verify)) return cmd_verify(cfg);
    if (app.got_subcommand(spectrum)) return cmd_spectrum(cfg);
    if (app.got_subcommand(evolve)) return cmd_evolve(cfg);
    if (app.got_subcommand(constants)) return cmd_constants(cfg);
    if (app.got_subcommand(form_check)) return cmd_form_check(cfg);
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace biharm::cli
