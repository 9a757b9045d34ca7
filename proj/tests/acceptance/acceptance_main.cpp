// Acceptance gate: runs every quantitative criterion at its stated
// tolerance and prints one pass/fail line per criterion.
//
// Usage: acceptance_suite [path-to-biharmlab-binary]
// The binary path is needed by the byte-determinism criterion; it is
// normally supplied by ctest.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "biharm/analysis.hpp"
#include "biharm/evolution.hpp"
#include "biharm/spectral.hpp"

using namespace biharm;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string g_binary;

analysis::CheckContext make_ctx(int N, int n_combos, int grid_n = 2001) {
  params::OperatorParams p;
  p.N = N;
  p.alpha = 1.0;
  p.beta = 2.0;
  testfn::FamilySpec spec;
  spec.n_combos = n_combos;
  auto ctx = analysis::make_context(p, grid::build_grid(1e-3, 30.0, grid_n), spec);
  ctx.mc_points = 100000;
  return ctx;
}

// shared contexts (setup cost charged to the first criterion using them)
analysis::CheckContext& ctx9() {
  static auto c = make_ctx(9, 76);  // 24 base members + 76 combos = 100
  return c;
}
analysis::CheckContext& ctx11() {
  static auto c = make_ctx(11, 50);
  return c;
}
analysis::CheckContext& ctx5() {
  static auto c = make_ctx(5, 50);
  return c;
}

Outcome criterion_form_identity() {
  const auto rep = analysis::form_identity_check(ctx9(), 20);
  std::ostringstream os;
  os << "worst residual " << rep.details.at("worst_residual") << " on 20 pairs";
  return {rep.status == "pass", os.str()};
}

Outcome criterion_accretivity() {
  const auto& c = ctx9();
  if (c.family.size() < 100) return {false, "family smaller than 100 members"};
  const auto rep = analysis::accretivity_check(c);
  std::ostringstream os;
  os << "worst gap/||u||^2 = " << rep.margin << " over " << c.family.size()
     << " members at lambda0=" << c.params.lambda;
  return {rep.status == "pass", os.str()};
}

Outcome criterion_lemma21() {
  bool ok = true;
  double worst_resid = 0.0, worst_margin = 0.0;
  for (auto* ctx : {&ctx5(), &ctx9(), &ctx11()}) {
    for (double gamma : {1.0, 2.0, 3.0, 4.0}) {  // includes 2*alpha=2, 2*beta=4
      const auto sr = analysis::stima_identity_check(*ctx, gamma);
      const auto lr = analysis::lemma21_check(*ctx, gamma);
      ok = ok && sr.status == "pass" && lr.status == "pass";
      worst_resid = std::max(worst_resid, -sr.margin);
      worst_margin = std::min(worst_margin, lr.margin);
    }
  }
  std::ostringstream os;
  os << "stima residual <= " << worst_resid << ", lemma margin >= " << worst_margin
     << " over N in {5,9,11}";
  return {ok, os.str()};
}

Outcome criterion_rellich() {
  bool ok = true;
  std::ostringstream os;
  for (auto* ctx : {&ctx5(), &ctx9()}) {
    const auto rep = analysis::rellich_check(*ctx);
    ok = ok && rep.status == "pass";
    os << "N=" << ctx->params.N << " inf=" << rep.details.at("family_inf")
       << " sharp=" << rep.details.at("sharp") << "  ";
  }
  return {ok, os.str()};
}

Outcome criterion_duality() {
  const auto rep = analysis::duality_check(ctx9(), 20);
  std::ostringstream os;
  os << "worst residual " << rep.details.at("worst_residual") << " on 20 pairs";
  return {rep.status == "pass", os.str()};
}

Outcome criterion_section3_chain() {
  bool ok = true;
  std::ostringstream os;
  for (auto* ctx : {&ctx9(), &ctx11()}) {
    std::vector<report::InequalityReport> reps;
    for (int h : {1, 2, 3}) {
      reps.push_back(analysis::weighted_interp_check(*ctx, 2.0 * ctx->params.alpha - (4 - h), h));
    }
    for (int which : {3, 2, 1}) reps.push_back(analysis::chain_check(*ctx, which));
    reps.push_back(analysis::weighted_cz_check(*ctx));
    reps.push_back(analysis::potential_estimate_check(*ctx));
    reps.push_back(analysis::d2_apriori_check(*ctx));
    reps.push_back(analysis::remark35_check(*ctx));
    for (const auto& r : reps) {
      ok = ok && r.status != "fail";
      if (r.status == "fail") os << r.id << "@N=" << ctx->params.N << " failed  ";
    }
  }
  if (ok) os << "all section-3 margins/estimates healthy for N in {9,11}";
  return {ok, os.str()};
}

Outcome criterion_spectrum() {
  params::OperatorParams p;
  p.N = 9;
  p.alpha = 1.0;
  p.beta = 2.0;
  const auto g = grid::build_grid(1e-3, 30.0, 2001);
  const auto result = spectral::compute_spectrum(p, g, 6, 10, 1e-8);
  bool ok = result.modes.size() == 70;
  for (const auto& m : result.modes) ok = ok && m.mu > 0.0;
  const auto growth = spectral::growth_check(result);
  ok = ok && growth.pass;

  // dense oracle on the coarse grid
  const auto gc = grid::build_grid(1e-3, 30.0, 201);
  const auto so = op::assemble(p, grid::build_quadrature(gc, p.N), op::SectorIndex{0, p.N});
  const auto banded = spectral::solve_sector(so, 1, 1e-8);
  const double dense = spectral::dense_oracle_lowest(so);
  const double oracle_delta = std::abs(banded.mu.front() - dense) / dense;
  ok = ok && oracle_delta <= 1e-8;

  const auto st = spectral::refinement_study(p, g, 1, 1e-8);
  ok = ok && st.rel_gap_to_richardson <= 5e-4;  // three significant digits

  std::ostringstream os;
  os << "mu1=" << result.modes.front().mu << ", oracle delta=" << oracle_delta
     << ", Richardson gap=" << st.rel_gap_to_richardson << ", 70 modes increasing="
     << (growth.strictly_increasing ? "yes" : "no");
  return {ok, os.str()};
}

Outcome criterion_semigroup() {
  params::OperatorParams p;
  p.N = 9;
  p.alpha = 1.0;
  p.beta = 2.0;
  const auto l0 = analysis::lambda0_search(p);
  p.lambda = l0.lambda0;
  const auto g = grid::build_grid(1e-3, 30.0, 1001);
  const auto so = op::assemble(p, grid::build_quadrature(g, p.N), op::SectorIndex{0, p.N});
  const auto sol = spectral::solve_sector(so, 1, 1e-8);
  const double rate = sol.mu.front() + p.lambda;
  bool ok = true;
  std::ostringstream os;

  // contraction at every step on 10 trajectories
  testfn::FamilySpec spec;
  spec.n_combos = 4;
  const auto fam = testfn::make_family(spec, p.beta, p.N);
  double worst_growth = 0.0;
  for (int k = 0; k < 10; ++k) {
    std::vector<double> u0(static_cast<std::size_t>(so.n()));
    for (int i = 0; i < so.n(); ++i) {
      u0[static_cast<std::size_t>(i)] =
          fam[static_cast<std::size_t>(k)](so.quad.grid.nodes[static_cast<std::size_t>(i)]);
    }
    const auto traj = evolution::evolve(so, u0, 10.0 / rate, 0.1 / rate, p.lambda,
                                        evolution::Scheme::ImplicitEuler);
    const auto rep = evolution::contraction_check(traj);
    ok = ok && rep.pass;
    worst_growth = std::max(worst_growth, rep.worst_growth);
  }

  // decay slope after dt refinement (generic data, 2%)
  {
    std::vector<double> u0(static_cast<std::size_t>(so.n()));
    const auto f = testfn::TestFunction::power_gaussian(4, 1.0);
    for (int i = 0; i < so.n(); ++i) {
      u0[static_cast<std::size_t>(i)] = f(so.quad.grid.nodes[static_cast<std::size_t>(i)]);
    }
    auto slope = [&](double dt) {
      const auto t = evolution::evolve(so, u0, 10.0 / rate, dt, p.lambda,
                                       evolution::Scheme::ImplicitEuler);
      return evolution::decay_rate(t);
    };
    const double s1 = slope(0.1 / rate);
    const double s2 = slope(0.05 / rate);
    const double extrap = 2.0 * s2 - s1;
    const double err = std::abs(extrap + rate) / rate;
    ok = ok && err <= 0.02;
    os << "slope err " << err << ", worst step growth " << worst_growth;

    // composition property: exact with the same stepping
    const double dt = 0.1 / rate, T = 2.0 / rate;
    const auto full = evolution::evolve(so, u0, 2 * T, dt, p.lambda,
                                        evolution::Scheme::ImplicitEuler);
    const auto half = evolution::evolve(so, u0, T, dt, p.lambda,
                                        evolution::Scheme::ImplicitEuler);
    const auto rest = evolution::evolve(so, half.final_state, T, dt, p.lambda,
                                        evolution::Scheme::ImplicitEuler);
    for (std::size_t i = 0; i < u0.size(); ++i) {
      ok = ok && full.final_state[i] == rest.final_state[i];
    }
    // and approximate composition within scheme order against dt/8
    const auto ref = evolution::evolve(so, u0, 2 * T, dt / 8.0, p.lambda,
                                       evolution::Scheme::ImplicitEuler);
    std::vector<double> diff(u0.size()), diff2(u0.size());
    const auto coarse2 = evolution::evolve(so, u0, 2 * T, dt / 2.0, p.lambda,
                                           evolution::Scheme::ImplicitEuler);
    for (std::size_t i = 0; i < u0.size(); ++i) {
      diff[i] = full.final_state[i] - ref.final_state[i];
      diff2[i] = coarse2.final_state[i] - ref.final_state[i];
    }
    const double e1 = so.quad.norm(diff), e2 = so.quad.norm(diff2);
    const double order = std::log2(e1 / std::max(e2, 1e-300));
    ok = ok && order > 0.7;  // first-order composition error vanishing under refinement
    os << ", composition order " << order;
  }
  return {ok, os.str()};
}

Outcome criterion_potential_geometry() {
  const auto& c = ctx9();
  bool ok = true;
  std::ostringstream os;
  const auto rh = analysis::reverse_holder_check(c);
  ok = ok && rh.status == "pass";
  os << "B_{N/2} sup " << rh.details.at("B_q_constant") << " (delta "
     << rh.details.at("stability_delta") << ")";
  const auto mf = analysis::m_function_check(c);
  ok = ok && mf.status == "pass";
  os << ", C_sugano " << mf.details.at("C_sugano");
  const auto tv = analysis::tilde_v_bounds_check(c, 1000);
  ok = ok && tv.status == "pass";
  os << ", sandwich [" << tv.details.at("C1") << ", " << tv.details.at("C2") << "]";
  return {ok, os.str()};
}

std::string strip_timestamp_lines(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find("timestamp") != std::string::npos) continue;
    out << line << "\n";
  }
  return out.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion_determinism() {
  if (g_binary.empty() || !fs::exists(g_binary)) {
    return {false, "biharmlab binary path not supplied (argv[1])"};
  }
  const fs::path tmp = fs::temp_directory_path() / "biharmlab_acceptance";
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  const fs::path cfgp = tmp / "det.conf";
  {
    std::ofstream cfg(cfgp);
    cfg << "grid.n = 501\nfamily.n_combos = 6\nmc.points = 4000\nfamily.seed = 12345\n";
  }
  auto run = [&](const std::string& out, const std::string& extra) {
    const std::string cmd = g_binary + " verify --config " + cfgp.string() + " --out " +
                            (tmp / out).string() + extra + " > " + (tmp / (out + ".log")).string() +
                            " 2>&1";
    return std::system(cmd.c_str());
  };
  if (run("a", "") != 0) return {false, "first verify run failed"};
  if (run("b", " --threads 2") != 0) return {false, "second verify run failed"};

  const auto ja = slurp(tmp / "a" / "verify_report.json");
  const auto jb = slurp(tmp / "b" / "verify_report.json");
  if (ja.empty() || ja != jb) return {false, "verify_report.json differs between runs"};
  const auto ma = strip_timestamp_lines(slurp(tmp / "a" / "manifest.json"));
  const auto mb = strip_timestamp_lines(slurp(tmp / "b" / "manifest.json"));
  if (ma.empty() || ma != mb) return {false, "manifest.json differs beyond the timestamp"};
  return {true, "byte-identical JSON across reruns and thread counts"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_binary = argv[1];

  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "form identity", 10.0, criterion_form_identity},
      {2, "accretivity", 30.0, criterion_accretivity},
      {3, "lemma 2.1 / stima", 60.0, criterion_lemma21},
      {4, "rellich", 30.0, criterion_rellich},
      {5, "duality", 60.0, criterion_duality},
      {6, "section 3 chain", 120.0, criterion_section3_chain},
      {7, "spectrum", 120.0, criterion_spectrum},
      {8, "semigroup", 60.0, criterion_semigroup},
      {9, "reverse Hoelder / m-function", 60.0, criterion_potential_geometry},
      {10, "determinism", 120.0, criterion_determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = secs < c.budget_s;
    const bool pass = out.pass && in_budget;
    if (!pass) ++failures;
    std::printf("criterion %2d [%-28s] %s  %6.2fs (budget %3.0fs)  %s%s\n", c.id, c.name,
                pass ? "PASS" : "FAIL", secs, c.budget_s, out.detail.c_str(),
                in_budget ? "" : "  [over budget]");
    std::fflush(stdout);
  }
  std::printf("ACCEPTANCE: %d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
