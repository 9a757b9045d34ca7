#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace biharm::report {

using ordered_json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Outcome of one identity/inequality check over the sweep family.
/// Convention: pass <=> margin >= -tolerance. Identity checks store
/// margin = -(worst normalized residual).
struct InequalityReport {
  std::string id;
  std::string kind = "inequality";  // identity | inequality | estimate
  std::string status = "pass";      // pass | fail | skipped
  double margin = 0.0;
  double tolerance = 0.0;
  std::string worst_sample;
  int family_size = 0;
  std::uint64_t grid_fingerprint = 0;
  std::map<std::string, double> details;

  bool passed() const { return status != "fail"; }
  void set_margin(double m, double tol) {
    margin = m;
    tolerance = tol;
    status = (m >= -tol) ? "pass" : "fail";
  }
  static InequalityReport skipped(const std::string& id, const std::string& why);
};

struct ConstantEstimate {
  std::string name;
  double value = 0.0;
  std::string direction;  // sup | inf
  int family_size = 0;
  std::uint64_t grid_fingerprint = 0;
  double stability_delta = 0.0;  // relative change when the family is enlarged
};

struct Mode {
  int l = 0;
  int k = 0;  // radial index within the sector, 1-based
  double mu = 0.0;
  double residual = 0.0;
  long multiplicity = 1;
};

struct SpectrumResult {
  int N = 0;
  double alpha = 0.0, beta = 0.0, lambda = 0.0;
  std::vector<int> sectors;
  std::vector<Mode> modes;  // merged, ascending in mu
  std::uint64_t grid_fingerprint = 0;
  std::map<std::string, double> refinement;  // Richardson / truncation studies
};

struct TrajectoryResult {
  std::string scheme;  // implicit-euler | crank-nicolson
  double dt = 0.0;
  double lambda = 0.0;
  std::vector<double> times;
  std::vector<double> norm_plain;     // L^2(r^{N-1} dr)
  std::vector<double> norm_weighted;  // M-weighted
  std::vector<double> energy;         // a_lambda(u, u)
  std::vector<double> final_state;
};

ordered_json to_json(const InequalityReport& r);
ordered_json to_json(const ConstantEstimate& c);
ordered_json to_json(const SpectrumResult& s);
ordered_json to_json(const TrajectoryResult& t);

std::string spectrum_csv(const SpectrumResult& s);     // l,k,mu,residual,multiplicity
std::string trajectory_csv(const TrajectoryResult& t); // t,norm,energy
std::string constants_csv(const std::vector<ConstantEstimate>& cs);

/// One number -> string used by both JSON and CSV writers so the two
/// formats stay byte-consistent.
std::string number_repr(double v);

}  // namespace biharm::report
