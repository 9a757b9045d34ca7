#include "biharm/report.hpp"

#include <sstream>

namespace biharm::report {

InequalityReport InequalityReport::skipped(const std::string& id, const std::string& why) {
  InequalityReport r;
  r.id = id;
  r.status = "skipped";
  r.worst_sample = why;
  return r;
}

std::string number_repr(double v) { return ordered_json(v).dump(); }

ordered_json to_json(const InequalityReport& r) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["id"] = r.id;
  j["kind"] = r.kind;
  j["status"] = r.status;
  j["margin"] = r.margin;
  j["tolerance"] = r.tolerance;
  j["worst_sample"] = r.worst_sample;
  j["family_size"] = r.family_size;
  j["grid_fingerprint"] = r.grid_fingerprint;
  j["details"] = r.details;
  return j;
}

ordered_json to_json(const ConstantEstimate& c) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = c.name;
  j["value"] = c.value;
  j["direction"] = c.direction;
  j["family_size"] = c.family_size;
  j["grid_fingerprint"] = c.grid_fingerprint;
  j["stability_delta"] = c.stability_delta;
  return j;
}

ordered_json to_json(const SpectrumResult& s) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["N"] = s.N;
  j["alpha"] = s.alpha;
  j["beta"] = s.beta;
  j["lambda"] = s.lambda;
  j["sectors"] = s.sectors;
  j["grid_fingerprint"] = s.grid_fingerprint;
  j["refinement"] = s.refinement;
  ordered_json modes = ordered_json::array();
  for (const auto& m : s.modes) {
    ordered_json e;
    e["l"] = m.l;
    e["k"] = m.k;
    e["mu"] = m.mu;
    // generator sign convention: the lambda solving A u + lambda u = 0
    e["lambda_generator"] = -m.mu;
    e["residual"] = m.residual;
    e["multiplicity"] = m.multiplicity;
    modes.push_back(e);
  }
  j["modes"] = modes;
  return j;
}

ordered_json to_json(const TrajectoryResult& t) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["scheme"] = t.scheme;
  j["dt"] = t.dt;
  j["lambda"] = t.lambda;
  j["times"] = t.times;
  j["norm_plain"] = t.norm_plain;
  j["norm_weighted"] = t.norm_weighted;
  j["energy"] = t.energy;
  j["final_state"] = t.final_state;
  return j;
}

std::string spectrum_csv(const SpectrumResult& s) {
  std::ostringstream os;
  os << "l,k,mu,residual,multiplicity\n";
  for (const auto& m : s.modes) {
    os << m.l << "," << m.k << "," << number_repr(m.mu) << "," << number_repr(m.residual) << ","
       << m.multiplicity << "\n";
  }
  return os.str();
}

std::string trajectory_csv(const TrajectoryResult& t) {
  std::ostringstream os;
  os << "t,norm,energy\n";
  for (std::size_t i = 0; i < t.times.size(); ++i) {
    os << number_repr(t.times[i]) << "," << number_repr(t.norm_plain[i]) << ","
       << number_repr(t.energy[i]) << "\n";
  }
  return os.str();
}

std::string constants_csv(const std::vector<ConstantEstimate>& cs) {
  std::ostringstream os;
  os << "name,value,direction,family_size,grid_fingerprint,stability_delta\n";
  for (const auto& c : cs) {
    os << c.name << "," << number_repr(c.value) << "," << c.direction << "," << c.family_size
       << "," << c.grid_fingerprint << "," << number_repr(c.stability_delta) << "\n";
  }
  return os.str();
}

}  // namespace biharm::report
