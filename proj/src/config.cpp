#include "biharm/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "biharm/version.hpp"

namespace biharm::config {

namespace {


std::string trimmed(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad numeric value for " + key + ": '" + v + "'");
  }
}

long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer value for " + key + ": '" + v + "'");
  }
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::istringstream items(v);
  std::string item;
  while (std::getline(items, item, ',')) {
    const std::string tv = trimmed(item);
    if (!tv.empty()) out.push_back(parse_double(key, tv));
  }
  if (out.empty()) throw std::invalid_argument("config: empty list for " + key);
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (double d : parse_double_list(key, v)) out.push_back(static_cast<int>(d));
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: bad boolean value for " + key + ": '" + v + "'");
}

}  // namespace

params::OperatorParams RunConfig::operator_params() const {
  params::OperatorParams p;
  p.N = N;
  p.alpha = alpha;
  p.beta = beta;
  p.lambda = lambda.value_or(0.0);
  p.lambda0 = lambda0;
  return p;
}

void RunConfig::validate() const {
  operator_params().validate();
  if (!(grid_r_min > 0.0) || !(grid_r_max > grid_r_min)) {
    throw std::invalid_argument("config: need 0 < grid.r_min < grid.r_max");
  }
  if (grid_n < 64) throw std::invalid_argument("config: grid.n >= 64 required");
  if (n_combos < 0) throw std::invalid_argument("config: family.n_combos >= 0");
  for (int p : gauss_p) {
    if (p < 4) throw std::invalid_argument("config: family.gauss_p entries must be >= 4");
  }
  for (double s : gauss_sigma) {
    if (!(s > 0.0)) throw std::invalid_argument("config: family.gauss_sigma entries must be > 0");
  }
  for (int p : rational_p) {
    if (p < 4) throw std::invalid_argument("config: family.rational_p entries must be >= 4");
  }
  if (rational_q_count < 0) throw std::invalid_argument("config: family.rational_q_count >= 0");
  if (spectrum_l_max < 0 || spectrum_modes < 1) {
    throw std::invalid_argument("config: bad spectrum.l_max / spectrum.modes");
  }
  if (evolve_scheme != "implicit-euler" && evolve_scheme != "crank-nicolson") {
    throw std::invalid_argument("config: evolve.scheme must be implicit-euler or crank-nicolson");
  }
  if (evolve_initial != "gaussian" && evolve_initial != "eigenvector" &&
      evolve_initial != "zero") {
    throw std::invalid_argument("config: evolve.initial must be gaussian|eigenvector|zero");
  }
  if (evolve_trajectories < 1) throw std::invalid_argument("config: evolve.trajectories >= 1");
  if (mc_points < 100) throw std::invalid_argument("config: mc.points >= 100");
  if (threads < 1) throw std::invalid_argument("config: threads >= 1");
}

void RunConfig::set_key(const std::string& key, const std::string& value) {
  const std::string v = trimmed(value);
  if (key == "operator.n") {
    N = static_cast<int>(parse_int(key, v));
  } else if (key == "operator.alpha") {
    alpha = parse_double(key, v);
  } else if (key == "operator.beta") {
    beta = parse_double(key, v);
  } else if (key == "operator.lambda") {
    if (v == "auto") {
      lambda.reset();
    } else {
      lambda = parse_double(key, v);
    }
  } else if (key == "operator.lambda0") {
    if (v == "auto") {
      lambda0.reset();
    } else {
      lambda0 = parse_double(key, v);
    }
  } else if (key == "grid.r_min") {
    grid_r_min = parse_double(key, v);
  } else if (key == "grid.r_max") {
    grid_r_max = parse_double(key, v);
  } else if (key == "grid.n") {
    grid_n = static_cast<int>(parse_int(key, v));
  } else if (key == "family.seed") {
    seed = static_cast<std::uint64_t>(parse_int(key, v));
  } else if (key == "family.n_combos") {
    n_combos = static_cast<int>(parse_int(key, v));
  } else if (key == "family.gauss_p") {
    gauss_p = parse_int_list(key, v);
  } else if (key == "family.gauss_sigma") {
    gauss_sigma = parse_double_list(key, v);
  } else if (key == "family.rational_p") {
    rational_p = parse_int_list(key, v);
  } else if (key == "family.rational_q_count") {
    rational_q_count = static_cast<int>(parse_int(key, v));
  } else if (key == "tolerances.identity") {
    tol_identity = parse_double(key, v);
  } else if (key == "tolerances.stima") {
    tol_stima = parse_double(key, v);
  } else if (key == "tolerances.margin") {
    tol_margin = parse_double(key, v);
  } else if (key == "tolerances.rellich") {
    tol_rellich = parse_double(key, v);
  } else if (key == "spectrum.l_max") {
    spectrum_l_max = static_cast<int>(parse_int(key, v));
  } else if (key == "spectrum.modes") {
    spectrum_modes = static_cast<int>(parse_int(key, v));
  } else if (key == "spectrum.tol") {
    spectrum_tol = parse_double(key, v);
  } else if (key == "spectrum.dense_oracle") {
    spectrum_dense_oracle = parse_bool(key, v);
  } else if (key == "spectrum.refine") {
    spectrum_refine = parse_bool(key, v);
  } else if (key == "evolve.scheme") {
    evolve_scheme = v;
  } else if (key == "evolve.t") {
    if (v == "auto") {
      evolve_T.reset();
    } else {
      evolve_T = parse_double(key, v);
    }
  } else if (key == "evolve.dt") {
    if (v == "auto") {
      evolve_dt.reset();
    } else {
      evolve_dt = parse_double(key, v);
    }
  } else if (key == "evolve.initial") {
    evolve_initial = v;
  } else if (key == "evolve.trajectories") {
    evolve_trajectories = static_cast<int>(parse_int(key, v));
  } else if (key == "mc.points") {
    mc_points = static_cast<int>(parse_int(key, v));
  } else if (key == "reverse_holder.q_extra") {
    reverse_holder_q_extra.clear();
    std::istringstream items(v);
    std::string item;
    while (std::getline(items, item, ',')) {
      const std::string tv = trimmed(item);
      if (!tv.empty()) reverse_holder_q_extra.push_back(parse_double(key, tv));
    }
  } else if (key == "output.dir") {
    out_dir = v;
  } else if (key == "threads") {
    threads = static_cast<int>(parse_int(key, v));
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

RunConfig RunConfig::from_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trimmed(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not 'key = value'");
    }
    std::string key = trimmed(line.substr(0, eq));
    for (auto& ch : key) ch = static_cast<char>(std::tolower(ch));
    cfg.set_key(key, line.substr(eq + 1));
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

void RunConfig::apply_env_overrides() {
  static const char* keys[] = {
      "operator.n",      "operator.alpha",   "operator.beta",     "operator.lambda",
      "operator.lambda0", "grid.r_min",      "grid.r_max",        "grid.n",
      "family.seed",     "family.n_combos",  "family.gauss_p",    "family.gauss_sigma",
      "family.rational_p", "family.rational_q_count", "tolerances.identity", "tolerances.stima",
      "tolerances.margin", "tolerances.rellich", "spectrum.l_max", "spectrum.modes",
      "spectrum.tol",    "spectrum.dense_oracle", "spectrum.refine", "evolve.scheme",
      "evolve.t",        "evolve.dt",        "evolve.initial",    "evolve.trajectories",
      "mc.points",       "reverse_holder.q_extra", "output.dir", "threads"};
  for (const char* key : keys) {
    std::string env = "BIHARMLAB_";
    for (const char* c = key; *c; ++c) {
      env += (*c == '.') ? '_' : static_cast<char>(std::toupper(*c));
    }
    if (const char* v = std::getenv(env.c_str())) set_key(key, v);
  }
}

std::string RunConfig::canonical_dump() const {
  // runtime-only keys (threads, output.dir) are deliberately omitted: they
  // cannot change any numerical output, and the hash identifies the
  // experiment, not the machine placement
  std::ostringstream os;
  auto num = [](double d) { return report::number_repr(d); };
  os << "evolve.dt = " << (evolve_dt ? num(*evolve_dt) : "auto") << "\n";
  os << "evolve.initial = " << evolve_initial << "\n";
  os << "evolve.scheme = " << evolve_scheme << "\n";
  os << "evolve.t = " << (evolve_T ? num(*evolve_T) : "auto") << "\n";
  os << "evolve.trajectories = " << evolve_trajectories << "\n";
  os << "family.gauss_p =";
  for (int p : gauss_p) os << " " << p;
  os << "\n";
  os << "family.gauss_sigma =";
  for (double s : gauss_sigma) os << " " << num(s);
  os << "\n";
  os << "family.n_combos = " << n_combos << "\n";
  os << "family.rational_p =";
  for (int p : rational_p) os << " " << p;
  os << "\n";
  os << "family.rational_q_count = " << rational_q_count << "\n";
  os << "family.seed = " << seed << "\n";
  os << "grid.n = " << grid_n << "\n";
  os << "grid.r_max = " << num(grid_r_max) << "\n";
  os << "grid.r_min = " << num(grid_r_min) << "\n";
  os << "mc.points = " << mc_points << "\n";
  os << "operator.alpha = " << num(alpha) << "\n";
  os << "operator.beta = " << num(beta) << "\n";
  os << "operator.lambda = " << (lambda ? num(*lambda) : "auto") << "\n";
  os << "operator.lambda0 = " << (lambda0 ? num(*lambda0) : "auto") << "\n";
  os << "operator.n = " << N << "\n";
  os << "reverse_holder.q_extra =";
  for (double q : reverse_holder_q_extra) os << " " << num(q);
  os << "\n";
  os << "spectrum.dense_oracle = " << (spectrum_dense_oracle ? "true" : "false") << "\n";
  os << "spectrum.l_max = " << spectrum_l_max << "\n";
  os << "spectrum.modes = " << spectrum_modes << "\n";
  os << "spectrum.refine = " << (spectrum_refine ? "true" : "false") << "\n";
  os << "spectrum.tol = " << num(spectrum_tol) << "\n";
  os << "tolerances.identity = " << num(tol_identity) << "\n";
  os << "tolerances.margin = " << num(tol_margin) << "\n";
  os << "tolerances.rellich = " << num(tol_rellich) << "\n";
  os << "tolerances.stima = " << num(tol_stima) << "\n";
  return os.str();
}

std::uint64_t RunConfig::config_hash() const { return fnv1a(canonical_dump()); }

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

report::ordered_json RunManifest::to_json() const {
  report::ordered_json j;
  j["schema_version"] = report::kSchemaVersion;
  j["run_id"] = run_id;
  j["timestamp"] = timestamp;
  j["config_hash"] = config_hash;
  j["tool_version"] = tool_version;
  j["config"] = config_copy;
  auto arts = report::ordered_json::array();
  for (const auto& a : artifacts) {
    report::ordered_json e;
    e["name"] = a.name;
    e["bytes"] = a.bytes;
    e["checksum"] = a.checksum;
    arts.push_back(e);
  }
  j["artifacts"] = arts;
  return j;
}

void write_artifact(const std::string& dir, const std::string& name, const std::string& content,
                    RunManifest& manifest) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write artifact " + path.string());
  out << content;
  out.close();
  Artifact a;
  a.name = name;
  a.bytes = content.size();
  a.checksum = hex64(fnv1a(content));
  manifest.artifacts.push_back(a);
}

}  // namespace biharm::config
