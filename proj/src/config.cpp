#include "vfv/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace vfv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& text, const std::string& field) {
  T v{};
  const char* end = text.data() + text.size();
  const auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end) throw ConfigError(field + ": '" + text + "' is not a valid number");
  return v;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string mode_name(TimeMode m) { return m == TimeMode::Implicit ? "implicit" : "explicit"; }
std::string initial_name(InitialData d) { return d == InitialData::KelvinHelmholtz ? "kh" : "smooth"; }

std::string join_numbers(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s;
}

}  // namespace

SchemeParams ExperimentConfig::kh_scheme_defaults() {
  SchemeParams p;
  p.a = 2.5;
  return p;
}

void ExperimentConfig::validate() const {
  if (ks.empty()) throw ConfigError("experiment.ks: at least one mesh size required");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 1) throw ConfigError("experiment.ks: mesh sizes must be positive");
    if (i > 0 && ks[i] <= ks[i - 1]) throw ConfigError("experiment.ks: mesh sizes must be distinct and sorted");
  }
  if (!(final_time > 0.0)) throw ConfigError("experiment.final_time: must be positive");
  if (dim < 1 || dim > kMaxDim) throw ConfigError("experiment.dim: must be 1, 2 or 3");
  if (initial == InitialData::KelvinHelmholtz && dim < 2) throw ConfigError("experiment.dim: KH data needs d >= 2");
  if (quadrature < 1) throw ConfigError("experiment.quadrature: must be >= 1");
  if (modes < 0) throw ConfigError("experiment.modes: must be >= 0");
  if (!(eps_perturb >= 0.0)) throw ConfigError("experiment.eps_perturb: must be >= 0");
  if (save_every_steps < 0) throw ConfigError("experiment.save_every_steps: must be >= 0");
  for (double t : save_times)
    if (!(t > 0.0 && t <= final_time)) throw ConfigError("experiment.save_times: entries must lie in (0, final_time]");
  try {
    scheme.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("scheme: ") + e.what());
  }
  if (weights.empty()) throw ConfigError("analysis.weights: at least one weight required");
  for (const auto& w : weights) {
    try {
      WeightFunction::parse(w);
    } catch (const Error& e) {
      throw ConfigError(std::string("analysis.weights: ") + e.what());
    }
  }
  if (bins < 1) throw ConfigError("analysis.bins: must be >= 1");
}

std::string ExperimentConfig::canonical_run(int k) const {
  std::ostringstream os;
  os << "[experiment]\n";
  os << "k = " << k << "\n";
  os << "final_time = " << num(final_time) << "\n";
  os << "seed = " << seed << "\n";
  os << "initial = " << initial_name(initial) << "\n";
  os << "dim = " << dim << "\n";
  os << "quadrature = " << quadrature << "\n";
  os << "eps_perturb = " << num(eps_perturb) << "\n";
  os << "modes = " << modes << "\n";
  os << "smooth_amplitude = " << num(smooth_amplitude) << "\n";
  os << "save_times = " << join_numbers(save_times) << "\n";
  os << "save_every_steps = " << save_every_steps << "\n";
  os << "[scheme]\n";
  os << "gamma = " << num(scheme.gamma) << "\n";
  os << "a = " << num(scheme.a) << "\n";
  os << "alpha = " << num(scheme.alpha) << "\n";
  os << "eps = " << num(scheme.eps) << "\n";
  os << "c_mu = " << num(scheme.c_mu) << "\n";
  os << "cfl = " << num(scheme.cfl) << "\n";
  os << "dt_ratio = " << num(scheme.dt_ratio) << "\n";
  os << "mode = " << mode_name(scheme.mode) << "\n";
  os << "picard_tol = " << num(scheme.picard_tol) << "\n";
  os << "picard_max = " << scheme.picard_max << "\n";
  return os.str();
}

std::string ExperimentConfig::canonical() const {
  std::string ks_text;
  for (std::size_t i = 0; i < ks.size(); ++i) ks_text += (i ? ", " : "") + std::to_string(ks[i]);
  std::string run = canonical_run(0);
  run.replace(run.find("k = 0\n"), 6, "ks = " + ks_text + "\noutput = " + output + "\n");
  std::ostringstream os;
  os << run;
  os << "[analysis]\n";
  os << "weights = ";
  for (std::size_t i = 0; i < weights.size(); ++i) os << (i ? ", " : "") << weights[i];
  os << "\nreference = " << reference << "\n";
  os << "cutoff = " << cutoff << "\n";
  os << "subdomains = ";
  for (std::size_t i = 0; i < subdomains.size(); ++i) {
    const Rect& r = subdomains[i];
    os << (i ? "; " : "") << num(r.x0) << "," << num(r.x1) << "," << num(r.y0) << "," << num(r.y1);
  }
  os << "\nbins = " << bins << "\n";
  return os.str();
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(canonical()); }
std::uint64_t ExperimentConfig::run_hash(int k) const { return fnv1a64(canonical_run(k)); }

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto dbl = [](double& dst) { return Setter([&dst](const std::string& v, const std::string& f) { dst = parse_number<double>(v, f); }); };
  auto integer = [](int& dst) { return Setter([&dst](const std::string& v, const std::string& f) { dst = parse_number<int>(v, f); }); };

  SchemeParams& sp = cfg.scheme;
  const std::map<std::string, Setter> setters{
      {"experiment.ks",
       [&](const std::string& v, const std::string& f) {
         cfg.ks.clear();
         for (const auto& item : split(v, ',')) cfg.ks.push_back(parse_number<int>(item, f));
       }},
      {"experiment.final_time", dbl(cfg.final_time)},
      {"experiment.seed", [&](const std::string& v, const std::string& f) { cfg.seed = parse_number<std::uint64_t>(v, f); }},
      {"experiment.output", [&](const std::string& v, const std::string&) { cfg.output = v; }},
      {"experiment.initial",
       [&](const std::string& v, const std::string& f) {
         if (v == "kh") cfg.initial = InitialData::KelvinHelmholtz;
         else if (v == "smooth") cfg.initial = InitialData::Smooth;
         else throw ConfigError(f + ": expected kh or smooth");
       }},
      {"experiment.dim", integer(cfg.dim)},
      {"experiment.quadrature", integer(cfg.quadrature)},
      {"experiment.eps_perturb", dbl(cfg.eps_perturb)},
      {"experiment.modes", integer(cfg.modes)},
      {"experiment.smooth_amplitude", dbl(cfg.smooth_amplitude)},
      {"experiment.save_times",
       [&](const std::string& v, const std::string& f) {
         cfg.save_times.clear();
         for (const auto& item : split(v, ',')) cfg.save_times.push_back(parse_number<double>(item, f));
       }},
      {"experiment.save_every_steps", integer(cfg.save_every_steps)},
      {"scheme.gamma", dbl(sp.gamma)},
      {"scheme.a", dbl(sp.a)},
      {"scheme.alpha", dbl(sp.alpha)},
      {"scheme.eps", dbl(sp.eps)},
      {"scheme.c_mu", dbl(sp.c_mu)},
      {"scheme.lambda_mode",
       [&](const std::string& v, const std::string& f) {
         if (parse_number<double>(v, f) != 0.0) throw ConfigError(f + ": only 0 is supported");
       }},
      {"scheme.cfl", dbl(sp.cfl)},
      {"scheme.dt_ratio", dbl(sp.dt_ratio)},
      {"scheme.mode",
       [&](const std::string& v, const std::string& f) {
         if (v == "implicit") sp.mode = TimeMode::Implicit;
         else if (v == "explicit") sp.mode = TimeMode::Explicit;
         else throw ConfigError(f + ": expected implicit or explicit");
       }},
      {"scheme.picard_tol", dbl(sp.picard_tol)},
      {"scheme.picard_max", integer(sp.picard_max)},
      {"analysis.weights", [&](const std::string& v, const std::string&) { cfg.weights = split(v, ','); }},
      {"analysis.reference", [&](const std::string& v, const std::string&) { cfg.reference = v; }},
      {"analysis.cutoff", [&](const std::string& v, const std::string&) { cfg.cutoff = v; }},
      {"analysis.subdomains",
       [&](const std::string& v, const std::string&) {
         cfg.subdomains.clear();
         for (const auto& item : split(v, ';')) cfg.subdomains.push_back(Rect::parse(item));
       }},
      {"analysis.bins", integer(cfg.bins)},
  };

  std::istringstream is(text);
  std::string line, section;
  for (int lineno = 1; std::getline(is, line); ++lineno) {
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "experiment" && section != "scheme" && section != "analysis")
        throw ConfigError(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": entry outside a section");
    const std::string field = section + "." + trim(line.substr(0, eq));
    const auto it = setters.find(field);
    if (it == setters.end()) throw ConfigError(where + ": unknown key " + field);
    try {
      it->second(trim(line.substr(eq + 1)), field);
    } catch (const Error& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace vfv
