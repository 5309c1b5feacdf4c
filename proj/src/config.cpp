#include "relq/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace relq {

namespace {

struct Entry {
  std::vector<double> values;
  std::string raw;
  int line = 0;
};

using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(const std::string& origin, int line,
                       const std::string& msg) {
  std::ostringstream os;
  os << origin << ":" << line << ": " << msg;
  throw ConfigError(os.str());
}

std::vector<double> parse_numbers(const std::string& origin, int line,
                                  const std::string& key,
                                  const std::string& raw) {
  std::vector<double> out;
  const char* p = raw.c_str();
  while (*p != '\0') {
    while (*p == ' ' || *p == '\t' || *p == ',') ++p;
    if (*p == '\0') break;
    char* end = nullptr;
    const double v = std::strtod(p, &end);
    if (end == p)
      fail(origin, line, "field " + key + ": cannot parse number at '" +
                             std::string(p) + "'");
    out.push_back(v);
    p = end;
  }
  if (out.empty()) fail(origin, line, "field " + key + ": no values");
  return out;
}

class Loaded {
 public:
  Loaded(const std::string& text, std::string origin)
      : origin_(std::move(origin)) {
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::size_t cut = line.find_first_of(";#");
      if (cut != std::string::npos) line.erase(cut);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          fail(origin_, lineno, "malformed section header");
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        fail(origin_, lineno, "expected key = value");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (section.empty())
        fail(origin_, lineno, "key " + key + " outside any section");
      Entry e;
      e.raw = value;
      e.line = lineno;
      sections_[section][key] = std::move(e);
    }
  }

  bool has(const std::string& sec, const std::string& key) const {
    const auto s = sections_.find(sec);
    return s != sections_.end() && s->second.count(key) > 0;
  }

  const Entry& get(const std::string& sec, const std::string& key) const {
    return sections_.at(sec).at(key);
  }

  std::vector<double> numbers(const std::string& sec,
                              const std::string& key) const {
    const Entry& e = get(sec, key);
    return parse_numbers(origin_, e.line, key, e.raw);
  }

  double number(const std::string& sec, const std::string& key,
                double fallback) const {
    if (!has(sec, key)) return fallback;
    const auto v = numbers(sec, key);
    if (v.size() != 1)
      fail(origin_, get(sec, key).line,
           "field " + key + ": expected a single value");
    return v[0];
  }

  std::string text(const std::string& sec, const std::string& key,
                   const std::string& fallback) const {
    return has(sec, key) ? get(sec, key).raw : fallback;
  }

  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
  std::map<std::string, Section> sections_;
};

const char* kFieldNames[9] = {"A", "B", "C", "D", "L", "S", "R", "M", "N"};

double& field_of(ThetaCoefficients& c, int i) {
  double* fields[9] = {&c.A, &c.B, &c.C, &c.D, &c.L, &c.S, &c.R, &c.M, &c.N};
  return *fields[i];
}

std::string field_section(int i) { return i < 4 ? "dynamics" : "cost"; }

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
  const Loaded ini(text, origin);
  RunConfig cfg;
  cfg.family = ini.text("robust", "family", "single");

  if (cfg.family == "single" || cfg.family == "two_point") {
    TwoPointFamily fam;
    for (int i = 0; i < 9; ++i) {
      const std::string sec = field_section(i);
      if (!ini.has(sec, kFieldNames[i])) continue;
      const auto v = ini.numbers(sec, kFieldNames[i]);
      const std::size_t want = (cfg.family == "single") ? 1 : 2;
      if (v.size() != want && v.size() != 1)
        fail(origin, ini.get(sec, kFieldNames[i]).line,
             std::string("field ") + kFieldNames[i] + ": expected " +
                 std::to_string(want) + " value(s)");
      field_of(fam.theta1, i) = v[0];
      field_of(fam.theta2, i) = v.size() > 1 ? v[1] : v[0];
    }
    cfg.problem.family = fam;
  } else if (cfg.family == "uniform") {
    UniformPolyFamily fam;
    Polynomial* polys[9] = {&fam.A, &fam.B, &fam.C, &fam.D, &fam.L,
                            &fam.S, &fam.R, &fam.M, &fam.N};
    for (int i = 0; i < 9; ++i) {
      const std::string sec = field_section(i);
      if (!ini.has(sec, kFieldNames[i])) continue;
      *polys[i] = Polynomial(ini.numbers(sec, kFieldNames[i]));
    }
    if (!ini.has("robust", "a1") || !ini.has("robust", "a2"))
      throw ConfigError(origin + ": uniform family requires a1 and a2");
    fam.a1 = ini.number("robust", "a1", 0.0);
    fam.a2 = ini.number("robust", "a2", 1.0);
    cfg.problem.family = fam;
  } else {
    throw ConfigError(origin + ": unknown family '" + cfg.family +
                      "' (single | two_point | uniform)");
  }

  if (!ini.has("robust", "rho"))
    throw ConfigError(origin + ": missing required field rho in [robust]");
  if (!ini.has("robust", "alpha"))
    throw ConfigError(origin + ": missing required field alpha in [robust]");
  cfg.problem.rho = ini.number("robust", "rho", 1.0);
  cfg.problem.alpha = ini.number("robust", "alpha", 1.0);
  cfg.lambda = ini.number("robust", "lambda", 1.0);

  cfg.x0 = ini.number("solver", "x0", 1.0);
  cfg.problem.x0_bound = ini.number("solver", "x0_bound", 5.0);
  cfg.sim.n_paths = static_cast<std::size_t>(
      ini.number("solver", "paths", 10000.0));
  cfg.sim.dt = ini.number("solver", "dt", 1e-3);
  cfg.sim.seed =
      static_cast<std::uint64_t>(ini.number("solver", "seed", 0.0));
  cfg.sim.n_threads = static_cast<int>(ini.number("solver", "threads", 1.0));
  cfg.sim.kernel_mode = ini.text("solver", "kernel", "auto");
  if (ini.has("solver", "horizon")) {
    cfg.sim.horizon = ini.number("solver", "horizon", 1.0);
    cfg.horizon_set = true;
  }

  try {
    cfg.problem.validate();
  } catch (const std::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string run_id(const std::string& config_text, const std::string& command,
                   std::uint64_t seed) {
  // FNV-1a over the run's identity; stable across platforms.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  mix(config_text);
  mix(command);
  mix(std::to_string(seed));
  std::ostringstream os;
  os << std::hex;
  for (int i = 15; i >= 0; --i) os << ((h >> (4 * i)) & 0xf);
  return os.str();
}

}  // namespace relq
