#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <sstream>

#include "epath/cli.hpp"
#include "epath/ring.hpp"

namespace epath::cli {

namespace {

enum class Kind { Int, Real, Bool, RealList, Text, Choice, Threads, Speed };

struct KeySpec {
  const char* key;
  const char* fallback;
  Kind kind;
  std::vector<std::string> choices = {};
};

const std::vector<KeySpec>& schema() {
  static const std::vector<KeySpec> keys = {
      {"experiment", "carrier", Kind::Choice, {"chessboard", "carrier", "propagate", "ring"}},
      {"lattice.n", "10", Kind::Int},
      {"lattice.mass_scale", "1", Kind::Real},
      {"construction.M", "20", Kind::Int},
      {"output_dir", "out", Kind::Text},
      {"threads", "1", Kind::Threads},
      {"clip", "false", Kind::Bool},
      {"chessboard.n_steps", "12", Kind::Int},
      {"chessboard.eps_m", "0.1", Kind::RealList},
      {"chessboard.step_size", "0.1", Kind::Real},
      {"chessboard.initial", "both", Kind::Choice, {"right", "left", "both"}},
      {"chessboard.final", "all", Kind::Choice, {"any", "right", "left", "all"}},
      {"chessboard.cap", "24", Kind::Int},
      {"carrier.periods", "3", Kind::Int},
      {"carrier.dump_path", "false", Kind::Bool},
      {"propagate.x_min", "-12", Kind::Real},
      {"propagate.x_max", "12", Kind::Real},
      {"propagate.t_min", "1", Kind::Real},
      {"propagate.t_max", "41", Kind::Real},
      {"propagate.rays", "-0.25:0.25:0.05", Kind::RealList},
      {"ring.circumference", "8", Kind::Real},
      {"ring.mode", "1", Kind::Int},
      {"ring.v", "eigen", Kind::Speed},
      {"ring.speed_factor", "1", Kind::Real},
      {"ring.cycles", "10", Kind::Int},
      {"ring.write_origin", "0", Kind::Int},
  };
  return keys;
}

const KeySpec* find_key(const std::string& key) {
  for (const auto& k : schema()) {
    if (key == k.key) return &k;
  }
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::optional<long long> parse_int(const std::string& s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_real(const std::string& s) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<bool> parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  return std::nullopt;
}

// "a,b,c" or "start:stop:step" (inclusive stop).
std::optional<std::vector<double>> parse_real_list(const std::string& s) {
  std::vector<double> out;
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(trim(item));
    if (parts.size() != 3) return std::nullopt;
    const auto a = parse_real(parts[0]), b = parse_real(parts[1]), step = parse_real(parts[2]);
    if (!a || !b || !step || !(*step > 0.0) || *b < *a) return std::nullopt;
    const auto count = static_cast<long long>(std::floor((*b - *a) / *step + 1e-9));
    if (count > 100000) return std::nullopt;
    for (long long i = 0; i <= count; ++i) {
      // Snap so 0.05 * i lands on the decimal grid.
      const double v = *a + static_cast<double>(i) * *step;
      out.push_back(std::round(v * 1e12) / 1e12);
    }
    return out;
  }
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = parse_real(trim(item));
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  if (out.empty()) return std::nullopt;
  return out;
}

}  // namespace

std::optional<Experiment> parse_experiment(const std::string& name) {
  if (name == "chessboard") return Experiment::Chessboard;
  if (name == "carrier") return Experiment::Carrier;
  if (name == "propagate") return Experiment::Propagate;
  if (name == "ring") return Experiment::Ring;
  return std::nullopt;
}

std::string experiment_name(Experiment e) {
  switch (e) {
    case Experiment::Chessboard: return "chessboard";
    case Experiment::Carrier: return "carrier";
    case Experiment::Propagate: return "propagate";
    case Experiment::Ring: return "ring";
  }
  return "unknown";
}

RunConfig::RunConfig() {
  for (const auto& k : schema()) values_[k.key] = k.fallback;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  values_[trim(key)] = trim(value);
}

void RunConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

void RunConfig::load_text(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("malformed JSON config: ") + e.what());
    }
    const auto& cfg = doc.contains("config") ? doc["config"] : doc;
    if (!cfg.is_object()) throw ConfigError("JSON config must be an object");
    for (const auto& [key, value] : cfg.items()) {
      set(key, value.is_string() ? value.get<std::string>() : value.dump());
    }
    return;
  }
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(number) + ": expected key = value");
    }
    set(line.substr(0, eq), line.substr(eq + 1));
  }
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  load_text(std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()));
}

const std::string& RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing key " + key);
  return it->second;
}

int RunConfig::get_int(const std::string& key) const {
  const auto v = parse_int(get(key));
  if (!v || *v < INT32_MIN || *v > INT32_MAX) throw ConfigError(key + ": expected an integer");
  return static_cast<int>(*v);
}

double RunConfig::get_real(const std::string& key) const {
  const auto v = parse_real(get(key));
  if (!v) throw ConfigError(key + ": expected a real number");
  return *v;
}

bool RunConfig::get_bool(const std::string& key) const {
  const auto v = parse_bool(get(key));
  if (!v) throw ConfigError(key + ": expected true or false");
  return *v;
}

std::vector<double> RunConfig::get_real_list(const std::string& key) const {
  const auto v = parse_real_list(get(key));
  if (!v) throw ConfigError(key + ": expected a list a,b,c or a range start:stop:step");
  return *v;
}

int RunConfig::threads() const {
  const auto& t = get("threads");
  if (t == "auto") return 0;
  return get_int("threads");
}

Experiment RunConfig::experiment() const {
  const auto e = parse_experiment(get("experiment"));
  if (!e) throw ConfigError("experiment: unknown experiment '" + get("experiment") + "'");
  return *e;
}

std::string RunConfig::to_text() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

std::vector<Diagnostic> validate(const RunConfig& config) {
  std::vector<Diagnostic> diags;
  auto fail = [&](const std::string& key, const std::string& msg) { diags.push_back({key, msg}); };

  for (const auto& [key, value] : config.values()) {
    const KeySpec* spec = find_key(key);
    if (!spec) {
      fail(key, "unknown key");
      continue;
    }
    switch (spec->kind) {
      case Kind::Int:
        if (!parse_int(value)) fail(key, "expected an integer");
        break;
      case Kind::Real:
        if (!parse_real(value)) fail(key, "expected a real number");
        break;
      case Kind::Bool:
        if (!parse_bool(value)) fail(key, "expected true or false");
        break;
      case Kind::RealList:
        if (!parse_real_list(value)) fail(key, "expected a list a,b,c or a range start:stop:step");
        break;
      case Kind::Text:
        if (value.empty()) fail(key, "must not be empty");
        break;
      case Kind::Choice:
        if (std::find(spec->choices.begin(), spec->choices.end(), value) == spec->choices.end()) {
          fail(key, "unknown value '" + value + "'");
        }
        break;
      case Kind::Threads:
        if (value != "auto" && (!parse_int(value) || *parse_int(value) < 1)) {
          fail(key, "threads must be a positive integer or auto");
        }
        break;
      case Kind::Speed:
        if (value != "eigen" && !parse_real(value)) fail(key, "expected eigen or a real speed");
        break;
    }
  }
  if (!diags.empty()) return diags;

  // Range checks on well-typed values.
  const int n = config.get_int("lattice.n");
  if (n <= 0) fail("lattice.n", "n must be positive");
  if (!(config.get_real("lattice.mass_scale") > 0.0)) {
    fail("lattice.mass_scale", "mass must be positive");
  }
  if (config.get_int("construction.M") < 1) fail("construction.M", "M must be at least 1");

  switch (config.experiment()) {
    case Experiment::Chessboard: {
      const int steps = config.get_int("chessboard.n_steps");
      const int cap = config.get_int("chessboard.cap");
      if (steps < 1) fail("chessboard.n_steps", "n_steps must be positive");
      if (cap < 1 || cap > 62) fail("chessboard.cap", "cap must be in [1, 62]");
      if (steps > cap) {
        fail("chessboard.n_steps", "enumeration too large: exceeds the cap of " + std::to_string(cap));
      }
      if (!(config.get_real("chessboard.step_size") > 0.0)) {
        fail("chessboard.step_size", "step_size must be positive");
      }
      for (double em : config.get_real_list("chessboard.eps_m")) {
        if (em < 0.0) fail("chessboard.eps_m", "eps*m must be non-negative");
      }
      break;
    }
    case Experiment::Carrier:
      if (config.get_int("carrier.periods") < 1) fail("carrier.periods", "periods must be positive");
      break;
    case Experiment::Propagate: {
      if (!(config.get_real("propagate.t_min") > 0.0)) {
        fail("propagate.t_min", "t_min must be positive (rays start at the origin)");
      }
      if (!(config.get_real("propagate.t_max") > config.get_real("propagate.t_min"))) {
        fail("propagate.t_max", "t_max must exceed t_min");
      }
      if (!(config.get_real("propagate.x_max") > config.get_real("propagate.x_min"))) {
        fail("propagate.x_max", "x_max must exceed x_min");
      }
      for (double v : config.get_real_list("propagate.rays")) {
        if (!(std::abs(v) < 1.0)) fail("propagate.rays", "superluminal drift");
      }
      break;
    }
    case Experiment::Ring: {
      const double L = config.get_real("ring.circumference");
      if (!(L > 0.0)) fail("ring.circumference", "circumference must be positive");
      if (config.get_int("ring.mode") < 1) fail("ring.mode", "mode must be at least 1");
      if (config.get_int("ring.cycles") < 1) fail("ring.cycles", "cycles must be positive");
      if (n > 0 && L > 0.0) {
        const double cells = L * n / 4.0;
        if (std::abs(cells - std::round(cells)) > 1e-9) {
          fail("ring.circumference", "circumference must be a whole number of cells");
        }
      }
      const double factor = config.get_real("ring.speed_factor");
      if (!(factor >= 0.0)) fail("ring.speed_factor", "speed_factor must be non-negative");
      double v = 0.0;
      if (config.get("ring.v") == "eigen") {
        const LatticeSpec lattice{n, config.get_real("lattice.mass_scale")};
        if (L > 0.0 && config.get_int("ring.mode") >= 1 && n > 0 && lattice.mass > 0.0) {
          try {
            v = ring::eigen_speed(config.get_int("ring.mode"), lattice.mass,
                                  L * lattice.time_unit()) *
                factor;
          } catch (const std::exception& e) {
            fail("ring.v", e.what());
          }
        }
      } else {
        v = config.get_real("ring.v") * factor;
      }
      if (v < 0.0) fail("ring.v", "speed must be non-negative");
      if (!(v < 1.0)) fail("ring.v", "superluminal drift");
      break;
    }
  }
  return diags;
}

}  // namespace epath::cli
