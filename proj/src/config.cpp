#include "nvsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

namespace nvsim {

ConfigError::ConfigError(const std::string& message, int line, int column, std::string key)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", column " +
                                        std::to_string(column) + ": " + message
                                  : message),
      line_(line),
      column_(column),
      key_(std::move(key)) {}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view s) {
  std::string t = trim(s);
  if (!t.empty() && t[0] == '+') t.erase(0, 1);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw std::invalid_argument("expected a real number, got '" + trim(s) + "'");
  }
  return v;
}

long long parse_int(std::string_view s) {
  std::string t = trim(s);
  if (!t.empty() && t[0] == '+') t.erase(0, 1);
  long long v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw std::invalid_argument("expected an integer, got '" + trim(s) + "'");
  }
  return v;
}

bool parse_bool(std::string_view s) {
  const std::string t = trim(s);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw std::invalid_argument("expected true or false, got '" + t + "'");
}

std::vector<double> parse_list(std::string_view s) {
  std::vector<double> out;
  const std::string t = trim(s);
  if (t.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = t.find(',', start);
    out.push_back(parse_real(std::string_view(t).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string canonical_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt_real(v[i]);
  }
  return out;
}

std::vector<std::string> split_choices(const std::string& type) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto bar = type.find('|', start);
    out.push_back(type.substr(start, bar - start));
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  return out;
}

// Canonical text of a value; throws std::invalid_argument on type errors.
std::string canonicalize(const ConfigKey& k, std::string_view raw) {
  const std::string t = trim(raw);
  if (k.type == "real") return fmt_real(parse_real(t));
  if (k.type == "real?") return t.empty() ? "" : fmt_real(parse_real(t));
  if (k.type == "int") return std::to_string(parse_int(t));
  if (k.type == "bool") return parse_bool(t) ? "true" : "false";
  if (k.type == "list") return canonical_list(parse_list(t));
  if (k.type == "string") {
    if (t.size() >= 2 && t.front() == '"' && t.back() == '"') return t.substr(1, t.size() - 2);
    return t;
  }
  const auto choices = split_choices(k.type);
  if (std::find(choices.begin(), choices.end(), t) == choices.end()) {
    throw std::invalid_argument("expected one of " + k.type + ", got '" + t + "'");
  }
  return t;
}

struct Staging {
  // values that need cross-key resolution after all keys are applied
  std::vector<double> couplings, distances, axis, sweep_values, populations;
  std::optional<double> b1, sweep_start, sweep_stop;
  long long sweep_points = 0;
  long long n_spins = 1;
};

using Setter = std::function<void(ParsedConfig&, Staging&, const std::string&)>;

struct Entry {
  ConfigKey info;
  Setter apply;
};

int to_int(const std::string& v) {
  const long long x = std::stoll(v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw std::invalid_argument("integer out of range");
  }
  return static_cast<int>(x);
}

#define REAL(field) [](ParsedConfig& c, Staging&, const std::string& v) { c.experiment.field = parse_real(v); }
#define INT(field) [](ParsedConfig& c, Staging&, const std::string& v) { c.experiment.field = to_int(v); }
#define BOOL(field) [](ParsedConfig& c, Staging&, const std::string& v) { c.experiment.field = v == "true"; }
#define LIST(field) [](ParsedConfig& c, Staging&, const std::string& v) { c.experiment.field = parse_list(v); }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> e = {
      // nv
      {{"nv.D_mhz", "real", "2880", "zero-field splitting D", true}, REAL(nv.D_mhz)},
      {{"nv.g", "real", "2", "electron g-factor", true}, REAL(nv.g)},
      {{"nv.A_par_mhz", "real", "2.2", "N-V 14N hyperfine A_par", false}, REAL(nv.A_par_mhz)},
      {{"nv.A_perp_mhz", "real", "2.1", "N-V 14N hyperfine A_perp", false}, REAL(nv.A_perp_mhz)},
      {{"nv.include_nucleus", "bool", "false",
        "resolve the N-V 14N levels in the levels experiment", false},
       BOOL(nv.include_nucleus)},
      {{"nv.b_gauss", "real", "850", "field along the N-V axis for esr, rabi and echo", true},
       REAL(b_gauss)},
      // bath
      {{"bath.n_spins", "int", "1", "explicit P1 bath spins", false},
       [](ParsedConfig& c, Staging& s, const std::string& v) {
         s.n_spins = std::stoll(v);
         c.experiment.bath.n_spins = to_int(v);
       }},
      {{"bath.coupling_mhz", "list", "0.5",
        "double-flip coupling c per bath spin (one value is broadcast)", false},
       [](ParsedConfig&, Staging& s, const std::string& v) { s.couplings = parse_list(v); }},
      {{"bath.distance_nm", "list", "",
        "point-dipole distance per bath spin; replaces bath.coupling_mhz when set", false},
       [](ParsedConfig&, Staging& s, const std::string& v) { s.distances = parse_list(v); }},
      {{"bath.axis", "list", "1,0,0", "unit vector from the N-V to the bath spins", false},
       [](ParsedConfig&, Staging& s, const std::string& v) { s.axis = parse_list(v); }},
      {{"bath.g", "real", "2", "P1 electron g-factor", false}, REAL(bath.g)},
      {{"bath.A_par_mhz", "real", "114", "P1 14N hyperfine A_par", false}, REAL(bath.A_par_mhz)},
      {{"bath.A_perp_mhz", "real", "81", "P1 14N hyperfine A_perp", false},
       REAL(bath.A_perp_mhz)},
      {{"bath.include_nucleus", "bool", "false", "include the P1 14N nucleus", false},
       BOOL(bath.include_nucleus)},
      {{"bath.dephasing_rate", "real", "20", "Markovian dephasing of each bath electron, 1/us",
        false},
       REAL(bath.dephasing_rate)},
      // noise
      {{"noise.sigma_static_mhz", "real", "1.4", "quasi-static detuning std-dev", false},
       REAL(noise.sigma_static_mhz)},
      {{"noise.gamma_phi", "real", "0.16666666666666666",
        "Markovian coherence decay rate, 1/us (1/T2 with T2 = 6 us)", true},
       REAL(noise.gamma_phi)},
      {{"noise.gamma_1", "real", "0", "relaxation -1 -> 0, 1/us", false}, REAL(noise.gamma_1)},
      {{"noise.n_samples", "int", "512", "quasi-static ensemble size", false},
       INT(noise.n_samples)},
      {{"noise.sampling", "stratified|independent", "stratified",
        "detuning sampling scheme", false},
       [](ParsedConfig& c, Staging&, const std::string& v) {
         c.experiment.noise.sampling = v == "stratified" ? DetuningSampling::Stratified
                                                          : DetuningSampling::Independent;
       }},
      {{"noise.nuclear_averaging", "bool", "false",
        "average over the N-V 14N states (hyperfine shifts -A_par mI)", false},
       BOOL(noise.nuclear.enabled)},
      {{"noise.nuclear_populations", "list", "0.3333333333333333,0.3333333333333333,0.3333333333333333",
        "populations of mI = +1, 0, -1", false},
       [](ParsedConfig&, Staging& s, const std::string& v) { s.populations = parse_list(v); }},
      // readout
      {{"readout.polarization", "real", "0.9", "spin polarization after the laser pulse", false},
       REAL(readout.optics.polarization)},
      {{"readout.contrast", "real", "0.3", "fractional I_PL reduction of m_S = -1", false},
       REAL(readout.optics.contrast)},
      {{"readout.photon_budget", "real", "1", "expected counts per repetition from m_S = 0",
        false},
       REAL(readout.optics.photon_budget)},
      {{"readout.init_us", "real", "5", "initialization laser pulse", true},
       REAL(readout.optics.init_us)},
      {{"readout.readout_us", "real", "2", "readout laser pulse", true},
       REAL(readout.optics.readout_us)},
      {{"readout.repetitions", "int", "1000", "repetitions per point", true},
       INT(readout.optics.repetitions)},
      {{"readout.poisson", "bool", "false", "sample photon counts", false},
       BOOL(readout.poisson)},
      // drive
      {{"drive.f1_mhz", "real", "3", "Rabi frequency at unit power", false}, REAL(drive.f1_mhz)},
      {{"drive.b1_gauss", "real?", "", "RF field amplitude; sets f1 = gamma B1 / 2", false},
       [](ParsedConfig&, Staging& s, const std::string& v) {
         if (!v.empty()) s.b1 = parse_real(v);
       }},
      {{"drive.phase_rad", "real", "0", "RF phase", false}, REAL(drive.phase_rad)},
      {{"drive.detuning_mhz", "real", "0", "transition minus RF frequency", false},
       REAL(drive_detuning_mhz)},
      // sweep
      {{"sweep.values", "list", "", "explicit grid of the swept variable", false},
       [](ParsedConfig&, Staging& s, const std::string& v) { s.sweep_values = parse_list(v); }},
      {{"sweep.start", "real?", "", "first grid value", false},
       [](ParsedConfig&, Staging& s, const std::string& v) {
         if (!v.empty()) s.sweep_start = parse_real(v);
       }},
      {{"sweep.stop", "real?", "", "last grid value", false},
       [](ParsedConfig&, Staging& s, const std::string& v) {
         if (!v.empty()) s.sweep_stop = parse_real(v);
       }},
      {{"sweep.points", "int", "0", "grid points (0: experiment default grid)", false},
       [](ParsedConfig&, Staging& s, const std::string& v) { s.sweep_points = std::stoll(v); }},
      // esr
      {{"esr.pump_rate", "real", "1", "CW optical pumping rate, 1/us", false},
       REAL(esr.pump_rate)},
      {{"esr.span_mhz", "real", "20", "default grid half-width around the transition", false},
       REAL(esr.span_mhz)},
      {{"esr.points", "int", "201", "default grid points", false}, INT(esr.points)},
      // rabi
      {{"rabi.powers", "list", "1,4,9", "relative RF powers", false}, LIST(rabi.powers)},
      {{"rabi.t_max_us", "real", "4", "longest pulse", false}, REAL(rabi.t_max_us)},
      {{"rabi.points", "int", "200", "pulse widths", false}, INT(rabi.points)},
      // echo
      {{"echo.tau_min_us", "real", "0.25", "shortest tau (tau1 = tau2)", false},
       REAL(echo.tau_min_us)},
      {{"echo.tau_max_us", "real", "12", "longest tau", false}, REAL(echo.tau_max_us)},
      {{"echo.points", "int", "48", "tau points", false}, INT(echo.points)},
      {{"echo.tau1_us", "real", "2", "fixed tau1 of the tau2 sweep", false}, REAL(echo.tau1_us)},
      {{"echo.tau2_halfwidth_us", "real", "0.5", "tau2 sweep half-width around tau1", false},
       REAL(echo.tau2_halfwidth_us)},
      {{"echo.tau2_points", "int", "41", "tau2 points", false}, INT(echo.tau2_points)},
      // field sweep
      {{"fieldsweep.start_gauss", "real", "499", "default first field", false},
       REAL(fieldsweep.start_gauss)},
      {{"fieldsweep.stop_gauss", "real", "530", "default last field", false},
       REAL(fieldsweep.stop_gauss)},
      {{"fieldsweep.points", "int", "60", "default field points", false},
       INT(fieldsweep.points)},
      {{"fieldsweep.f1_mhz", "real", "5", "Rabi frequency of the 1/T2' measurement", false},
       REAL(fieldsweep.f1_mhz)},
      {{"fieldsweep.wait_us", "real", "10", "dark interval of the I_PL cycle", false},
       REAL(fieldsweep.wait_us)},
      {{"fieldsweep.rabi_t_max_us", "real", "4", "longest Rabi pulse", false},
       REAL(fieldsweep.rabi_t_max_us)},
      {{"fieldsweep.rabi_points", "int", "200", "Rabi pulse widths", false},
       INT(fieldsweep.rabi_points)},
      // trend
      {{"trend.couplings_mhz", "list", "0.1,0.3,1", "bath coupling per synthetic center", false},
       LIST(trend.couplings_mhz)},
      {{"trend.sigma_per_coupling", "real", "2.8",
        "quasi-static sigma of a center per MHz of coupling", false},
       REAL(trend.sigma_per_coupling)},
      {{"trend.b_rabi_gauss", "real", "850", "field of the T2' measurement", true},
       REAL(trend.b_rabi_gauss)},
      {{"trend.off_resonance_offset_gauss", "real", "20",
        "field offset of the off-resonance I_PL reference", false},
       REAL(trend.off_resonance_offset_gauss)},
      // fit
      {{"fit.model", "damped_cosine|exp_decay|lorentzian", "damped_cosine",
        "model of the fit experiment", false},
       [](ParsedConfig& c, Staging&, const std::string& v) { c.fit.model = v; }},
      {{"fit.input", "string", "", "CSV file of the fit experiment", false},
       [](ParsedConfig& c, Staging&, const std::string& v) { c.fit.input = v; }},
      {{"fit.column", "string", "", "signal column (default: first)", false},
       [](ParsedConfig& c, Staging&, const std::string& v) { c.fit.column = v; }},
      // run
      {{"run.seed", "int", "1", "random seed", false},
       [](ParsedConfig& c, Staging&, const std::string& v) {
         const long long s = std::stoll(v);
         if (s < 0) throw std::invalid_argument("run.seed must be >= 0");
         c.experiment.seed = static_cast<std::uint64_t>(s);
       }},
      {{"run.threads", "int", "1", "worker threads (results do not depend on it)", false},
       INT(threads)},
  };
  return e;
}

#undef REAL
#undef INT
#undef BOOL
#undef LIST

const Entry* find_entry(const std::string& key) {
  for (const auto& e : entries()) {
    if (e.info.key == key) return &e;
  }
  return nullptr;
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return s;
}

void resolve(ParsedConfig& c, const Staging& s, const std::set<std::string>& given) {
  ExperimentConfig& e = c.experiment;
  // bath couplings
  if (s.n_spins < 0) throw ConfigError("bath.n_spins must be >= 0", 0, 0, "bath.n_spins");
  const auto n = static_cast<std::size_t>(s.n_spins);
  auto broadcast = [&](std::vector<double> v, const char* key) {
    if (v.size() == 1 && n > 1) v.assign(n, v.front());
    if (v.size() != n) {
      throw ConfigError(std::string(key) + " needs one value per bath spin (" + std::to_string(n) +
                            "), got " + std::to_string(v.size()),
                        0, 0, key);
    }
    return v;
  };
  e.bath.couplings.clear();
  if (!s.distances.empty()) {
    const auto d = broadcast(s.distances, "bath.distance_nm");
    if (s.axis.size() != 3) throw ConfigError("bath.axis needs 3 components", 0, 0, "bath.axis");
    const Eigen::Vector3d axis(s.axis[0], s.axis[1], s.axis[2]);
    for (double r : d) e.bath.couplings.push_back(DipolarCoupling::geometric(r, axis));
  } else if (n > 0) {
    for (double cc : broadcast(s.couplings, "bath.coupling_mhz")) {
      e.bath.couplings.push_back(DipolarCoupling::direct(cc));
    }
  }
  // nuclear populations
  if (s.populations.size() != 3) {
    throw ConfigError("noise.nuclear_populations needs 3 values (mI = +1, 0, -1)", 0, 0,
                      "noise.nuclear_populations");
  }
  std::copy(s.populations.begin(), s.populations.end(), e.noise.nuclear.populations.begin());
  e.noise.nuclear.A_par_mhz = e.nv.A_par_mhz;
  // drive amplitude
  if (s.b1) {
    if (given.count("drive.f1_mhz")) {
      throw ConfigError("drive.f1_mhz and drive.b1_gauss are mutually exclusive", 0, 0,
                        "drive.b1_gauss");
    }
    if (*s.b1 < 0.0) throw ConfigError("drive.b1_gauss must be >= 0", 0, 0, "drive.b1_gauss");
    e.drive.f1_mhz = 0.5 * e.nv.gamma() * *s.b1;
  }
  // sweep grid
  if (!s.sweep_values.empty()) {
    if (s.sweep_start || s.sweep_stop || s.sweep_points) {
      throw ConfigError("sweep.values excludes sweep.start/stop/points", 0, 0, "sweep.values");
    }
    e.sweep.values = s.sweep_values;
  } else if (s.sweep_start || s.sweep_stop || s.sweep_points) {
    if (!s.sweep_start || !s.sweep_stop || s.sweep_points < 2) {
      throw ConfigError("sweep.start, sweep.stop and sweep.points (>= 2) must be given together",
                        0, 0, "sweep.points");
    }
    e.sweep = SweepGrid::linspace(*s.sweep_start, *s.sweep_stop, static_cast<int>(s.sweep_points));
  }
  e.noise.seed = e.seed;
}

// Position of `key` in the text for diagnostics.
std::pair<int, int> locate(const std::map<std::string, std::pair<int, int>>& pos,
                           const std::string& message) {
  std::string best;
  for (const auto& [k, p] : pos) {
    if (message.find(k) != std::string::npos && k.size() > best.size()) best = k;
  }
  if (best.empty()) return {0, 0};
  return pos.at(best);
}

std::string mentioned_key(const std::string& message) {
  std::string best;
  for (const auto& e : entries()) {
    if (message.find(e.info.key) != std::string::npos && e.info.key.size() > best.size()) {
      best = e.info.key;
    }
  }
  return best;
}

}  // namespace

const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const auto& e : entries()) out.push_back(e.info);
    return out;
  }();
  return keys;
}

std::string suggest_key(const std::string& unknown) {
  const std::string u = lower(unknown);
  const auto dot = u.find('.');
  const std::string section = dot == std::string::npos ? "" : u.substr(0, dot);
  const std::string name = dot == std::string::npos ? u : u.substr(dot + 1);
  std::string best;
  double best_score = 1e9;
  for (const auto& e : entries()) {
    const std::string k = lower(e.info.key);
    const auto kd = k.find('.');
    const std::string ks = k.substr(0, kd);
    const std::string kn = k.substr(kd + 1);
    double score = static_cast<double>(levenshtein(name, kn));
    // a key name that prefixes the unknown one (or vice versa) is a strong hint
    if (!kn.empty() && !name.empty() && (name.rfind(kn, 0) == 0 || kn.rfind(name, 0) == 0)) {
      score = std::min(score, 0.5);
    }
    if (!section.empty() && ks != section) score += 2.0;
    if (score < best_score) {
      best_score = score;
      best = e.info.key;
    }
  }
  const double limit = std::max<double>(2.0, 0.5 * static_cast<double>(name.size()));
  return best_score <= limit ? best : std::string();
}

ParsedConfig parse_config(std::string_view text) {
  struct Raw {
    std::string value;
    int line, column, value_column;
  };
  std::map<std::string, Raw> raw;
  std::map<std::string, std::pair<int, int>> pos;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? text.size() - start
                                                                              : nl - start);
    ++line_no;
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    // strip comments outside double quotes
    bool quoted = false;
    std::size_t cut = line.size();
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        cut = i;
        break;
      }
    }
    if (quoted) throw ConfigError("unterminated string", line_no, static_cast<int>(line.size()));
    line = line.substr(0, cut);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("expected 'section.key = value'", line_no, static_cast<int>(first) + 1);
    }
    const std::string key = trim(line.substr(0, eq));
    const int key_col = static_cast<int>(first) + 1;
    if (key.empty()) throw ConfigError("missing key before '='", line_no, key_col);
    for (char ch : key) {
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.')) {
        throw ConfigError("invalid character '" + std::string(1, ch) + "' in key", line_no,
                          key_col + static_cast<int>(key.find(ch)));
      }
    }
    if (!find_entry(key)) {
      const std::string hint = suggest_key(key);
      throw ConfigError("unknown key '" + key + "'" +
                            (hint.empty() ? std::string() : " (did you mean '" + hint + "'?)"),
                        line_no, key_col, key);
    }
    if (raw.count(key)) {
      throw ConfigError("duplicate key '" + key + "' (first set on line " +
                            std::to_string(raw[key].line) + ")",
                        line_no, key_col, key);
    }
    const auto vfirst = line.find_first_not_of(" \t", eq + 1);
    const int vcol = static_cast<int>(vfirst == std::string_view::npos ? eq + 2 : vfirst + 1);
    raw[key] = {std::string(line.substr(eq + 1)), line_no, key_col, vcol};
    pos[key] = {line_no, key_col};
  }

  ParsedConfig cfg;
  Staging staging;
  std::set<std::string> given;
  for (const auto& e : entries()) {
    std::string canon;
    auto it = raw.find(e.info.key);
    try {
      canon = canonicalize(e.info, it == raw.end() ? e.info.default_text : it->second.value);
      e.apply(cfg, staging, canon);
    } catch (const std::invalid_argument& ex) {
      if (it == raw.end()) throw;  // defaults are well-formed
      throw ConfigError(e.info.key + ": " + ex.what(), it->second.line, it->second.value_column,
                        e.info.key);
    } catch (const std::out_of_range&) {
      if (it == raw.end()) throw;
      throw ConfigError(e.info.key + ": value out of range", it->second.line,
                        it->second.value_column, e.info.key);
    }
    if (it != raw.end()) {
      given.insert(e.info.key);
      cfg.explicit_keys.push_back(e.info.key);
    }
    cfg.canonical[e.info.key] = canon;
  }
  try {
    resolve(cfg, staging, given);
    cfg.experiment.validate();
  } catch (const ConfigError& ex) {
    auto it = pos.find(ex.key());
    if (it != pos.end() && ex.line() == 0) {
      throw ConfigError(ex.what(), it->second.first, it->second.second, ex.key());
    }
    throw;
  } catch (const std::invalid_argument& ex) {
    const auto [l, c] = locate(pos, ex.what());
    throw ConfigError(std::string("validation error: ") + ex.what(), l, c,
                      mentioned_key(ex.what()));
  }
  return cfg;
}

ParsedConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void set_seed(ParsedConfig& cfg, std::uint64_t seed) {
  cfg.experiment.seed = seed;
  cfg.experiment.noise.seed = seed;
  cfg.canonical["run.seed"] = std::to_string(seed);
}

std::string config_checksum(const ParsedConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  };
  // std::map iterates in sorted key order
  for (const auto& [k, v] : cfg.canonical) {
    if (k == "run.threads") continue;
    feed(k);
    feed("=");
    feed(v);
    feed("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string schema_help() {
  std::ostringstream out;
  out << "Configuration keys (section.key = value; '#' starts a comment; lists are comma "
         "separated).\nDefaults marked [not from paper] are modelling choices; unmarked defaults "
         "are the published values.\n";
  std::string section;
  for (const auto& k : config_schema()) {
    const std::string s = k.key.substr(0, k.key.find('.'));
    if (s != section) {
      section = s;
      out << "\n[" << section << "]\n";
    }
    out << "  " << k.key << " (" << k.type << ") = "
        << (k.default_text.empty() ? "<unset>" : k.default_text) << "\n      " << k.description;
    if (!k.from_paper) out << " [not from paper]";
    out << "\n";
  }
  return out.str();
}

}  // namespace nvsim
