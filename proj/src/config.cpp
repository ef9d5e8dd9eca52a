#include "pbc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "pbc/errors.hpp"

namespace pbc {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("'" + key + "' expects a number, got '" + text + "'");
  }
  return value;
}

int parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("'" + key + "' expects an integer, got '" + text + "'");
  }
  return value;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!trim(item).empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

std::string format(double v) {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  os << v;
  return os.str();
}

std::string format(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format(v[i]);
  }
  return out;
}

struct Field {
  const char* key;
  bool reference_relevant;
  std::function<std::string(const ProblemConfig&)> get;
  std::function<void(ProblemConfig&, const std::string&, const std::string&)> set;
};

#define PBC_DOUBLE(name, member, rel)                                               \
  Field {                                                                           \
    name, rel, [](const ProblemConfig& c) { return format(c.member); },             \
        [](ProblemConfig& c, const std::string& k, const std::string& v) {          \
          c.member = parse_double(k, v);                                            \
        }                                                                           \
  }
#define PBC_INT(name, member, rel)                                                  \
  Field {                                                                           \
    name, rel, [](const ProblemConfig& c) { return std::to_string(c.member); },     \
        [](ProblemConfig& c, const std::string& k, const std::string& v) {          \
          c.member = parse_int(k, v);                                               \
        }                                                                           \
  }
#define PBC_LIST(name, member)                                                      \
  Field {                                                                           \
    name, false, [](const ProblemConfig& c) { return format(c.member); },           \
        [](ProblemConfig& c, const std::string& k, const std::string& v) {          \
          c.member = parse_list(k, v);                                              \
        }                                                                           \
  }
#define PBC_STRING(name, member)                                                    \
  Field {                                                                           \
    name, false, [](const ProblemConfig& c) { return c.member; },                   \
        [](ProblemConfig& c, const std::string&, const std::string& v) {            \
          c.member = trim(v);                                                       \
        }                                                                           \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      PBC_DOUBLE("nu", nu, true),
      PBC_DOUBLE("T", t_final, true),
      PBC_INT("N_t", n_steps, true),
      PBC_DOUBLE("sigma", sigma, true),
      PBC_DOUBLE("u_l", u_lower, true),
      PBC_DOUBLE("u_u", u_upper, true),
      PBC_DOUBLE("y0.amplitude", y0.amplitude, true),
      PBC_DOUBLE("y0.decay", y0.decay, true),
      PBC_DOUBLE("y_d.amplitude", y_d.amplitude, true),
      PBC_DOUBLE("y_d.decay", y_d.decay, true),
      PBC_DOUBLE("chi.amplitude", chi.amplitude, true),
      PBC_DOUBLE("chi.decay", chi.decay, true),
      PBC_DOUBLE("h", h, false),
      PBC_DOUBLE("epsilon", epsilon, false),
      PBC_DOUBLE("seed.lo", seed_lo, false),
      PBC_DOUBLE("seed.hi", seed_hi, false),
      PBC_DOUBLE("seed.margin", seed_margin, false),
      PBC_DOUBLE("blowup_cap", blowup_cap, false),
      PBC_DOUBLE("reference.L", ref_half_width, true),
      PBC_DOUBLE("reference.h", ref_spacing, true),
      PBC_DOUBLE("error.lo", error_lo, false),
      PBC_DOUBLE("error.hi", error_hi, false),
      PBC_DOUBLE("opt.tol", gradient_tol, true),
      PBC_INT("opt.max_iterations", max_iterations, true),
      PBC_DOUBLE("opt.initial_step", initial_step, true),
      PBC_DOUBLE("opt.contraction", contraction, true),
      PBC_DOUBLE("opt.sufficient_decrease", sufficient_decrease, true),
      PBC_INT("opt.max_backtracks", max_backtracks, true),
      PBC_LIST("verify.eps", verify_eps),
      PBC_DOUBLE("verify.tol", verify_tol, false),
      PBC_LIST("sweep.eps", sweep_eps),
      PBC_DOUBLE("sweep.eps.h", sweep_eps_h, false),
      PBC_LIST("sweep.inv_h", sweep_inv_h),
      PBC_DOUBLE("sweep.h.epsilon", sweep_h_eps, false),
      PBC_LIST("sweep.coupled.h", sweep_coupled_h),
      PBC_STRING("output_dir", output_dir),
      PBC_STRING("cache_dir", cache_dir),
  };
  return table;
}

#undef PBC_DOUBLE
#undef PBC_INT
#undef PBC_LIST
#undef PBC_STRING

}  // namespace

void ProblemConfig::set(const std::string& key, const std::string& value) {
  const std::string k = trim(key);
  for (const Field& f : fields()) {
    if (k == f.key) {
      f.set(*this, k, value);
      return;
    }
  }
  throw ConfigError("unknown key '" + k + "'");
}

void ProblemConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  require(positive(nu), "nu must be positive");
  require(positive(t_final), "T must be positive");
  require(n_steps >= 1, "N_t must be at least 1");
  require(std::isfinite(sigma) && sigma >= 0.0, "sigma must be non-negative");
  require(std::isfinite(u_lower) && std::isfinite(u_upper) && u_lower <= u_upper,
          "need finite bounds u_l <= u_u");
  require(positive(h), "h must be positive");
  require(positive(epsilon), "epsilon must be positive");
  require(seed_lo < seed_hi && h < seed_hi - seed_lo, "seed interval must be longer than h");
  require(std::isfinite(seed_margin) && seed_margin >= 0.0, "seed margin must be non-negative");
  require(positive(blowup_cap), "blow-up cap must be positive");
  require(positive(ref_half_width) && positive(ref_spacing) && ref_spacing < ref_half_width,
          "reference grid needs 0 < reference.h < reference.L");
  require(error_lo < error_hi, "error window must be non-empty");
  require(std::isfinite(gradient_tol) && gradient_tol >= 0.0, "opt.tol must be non-negative");
  require(max_iterations >= 0, "opt.max_iterations must be non-negative");
  require(positive(initial_step), "opt.initial_step must be positive");
  require(contraction > 0.0 && contraction < 1.0, "opt.contraction must lie in (0, 1)");
  require(sufficient_decrease > 0.0 && sufficient_decrease < 1.0,
          "opt.sufficient_decrease must lie in (0, 1)");
  require(max_backtracks >= 0, "opt.max_backtracks must be non-negative");
  require(positive(verify_tol), "verify.tol must be positive");
  for (double e : verify_eps) require(positive(e), "verify.eps entries must be positive");
  for (double e : sweep_eps) require(positive(e), "sweep.eps entries must be positive");
  for (double v : sweep_inv_h) require(positive(v), "sweep.inv_h entries must be positive");
  for (double v : sweep_coupled_h) require(positive(v), "sweep.coupled.h entries must be positive");
  require(positive(sweep_eps_h) && positive(sweep_h_eps), "sweep parameters must be positive");
  require(!output_dir.empty(), "output_dir must not be empty");
}

OptimizerSettings ProblemConfig::optimizer() const {
  OptimizerSettings s;
  s.sigma = sigma;
  s.initial_step = initial_step;
  s.contraction = contraction;
  s.sufficient_decrease = sufficient_decrease;
  s.gradient_tol = gradient_tol;
  s.max_iterations = max_iterations;
  s.max_backtracks = max_backtracks;
  return s;
}

ReferenceSettings ProblemConfig::reference() const {
  ReferenceSettings s;
  s.half_width = ref_half_width;
  s.spacing = ref_spacing;
  return s;
}

ControlFunction ProblemConfig::initial_control() const {
  const double start = std::clamp(0.0, u_lower, u_upper);
  return ControlFunction::constant(grid(), start, u_lower, u_upper);
}

std::string ProblemConfig::resolved_cache_dir() const {
  return cache_dir.empty() ? output_dir + "/cache" : cache_dir;
}

std::uint64_t ProblemConfig::reference_hash() const {
  std::uint64_t hash = 14695981039346656037ull;
  auto mix = [&](const std::string& s) {
    for (unsigned char ch : s) {
      hash ^= ch;
      hash *= 1099511628211ull;
    }
  };
  for (const Field& f : fields()) {
    if (!f.reference_relevant) continue;
    mix(f.key);
    mix("=");
    mix(f.get(*this));
    mix("\n");
  }
  return hash;
}

ProblemConfig parse_config(std::istream& in) {
  ProblemConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    config.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return config;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

void serialize_config(std::ostream& out, const ProblemConfig& config) {
  for (const Field& f : fields()) out << f.key << " = " << f.get(config) << '\n';
}

std::string serialize_config(const ProblemConfig& config) {
  std::ostringstream os;
  serialize_config(os, config);
  return os.str();
}

}  // namespace pbc
