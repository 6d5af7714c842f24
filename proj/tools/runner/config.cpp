#include "config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "randcurv/spectrum_file.hpp"

namespace randcurv::cli {

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"run",
       {"geometry", "spectrum_file", "scheme", "s", "T", "coefficients", "indexing", "negative_scales",
        "truncation", "tail_tolerance", "reference", "curvature", "samples", "seed", "first_draw", "grid",
        "depth"}},
      {"sample", {"draws", "a"}},
      {"p2", {"amplitudes", "refine"}},
      {"euler", {"thresholds", "u_min", "u_max", "u_count"}},
      {"linf", {"u", "ratio", "mode", "refine"}},
      {"heat", {"T"}},
      {"bounds", {"n", "sigma_v", "sigma_2", "alpha", "amplitudes", "C1", "C2", "inf_R0sq", "lambda1"}},
      {"qsign", {"t", "level", "amplitudes", "C1", "C2"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_number(const std::string& where, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError(where + ": not a number: '" + v + "'");
  }
  if (used != v.size() || !std::isfinite(x)) throw ConfigError(where + ": not a number: '" + v + "'");
  return x;
}

std::uint64_t to_seed(const std::string& where, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError(where + ": seed must be a nonnegative integer, got '" + v + "'");
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw ConfigError(where + ": seed out of range: '" + v + "'");
  }
}

}  // namespace

bool ExperimentConfig::has(const std::string& section, const std::string& key) const {
  const auto s = sections.find(section);
  return s != sections.end() && s->second.count(key) > 0;
}

std::string ExperimentConfig::text(const std::string& section, const std::string& key,
                                   const std::string& fallback) const {
  if (!has(section, key)) return fallback;
  return sections.at(section).at(key);
}

double ExperimentConfig::number(const std::string& section, const std::string& key, double fallback) const {
  if (!has(section, key)) return fallback;
  return to_number(section + "." + key, sections.at(section).at(key));
}

long ExperimentConfig::integer(const std::string& section, const std::string& key, long fallback) const {
  const double x = number(section, key, static_cast<double>(fallback));
  if (x != std::floor(x) || std::abs(x) > 1e15)
    throw ConfigError(section + "." + key + ": expected an integer");
  return static_cast<long>(x);
}

bool ExperimentConfig::flag(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = sections.at(section).at(key);
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigError(section + "." + key + ": expected true or false, got '" + v + "'");
}

std::vector<double> ExperimentConfig::numbers(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  if (!has(section, key)) return out;
  std::stringstream ss(sections.at(section).at(key));
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(to_number(section + "." + key, item));
  }
  return out;
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream out;
  out << "command=" << command << '\n';
  for (const auto& [name, keys] : sections)
    for (const auto& [k, v] : keys) {
      if (name == "run" && k == "seed") continue;
      out << name << '.' << k << '=' << v << '\n';
    }
  out << "run.seed=" << seed << '\n';
  return out.str();
}

std::string ExperimentConfig::hash() const { return sha256_hex(canonical()); }

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

ExperimentConfig parse_config(const std::string& text, const std::string& command) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  ExperimentConfig cfg;
  cfg.command = command;
  for (const auto& [name, body] : tree) {
    const auto allowed = known_keys().find(name);
    if (allowed == known_keys().end()) throw ConfigError("config: unknown section [" + name + "]");
    if (body.empty() && !body.data().empty()) throw ConfigError("config: key '" + name + "' outside a section");
    for (const auto& [key, value] : body) {
      if (!allowed->second.count(key)) throw ConfigError("config: unknown key " + name + "." + key);
      cfg.sections[name][key] = trim(value.data());
    }
  }
  if (cfg.has("run", "seed")) {
    cfg.seed = to_seed("run.seed", cfg.text("run", "seed", ""));
    cfg.seed_source = "file";
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), command);
}

void resolve_seed(ExperimentConfig& config, std::optional<std::uint64_t> flag_seed) {
  if (flag_seed) {
    config.seed = *flag_seed;
    config.seed_source = "flag";
    return;
  }
  if (const char* env = std::getenv("RANDCURV_SEED"); env && *env) {
    config.seed = to_seed("RANDCURV_SEED", trim(env));
    config.seed_source = "env";
  }
}

namespace {

SpectrumModel make_spectrum(const ExperimentConfig& c, const std::string& geometry, int truncation) {
  if (geometry == "sphere2") return SpectrumModel::sphere2(truncation);
  if (geometry == "torus2") return SpectrumModel::flat_torus2(truncation);
  if (geometry == "sphere4") return SpectrumModel::round_sphere4_paneitz(truncation);
  if (geometry == "user") {
    if (!c.has("run", "spectrum_file")) throw ConfigError("run.geometry = user needs run.spectrum_file");
    return read_spectrum_file(c.text("run", "spectrum_file", ""));
  }
  throw ConfigError("run.geometry: unknown geometry '" + geometry + "' (sphere2, torus2, sphere4, user)");
}

int default_truncation(const std::string& geometry) {
  if (geometry == "torus2") return 20;
  if (geometry == "sphere4") return 10;
  return 12;
}

}  // namespace

RunSetup make_setup(const ExperimentConfig& c, FieldKind which) {
  const std::string geometry = c.text("run", "geometry", "sphere2");
  RunSetup setup;
  const long requested = c.integer("run", "truncation", geometry == "user" ? 0 : default_truncation(geometry));
  if (geometry != "user" && requested < 1) throw ConfigError("run.truncation must be >= 1");
  SpectrumModel spectrum = make_spectrum(c, geometry, static_cast<int>(std::max(1L, requested)));
  const int M = geometry == "user" && requested == 0 ? spectrum.level_count() : static_cast<int>(requested);
  if (M < 1 || M > spectrum.level_count())
    throw ConfigError("run.truncation must lie in [1, " + std::to_string(spectrum.level_count()) + "]");

  const double tol = c.number("run", "tail_tolerance", kDefaultTailTolerance);
  if (!(tol > 0.0)) throw ConfigError("run.tail_tolerance must be positive");
  const std::string scheme = c.text("run", "scheme", geometry == "sphere2" ? "normalized" : "power_law");
  CoefficientScheme coeffs;
  try {
    if (scheme == "normalized") {
      if (geometry != "sphere2") throw ConfigError("run.scheme = normalized is defined on sphere2 only");
      coeffs = make_sphere_normalized(c.number("run", "s", 8.0), M, tol);
    } else if (scheme == "power_law") {
      coeffs = make_power_law(c.number("run", "s", 8.0), spectrum, M, tol);
    } else if (scheme == "heat") {
      coeffs = make_heat_kernel(c.number("run", "T", 1.0), spectrum, M, tol);
    } else if (scheme == "explicit") {
      const std::string ix = c.text("run", "indexing", "eigenfunction");
      if (ix != "eigenfunction" && ix != "eigenspace")
        throw ConfigError("run.indexing must be eigenfunction or eigenspace");
      std::vector<double> values = c.numbers("run", "coefficients");
      if (values.empty()) throw ConfigError("run.scheme = explicit needs run.coefficients");
      if (static_cast<int>(values.size()) > spectrum.level_count())
        throw ConfigError("run.coefficients: more values than spectrum levels");
      coeffs = make_explicit(values,
                             ix == "eigenspace" ? Indexing::PerEigenspace : Indexing::PerEigenfunction,
                             spectrum, c.numbers("run", "negative_scales"));
    } else {
      throw ConfigError("run.scheme: unknown scheme '" + scheme + "' (normalized, power_law, heat, explicit)");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("run: ") + e.what());
  }

  if (geometry == "sphere2") setup.grid = fibonacci_sphere(static_cast<std::size_t>(c.integer("run", "grid", 4096)));
  else if (geometry == "torus2") setup.grid = torus_lattice(static_cast<std::size_t>(c.integer("run", "grid", 32)));
  else if (geometry == "user") setup.grid = user_point_set(spectrum);
  if (geometry != "sphere4" && c.integer("run", "grid", 1) < 1) throw ConfigError("run.grid must be >= 1");

  const std::string curvature = c.text("run", "curvature", spectrum.op == SpectralOperator::Gjms ? "q" : "scalar");
  if (curvature != "scalar" && curvature != "q") throw ConfigError("run.curvature must be scalar or q");

  std::optional<ReferenceCurvature> reference;
  const std::string ref = c.text("run", "reference", "");
  if (ref == "file") {
    if (!spectrum.user || spectrum.user->reference.empty())
      throw ConfigError("run.reference = file needs a reference line in the spectrum file");
    reference = ReferenceCurvature::on_grid(spectrum.user->reference);
  } else if (!ref.empty()) {
    reference = ReferenceCurvature::uniform(c.number("run", "reference", 0.0));
  } else if (geometry == "sphere2") {
    reference = ReferenceCurvature::uniform(1.0);  // R1 e^{af} = 1 - a h on the round sphere
  } else if (geometry == "torus2") {
    reference = ReferenceCurvature::uniform(0.0);
  } else if (geometry == "sphere4") {
    reference = ReferenceCurvature::uniform(curvature == "q" ? 3.0 : 12.0);
  } else if (spectrum.user && !spectrum.user->reference.empty()) {
    reference = ReferenceCurvature::on_grid(spectrum.user->reference);
  }

  setup.spec = RandomFieldSpec{std::move(spectrum), std::move(coeffs), which, reference,
                               curvature == "q" ? CurvatureKind::Q : CurvatureKind::Scalar};
  const long samples = c.integer("run", "samples", 10000);
  if (samples < 1) throw ConfigError("run.samples must be >= 1");
  setup.samples = static_cast<std::size_t>(samples);
  const long first = c.integer("run", "first_draw", 0);
  if (first < 0) throw ConfigError("run.first_draw must be >= 0");
  setup.first_draw = static_cast<std::uint64_t>(first);
  return setup;
}

std::optional<PointSet> refined_grid(const ExperimentConfig& c, const RunSetup& setup) {
  switch (setup.spec.spectrum.geometry) {
    case Geometry::Sphere2:
      return fibonacci_sphere(4 * static_cast<std::size_t>(c.integer("run", "grid", 4096)));
    case Geometry::FlatTorus2:
      return torus_lattice(2 * static_cast<std::size_t>(c.integer("run", "grid", 32)));
    default:
      return std::nullopt;
  }
}

}  // namespace randcurv::cli
