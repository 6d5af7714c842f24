#pragma once

// INI experiment configuration: a [run] section shared by every command plus
// one optional section per command.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "randcurv/fields.hpp"
#include "randcurv/point_sets.hpp"

namespace randcurv::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Section = std::map<std::string, std::string>;

struct ExperimentConfig {
  std::string command;
  std::map<std::string, Section> sections;  // keys and values trimmed
  std::uint64_t seed = 1;
  std::string seed_source = "default";  // default | file | env | flag

  bool has(const std::string& section, const std::string& key) const;
  std::string text(const std::string& section, const std::string& key,
                   const std::string& fallback) const;
  double number(const std::string& section, const std::string& key, double fallback) const;
  long integer(const std::string& section, const std::string& key, long fallback) const;
  bool flag(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& section, const std::string& key) const;

  /// "section.key=value" lines sorted by section and key, with run.seed
  /// replaced by the effective seed.
  std::string canonical() const;
  std::string hash() const;  // SHA-256 hex of canonical()
};

/// Reads an INI file. Unknown sections and keys are rejected.
ExperimentConfig load_config(const std::string& path, const std::string& command);
ExperimentConfig parse_config(const std::string& text, const std::string& command);

/// Applies the seed precedence: flag, then RANDCURV_SEED, then [run] seed.
void resolve_seed(ExperimentConfig& config, std::optional<std::uint64_t> flag_seed);

std::string sha256_hex(const std::string& data);

/// Field specification built from [run].
struct RunSetup {
  RandomFieldSpec spec;
  PointSet grid;
  std::size_t samples = 0;
  std::uint64_t first_draw = 0;
};

RunSetup make_setup(const ExperimentConfig& config, FieldKind which);

/// Sphere Fibonacci 4N or torus lattice 2G for the refinement study; nullopt
/// for user spectra.
std::optional<PointSet> refined_grid(const ExperimentConfig& config, const RunSetup& setup);

}  // namespace randcurv::cli
