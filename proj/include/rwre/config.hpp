// config.hpp -- plain-text experiment configs: [section] headers followed by
// key = value lines. Parse errors carry line/column positions.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwre/environment.hpp"

namespace rwre::io {

struct ConfigError : std::runtime_error {
    ConfigError(const std::string& msg, int line, int col)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ", column " +
                             std::to_string(col) + ")"),
          line(line),
          col(col) {}
    int line;
    int col;
};

struct ConfigValue {
    std::string text;
    int line = 0;
    int col = 0;
};

class Config {
  public:
    static Config parse_string(const std::string& text);
    static Config parse_file(const std::string& path);

    bool has_section(const std::string& section) const;
    const ConfigValue* find(const std::string& section, const std::string& key) const;
    // All values for a repeated key, in file order.
    std::vector<ConfigValue> find_all(const std::string& section, const std::string& key) const;

    const ConfigValue& require(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key) const;
    std::int64_t get_int(const std::string& section, const std::string& key) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key) const;

    std::optional<double> get_double_opt(const std::string& section, const std::string& key) const;
    std::optional<std::int64_t> get_int_opt(const std::string& section, const std::string& key) const;
    std::optional<std::string> get_string_opt(const std::string& section, const std::string& key) const;

  private:
    struct Entry {
        std::string key;
        ConfigValue value;
    };
    std::map<std::string, std::vector<Entry>> sections_;
    // line of each [section] header, for diagnostics on missing keys
    std::map<std::string, int> section_lines_;
};

// Comma-separated doubles: "0.8, 0.4".
std::vector<double> parse_double_list(const ConfigValue& v);
// Comma-separated value:probability pairs: "0.9:0.5, 0.4:0.5".
std::vector<std::pair<double, double>> parse_pair_list(const ConfigValue& v);

// Build an environment law from a config section. Keys:
//   kind       constant | finite_support | periodic | markov | lattice_product
//   p          (constant)
//   support    value:prob pairs (finite_support)
//   period     comma-separated omega values (periodic)
//   transition semicolon-separated rows of space/comma-separated entries (markov)
//   omega      per-state omega values (markov)
//   dim        lattice dimension (lattice_product)
//   atom       repeated "weight : p+1 p-1 p+2 ..." lines (lattice_product)
//   epsilon    optional declared ellipticity bound
env::EnvironmentSpec spec_from_config(const Config& cfg, const std::string& section = "environment");

}  // namespace rwre::io
