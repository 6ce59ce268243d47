#include "rwre/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace rwre::io {

namespace {

std::string_view trim(std::string_view s, int& col_offset) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    col_offset = static_cast<int>(b);
    return s.substr(b, e - b);
}

double parse_double_at(std::string_view text, int line, int col) {
    try {
        std::size_t used = 0;
        const double v = std::stod(std::string(text), &used);
        while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("expected a number, got '" + std::string(text) + "'", line, col);
    }
}

std::int64_t parse_int_at(std::string_view text, int line, int col) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || p != text.data() + text.size())
        throw ConfigError("expected an integer, got '" + std::string(text) + "'", line, col);
    return v;
}

}  // namespace

Config Config::parse_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        // strip comments
        if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
        int off = 0;
        std::string_view line = trim(raw, off);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("unterminated section header", line_no, off + 1);
            int inner_off = 0;
            std::string_view name = trim(line.substr(1, line.size() - 2), inner_off);
            if (name.empty()) throw ConfigError("empty section name", line_no, off + 1);
            section = std::string(name);
            cfg.sections_[section];  // ensure the section exists even if empty
            cfg.section_lines_.emplace(section, line_no);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("expected 'key = value'", line_no, off + 1);
        int koff = 0, voff = 0;
        std::string_view key = trim(line.substr(0, eq), koff);
        std::string_view val = trim(line.substr(eq + 1), voff);
        if (key.empty()) throw ConfigError("empty key", line_no, off + 1);
        if (section.empty())
            throw ConfigError("key outside of any [section]", line_no, off + koff + 1);
        cfg.sections_[section].push_back(
            Entry{std::string(key),
                  ConfigValue{std::string(val), line_no, off + static_cast<int>(eq) + 1 + voff + 1}});
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

bool Config::has_section(const std::string& section) const {
    return sections_.count(section) != 0;
}

const ConfigValue* Config::find(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    if (it == sections_.end()) return nullptr;
    const ConfigValue* found = nullptr;
    for (const auto& e : it->second)
        if (e.key == key) found = &e.value;  // last occurrence wins
    return found;
}

std::vector<ConfigValue> Config::find_all(const std::string& section, const std::string& key) const {
    std::vector<ConfigValue> out;
    auto it = sections_.find(section);
    if (it == sections_.end()) return out;
    for (const auto& e : it->second)
        if (e.key == key) out.push_back(e.value);
    return out;
}

const ConfigValue& Config::require(const std::string& section, const std::string& key) const {
    const ConfigValue* v = find(section, key);
    if (!v) {
        auto it = section_lines_.find(section);
        const int line = it == section_lines_.end() ? 0 : it->second;
        throw ConfigError("missing key '" + key + "' in section [" + section + "]", line, 1);
    }
    return *v;
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
    return require(section, key).text;
}

double Config::get_double(const std::string& section, const std::string& key) const {
    const ConfigValue& v = require(section, key);
    return parse_double_at(v.text, v.line, v.col);
}

std::int64_t Config::get_int(const std::string& section, const std::string& key) const {
    const ConfigValue& v = require(section, key);
    return parse_int_at(v.text, v.line, v.col);
}

std::uint64_t Config::get_u64(const std::string& section, const std::string& key) const {
    const ConfigValue& v = require(section, key);
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
    if (ec != std::errc() || p != v.text.data() + v.text.size())
        throw ConfigError("expected an unsigned integer, got '" + v.text + "'", v.line, v.col);
    return out;
}

std::optional<double> Config::get_double_opt(const std::string& section, const std::string& key) const {
    const ConfigValue* v = find(section, key);
    if (!v) return std::nullopt;
    return parse_double_at(v->text, v->line, v->col);
}

std::optional<std::int64_t> Config::get_int_opt(const std::string& section, const std::string& key) const {
    const ConfigValue* v = find(section, key);
    if (!v) return std::nullopt;
    return parse_int_at(v->text, v->line, v->col);
}

std::optional<std::string> Config::get_string_opt(const std::string& section,
                                                  const std::string& key) const {
    const ConfigValue* v = find(section, key);
    if (!v) return std::nullopt;
    return v->text;
}

std::vector<double> parse_double_list(const ConfigValue& v) {
    std::vector<double> out;
    std::string_view rest = v.text;
    int col = v.col;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        std::string_view item = rest.substr(0, comma);
        int off = 0;
        std::string_view t = trim(item, off);
        if (t.empty()) throw ConfigError("empty list item", v.line, col + off);
        out.push_back(parse_double_at(t, v.line, col + off));
        if (comma == std::string_view::npos) break;
        col += static_cast<int>(comma) + 1;
        rest = rest.substr(comma + 1);
    }
    if (out.empty()) throw ConfigError("empty list", v.line, v.col);
    return out;
}

std::vector<std::pair<double, double>> parse_pair_list(const ConfigValue& v) {
    std::vector<std::pair<double, double>> out;
    std::string_view rest = v.text;
    int col = v.col;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        std::string_view item = rest.substr(0, comma);
        const auto colon = item.find(':');
        if (colon == std::string_view::npos)
            throw ConfigError("expected 'value:probability' pair", v.line, col);
        int off1 = 0, off2 = 0;
        std::string_view a = trim(item.substr(0, colon), off1);
        std::string_view b = trim(item.substr(colon + 1), off2);
        out.emplace_back(parse_double_at(a, v.line, col + off1),
                         parse_double_at(b, v.line, col + static_cast<int>(colon) + 1 + off2));
        if (comma == std::string_view::npos) break;
        col += static_cast<int>(comma) + 1;
        rest = rest.substr(comma + 1);
    }
    if (out.empty()) throw ConfigError("empty pair list", v.line, v.col);
    return out;
}

env::EnvironmentSpec spec_from_config(const Config& cfg, const std::string& section) {
    const std::string kind = cfg.get_string(section, "kind");
    env::EnvironmentSpec spec;
    if (kind == "constant") {
        spec = env::make_constant(cfg.get_double(section, "p"));
    } else if (kind == "finite_support") {
        const auto pairs = parse_pair_list(cfg.require(section, "support"));
        std::vector<double> values, weights;
        for (auto [val, w] : pairs) {
            values.push_back(val);
            weights.push_back(w);
        }
        spec = env::make_finite_support(std::move(values), std::move(weights));
    } else if (kind == "periodic") {
        spec = env::make_periodic(parse_double_list(cfg.require(section, "period")));
    } else if (kind == "markov") {
        const ConfigValue& t = cfg.require(section, "transition");
        std::vector<std::vector<double>> rows;
        std::string_view rest = t.text;
        while (true) {
            const auto semi = rest.find(';');
            ConfigValue rowv{std::string(rest.substr(0, semi)), t.line, t.col};
            // rows use spaces or commas between entries
            for (char& c : rowv.text)
                if (c == ' ' || c == '\t') c = ',';
            std::string squashed;
            bool prev_comma = false;
            for (char c : rowv.text) {
                if (c == ',') {
                    if (!prev_comma && !squashed.empty()) squashed += c;
                    prev_comma = true;
                } else {
                    squashed += c;
                    prev_comma = false;
                }
            }
            if (!squashed.empty() && squashed.back() == ',') squashed.pop_back();
            rowv.text = squashed;
            rows.push_back(parse_double_list(rowv));
            if (semi == std::string_view::npos) break;
            rest = rest.substr(semi + 1);
        }
        spec = env::make_markov(std::move(rows),
                                parse_double_list(cfg.require(section, "omega")));
    } else if (kind == "lattice_product") {
        const int dim = static_cast<int>(cfg.get_int(section, "dim"));
        std::vector<std::vector<double>> atoms;
        std::vector<double> weights;
        for (const ConfigValue& av : cfg.find_all(section, "atom")) {
            const auto colon = av.text.find(':');
            if (colon == std::string::npos)
                throw ConfigError("expected 'weight : entries'", av.line, av.col);
            int off = 0;
            weights.push_back(
                parse_double_at(trim(std::string_view(av.text).substr(0, colon), off), av.line, av.col));
            ConfigValue entries{av.text.substr(colon + 1), av.line,
                                av.col + static_cast<int>(colon) + 1};
            for (char& c : entries.text)
                if (c == ' ' || c == '\t') c = ',';
            std::string squashed;
            bool prev_comma = false;
            for (char c : entries.text) {
                if (c == ',') {
                    if (!prev_comma && !squashed.empty()) squashed += c;
                    prev_comma = true;
                } else {
                    squashed += c;
                    prev_comma = false;
                }
            }
            if (!squashed.empty() && squashed.back() == ',') squashed.pop_back();
            entries.text = squashed;
            atoms.push_back(parse_double_list(entries));
        }
        if (atoms.empty()) {
            auto it = cfg.find(section, "kind");
            throw ConfigError("lattice_product needs at least one 'atom' line", it ? it->line : 0, 1);
        }
        spec = env::make_lattice_product(dim, std::move(atoms), std::move(weights));
    } else {
        const ConfigValue& v = cfg.require(section, "kind");
        throw ConfigError("unknown environment kind '" + kind + "'", v.line, v.col);
    }
    if (auto eps = cfg.get_double_opt(section, "epsilon")) {
        if (*eps <= 0.0 || *eps > spec.ellipticity_bound) {
            const ConfigValue* v = cfg.find(section, "epsilon");
            throw ConfigError("declared epsilon is not a valid ellipticity bound for this law",
                              v->line, v->col);
        }
        spec.ellipticity_bound = *eps;
        spec.validate();
    }
    return spec;
}

}  // namespace rwre::io
