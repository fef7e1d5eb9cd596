#pragma once

#include <map>
#include <string>
#include <vector>

namespace lnl {

// Flat key-value experiment config: one `key = value` per line, '#' starts a
// comment. std::map keeps serialization deterministic.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(const std::string& text);
ConfigMap parse_config_file(const std::string& path);

// "key=value" override; later calls win.
void apply_override(ConfigMap& cfg, const std::string& key_equals_value);

std::string serialize_config(const ConfigMap& cfg);
void write_config_file(const ConfigMap& cfg, const std::string& path);

// Typed getters; throw std::invalid_argument naming the key on bad values.
std::string get_string(const ConfigMap& cfg, const std::string& key, const std::string& fallback);
long get_int(const ConfigMap& cfg, const std::string& key, long fallback);
double get_double(const ConfigMap& cfg, const std::string& key, double fallback);
bool get_bool(const ConfigMap& cfg, const std::string& key, bool fallback);

}  // namespace lnl
