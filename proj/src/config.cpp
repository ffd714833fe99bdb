#include "act/config.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include "act/errors.hpp"

namespace act {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::pair<std::string, std::string> split_dotted(const std::string& dotted) {
  const auto dot = dotted.find('.');
  if (dot == std::string::npos) return {"", dotted};
  return {dotted.substr(0, dot), dotted.substr(dot + 1)};
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      if (std::find(cfg.section_order_.begin(), cfg.section_order_.end(), section) ==
          cfg.section_order_.end())
        cfg.section_order_.push_back(section);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    cfg.entries_.push_back({section, key, value});
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string Config::serialize() const {
  std::ostringstream out;
  auto emit = [&](const std::string& section) {
    for (const auto& e : entries_)
      if (e.section == section) out << e.key << " = " << e.value << "\n";
  };
  emit("");
  for (const auto& s : section_order_) {
    out << "[" << s << "]\n";
    emit(s);
  }
  return out.str();
}

const Config::Entry* Config::find(const std::string& dotted) const {
  const auto [section, key] = split_dotted(dotted);
  for (const auto& e : entries_)
    if (e.section == section && e.key == key) return &e;
  return nullptr;
}

std::string Config::get_string(const std::string& dotted) const {
  const Entry* e = find(dotted);
  if (!e) throw ConfigError("missing key '" + dotted + "'");
  return e->value;
}

double Config::get_number(const std::string& dotted) const {
  const std::string v = get_string(dotted);
  if (v == "inf") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("key '" + dotted + "': '" + v + "' is not a number");
  }
  if (used != v.size()) throw ConfigError("key '" + dotted + "': '" + v + "' is not a number");
  return out;
}

int Config::get_int(const std::string& dotted) const {
  const double v = get_number(dotted);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) throw ConfigError("key '" + dotted + "' must be an integer");
  return i;
}

std::optional<std::string> Config::maybe_string(const std::string& dotted) const {
  const Entry* e = find(dotted);
  if (!e) return std::nullopt;
  return e->value;
}

std::optional<double> Config::maybe_number(const std::string& dotted) const {
  if (!has(dotted)) return std::nullopt;
  return get_number(dotted);
}

void Config::set(const std::string& dotted, const std::string& value) {
  const auto [section, key] = split_dotted(dotted);
  for (auto& e : entries_)
    if (e.section == section && e.key == key) {
      e.value = value;
      return;
    }
  if (!section.empty() && std::find(section_order_.begin(), section_order_.end(), section) ==
                              section_order_.end())
    section_order_.push_back(section);
  entries_.push_back({section, key, value});
}

std::vector<std::pair<std::string, std::string>> Config::section(const std::string& name) const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : entries_)
    if (e.section == name) out.emplace_back(e.key, e.value);
  return out;
}

}  // namespace act
