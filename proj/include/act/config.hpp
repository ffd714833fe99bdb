#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace act {

/// Line-based `key = value` configuration with [section] headers and #
/// comments. Entry order is preserved so serialize-parse-serialize is a
/// fixed point. Keys are addressed as "section.key" ("" section for entries
/// before the first header).
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);
  std::string serialize() const;

  bool has(const std::string& dotted) const { return find(dotted) != nullptr; }
  std::string get_string(const std::string& dotted) const;
  double get_number(const std::string& dotted) const;
  int get_int(const std::string& dotted) const;
  std::optional<std::string> maybe_string(const std::string& dotted) const;
  std::optional<double> maybe_number(const std::string& dotted) const;

  void set(const std::string& dotted, const std::string& value);

  /// All keys of one section, in file order.
  std::vector<std::pair<std::string, std::string>> section(const std::string& name) const;

 private:
  struct Entry {
    std::string section;
    std::string key;
    std::string value;
  };
  std::vector<std::string> section_order_;
  std::vector<Entry> entries_;

  const Entry* find(const std::string& dotted) const;
};

}  // namespace act
