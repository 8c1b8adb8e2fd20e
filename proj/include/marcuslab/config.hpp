#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace marcuslab {

/// Flat `key = value` configuration with dotted section names, e.g.
///
///   map.kind = PM
///   map.alpha = 1.5
///   run.n = 10000   # trailing comments allowed
///
/// Keys are case-sensitive; later assignments override earlier ones.
class Config {
 public:
  Config() = default;

  /// Built-in defaults for every key the runner reads, thresholds included.
  static Config defaults();

  static Config parse(const std::string& text, const std::string& origin = "<string>");
  static Config load(const std::string& path);

  /// Applies "key=value". Throws ConfigError on malformed input.
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value);
  /// Copies every entry of `other` over this config.
  void merge(const Config& other);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::map<std::string, std::string>& entries() const { return entries_; }

  /// Typed getters; throw ConfigError when the key is missing or unparsable.
  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  /// Comma- or whitespace-separated list of reals.
  std::vector<double> get_doubles(const std::string& key) const;

  /// Canonical text: sorted `key = value` lines. Digest input for manifests.
  std::string canonical() const;

 private:
  std::map<std::string, std::string> entries_;
};

std::vector<double> parse_doubles(const std::string& text);
std::uint64_t parse_u64(const std::string& text);

}  // namespace marcuslab
