#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mssr/experiments.hpp"

namespace mssr {

/// Prior in the compact form "a1,a2,a3:b1,b2,b3". A two-value form
/// "a1,a2:b1,b2" is accepted too, with the theta pair left at 1.
struct ParsedPrior {
  PriorConfig prior;
  bool has_theta_pair = false;
};

ParsedPrior parse_prior(std::string_view text);
/// "s,k"
SystemSpec parse_spec(std::string_view text);
/// "s,k;s,k;..."
std::vector<SystemSpec> parse_spec_list(std::string_view text);
/// "n,m;n,m;..."
std::vector<SizePair> parse_size_list(std::string_view text);
std::vector<double> parse_double_list(std::string_view text);
std::vector<std::string> parse_name_list(std::string_view text);

/// Applies one `key = value` setting. Throws DomainError on an unknown key or
/// a malformed value.
void apply_setting(ScenarioConfig& cfg, std::string_view key, std::string_view value);

/// Reads `key = value` lines; '#' starts a comment, blank lines are skipped.
ScenarioConfig parse_scenario(std::istream& in);
ScenarioConfig load_scenario(const std::string& path);

/// Canonical `key = value` dump; parse_scenario of it gives back the config.
std::string canonical_text(const ScenarioConfig& cfg);
/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text);
/// fnv1a of canonical_text.
std::uint64_t config_hash(const ScenarioConfig& cfg);

/// One value per line; blank lines and '#' comments are skipped.
std::vector<double> read_values(const std::string& path);

}  // namespace mssr
