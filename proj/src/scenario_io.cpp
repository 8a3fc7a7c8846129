#include "mssr/scenario_io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mssr/errors.hpp"

namespace mssr {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(std::string_view s) {
  const std::string str(trim(s));
  if (str.empty()) throw DomainError("expected a number, got an empty field");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(str.c_str(), &end);
  if (end != str.c_str() + str.size() || errno == ERANGE)
    throw DomainError("not a number: '" + str + "'");
  return v;
}

std::uint64_t to_u64(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw DomainError("not a nonnegative integer: '" + std::string(s) + "'");
  return v;
}

int to_int(std::string_view s) {
  s = trim(s);
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw DomainError("not an integer: '" + std::string(s) + "'");
  return v;
}

bool to_bool(std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw DomainError("not a boolean: '" + std::string(s) + "'");
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

ParsedPrior parse_prior(std::string_view text) {
  const auto halves = split(text, ':');
  if (halves.size() != 2) throw DomainError("prior must look like a1,a2,a3:b1,b2,b3");
  const auto a = split(halves[0], ',');
  const auto b = split(halves[1], ',');
  if (a.size() != b.size() || (a.size() != 2 && a.size() != 3))
    throw DomainError("prior needs 2 or 3 shape values and the same number of rates");
  std::array<double, 3> sa{1.0, 1.0, 1.0}, sb{1.0, 1.0, 1.0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa[i] = to_double(a[i]);
    sb[i] = to_double(b[i]);
  }
  return {PriorConfig(sa, sb), a.size() == 3};
}

SystemSpec parse_spec(std::string_view text) {
  const auto f = split(text, ',');
  if (f.size() != 2) throw DomainError("system spec must look like s,k");
  return SystemSpec(to_int(f[0]), to_int(f[1]));
}

std::vector<SystemSpec> parse_spec_list(std::string_view text) {
  std::vector<SystemSpec> out;
  for (auto item : split(text, ';'))
    if (!item.empty()) out.push_back(parse_spec(item));
  return out;
}

std::vector<SizePair> parse_size_list(std::string_view text) {
  std::vector<SizePair> out;
  for (auto item : split(text, ';')) {
    if (item.empty()) continue;
    const auto f = split(item, ',');
    if (f.size() != 2) throw DomainError("sample sizes must look like n,m");
    out.emplace_back(to_u64(f[0]), to_u64(f[1]));
  }
  return out;
}

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (auto item : split(text, ','))
    if (!item.empty()) out.push_back(to_double(item));
  return out;
}

std::vector<std::string> parse_name_list(std::string_view text) {
  std::vector<std::string> out;
  for (auto item : split(text, ','))
    if (!item.empty()) out.emplace_back(item);
  return out;
}

void apply_setting(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "alpha1") cfg.alpha1 = to_double(value);
  else if (key == "alpha2") cfg.alpha2 = to_double(value);
  else if (key == "theta") cfg.theta = to_double(value);
  else if (key == "specs") cfg.specs = parse_spec_list(value);
  else if (key == "sizes") cfg.sizes = parse_size_list(value);
  else if (key == "replications") cfg.replications = to_u64(value);
  else if (key == "estimators") cfg.estimators = parse_name_list(value);
  else if (key == "intervals") cfg.intervals = parse_name_list(value);
  else if (key == "prior") cfg.prior = parse_prior(value).prior;
  else if (key == "linex_c") cfg.linex_cs = parse_double_list(value);
  else if (key == "levels") cfg.levels = parse_double_list(value);
  else if (key == "seed") cfg.seed = to_u64(value);
  else if (key == "theta_known") cfg.theta_known = to_bool(value);
  else if (key == "mcmc_T") cfg.mcmc_T = to_u64(value);
  else if (key == "mcmc_burn_in") cfg.mcmc_burn_in = to_u64(value);
  else if (key == "bootstrap_B") cfg.bootstrap_B = to_u64(value);
  else if (key == "r_grid") cfg.r_grid = parse_double_list(value);
  else throw DomainError("unknown scenario key '" + std::string(key) + "'");
}

ScenarioConfig parse_scenario(std::istream& in) {
  ScenarioConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view v(line);
    if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = trim(v);
    if (v.empty()) continue;
    const auto eq = v.find('=');
    if (eq == std::string_view::npos)
      throw DomainError("line " + std::to_string(lineno) + ": expected key = value");
    try {
      apply_setting(cfg, v.substr(0, eq), v.substr(eq + 1));
    } catch (const DomainError& e) {
      throw DomainError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open scenario file '" + path + "'");
  return parse_scenario(in);
}

std::string canonical_text(const ScenarioConfig& cfg) {
  std::ostringstream os;
  auto join_d = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
    return s;
  };
  auto join_s = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
  };
  os << "alpha1 = " << num(cfg.alpha1) << '\n'
     << "alpha2 = " << num(cfg.alpha2) << '\n'
     << "theta = " << num(cfg.theta) << '\n'
     << "specs = ";
  for (std::size_t i = 0; i < cfg.specs.size(); ++i)
    os << (i ? ";" : "") << cfg.specs[i].s() << ',' << cfg.specs[i].k();
  os << "\nsizes = ";
  for (std::size_t i = 0; i < cfg.sizes.size(); ++i)
    os << (i ? ";" : "") << cfg.sizes[i].first << ',' << cfg.sizes[i].second;
  os << "\nreplications = " << cfg.replications << '\n'
     << "estimators = " << join_s(cfg.estimators) << '\n'
     << "intervals = " << join_s(cfg.intervals) << '\n'
     << "prior = " << num(cfg.prior.a[0]) << ',' << num(cfg.prior.a[1]) << ',' << num(cfg.prior.a[2])
     << ':' << num(cfg.prior.b[0]) << ',' << num(cfg.prior.b[1]) << ',' << num(cfg.prior.b[2]) << '\n'
     << "linex_c = " << join_d(cfg.linex_cs) << '\n'
     << "levels = " << join_d(cfg.levels) << '\n'
     << "seed = " << cfg.seed << '\n'
     << "theta_known = " << (cfg.theta_known ? "true" : "false") << '\n'
     << "mcmc_T = " << cfg.mcmc_T << '\n'
     << "mcmc_burn_in = " << cfg.mcmc_burn_in << '\n'
     << "bootstrap_B = " << cfg.bootstrap_B << '\n'
     << "r_grid = " << join_d(cfg.r_grid) << '\n';
  return os.str();
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t config_hash(const ScenarioConfig& cfg) { return fnv1a(canonical_text(cfg)); }

std::vector<double> read_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open data file '" + path + "'");
  std::vector<double> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view v(line);
    if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = trim(v);
    if (v.empty()) continue;
    try {
      out.push_back(to_double(v));
    } catch (const DomainError& e) {
      throw DomainError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (out.empty()) throw DomainError("data file '" + path + "' holds no values");
  return out;
}

}  // namespace mssr
