#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <string>

#include "json.hpp"

#include "adm/error.hpp"
#include "adm/filters.hpp"
#include "adm/solvers.hpp"

namespace adm {

using nlohmann::json;

inline json filter_to_json(const FilterSpec& spec) {
  return std::visit(
      [](const auto& f) -> json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Helmholtz>)
          return {{"type", "helmholtz"}, {"alpha", f.alpha}, {"p", f.p}};
        else if constexpr (std::is_same_v<T, Gaussian>)
          return {{"type", "gaussian"}, {"alpha", f.alpha}};
        else if constexpr (std::is_same_v<T, GaussianApprox>)
          return {{"type", "gaussian_approx"}, {"alpha", f.alpha}, {"m", f.m}};
        else
          return {{"type", "helmholtz_power"}, {"mu", f.mu}, {"m", f.m}};
      },
      spec);
}

inline FilterSpec filter_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "helmholtz") return Helmholtz{j.value("alpha", 1.0), j.value("p", 1.0)};
  if (type == "gaussian") return Gaussian{j.value("alpha", 1.0)};
  if (type == "gaussian_approx") return GaussianApprox{j.value("alpha", 1.0), j.value("m", 1)};
  if (type == "helmholtz_power") return HelmholtzPower{j.value("mu", 1.0), j.value("m", 1)};
  throw DomainError("unknown filter type '" + type + "'");
}

/// Full configuration with every default spelled out.
inline json to_json(const SimConfig& c) {
  json init;
  switch (c.init.kind) {
    case InitialCondition::Kind::TaylorGreen:
      init = {{"type", "taylor_green"}, {"amplitude", c.init.amplitude}};
      break;
    case InitialCondition::Kind::RandomSpectrum:
      init = {{"type", "random"}, {"decay", c.init.decay}, {"seed", c.init.seed}};
      break;
    case InitialCondition::Kind::Snapshot:
      init = {{"type", "snapshot"}, {"path", c.init.path}};
      break;
  }
  json forcing = c.forcing.kind == Forcing::Kind::None ? json{{"type", "none"}}
                                                       : json{{"type", "snapshot"}, {"path", c.forcing.path}};
  return {{"n", c.n},
          {"L", c.box},
          {"nu", c.nu},
          {"filter", filter_to_json(c.filter)},
          {"N", c.orders},
          {"T", c.t_final},
          {"dt", c.dt},
          {"init", init},
          {"forcing", forcing},
          {"output_dir", c.output_dir},
          {"C", c.sobolev_constant},
          {"sample_every", c.sample_every},
          {"snapshot_every", c.snapshot_every}};
}

/// Parses a configuration object; absent keys keep their defaults, unknown keys are errors.
inline SimConfig config_from_json(const json& j) {
  static const std::set<std::string> known{"n",      "L",       "nu",         "filter", "N",
                                           "T",      "dt",      "init",       "forcing", "output_dir",
                                           "C",      "sample_every", "snapshot_every"};
  if (!j.is_object()) throw DomainError("configuration must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw DomainError("unknown configuration key '" + key + "'");

  SimConfig c;
  try {
    c.n = j.value("n", c.n);
    c.box = j.value("L", c.box);
    c.nu = j.value("nu", c.nu);
    if (j.contains("filter")) c.filter = filter_from_json(j.at("filter"));
    if (j.contains("N")) c.orders = j.at("N").get<std::vector<int>>();
    c.t_final = j.value("T", c.t_final);
    c.dt = j.value("dt", c.dt);
    if (j.contains("init")) {
      const auto& i = j.at("init");
      const std::string type = i.at("type").get<std::string>();
      if (type == "taylor_green") {
        c.init.kind = InitialCondition::Kind::TaylorGreen;
        c.init.amplitude = i.value("amplitude", 1.0);
      } else if (type == "random") {
        c.init.kind = InitialCondition::Kind::RandomSpectrum;
        c.init.decay = i.value("decay", c.init.decay);
        c.init.seed = i.value("seed", c.init.seed);
      } else if (type == "snapshot") {
        c.init.kind = InitialCondition::Kind::Snapshot;
        c.init.path = i.at("path").get<std::string>();
      } else {
        throw DomainError("unknown init type '" + type + "'");
      }
    }
    if (j.contains("forcing")) {
      const auto& f = j.at("forcing");
      const std::string type = f.at("type").get<std::string>();
      if (type == "none") {
        c.forcing.kind = Forcing::Kind::None;
      } else if (type == "snapshot") {
        c.forcing.kind = Forcing::Kind::Snapshot;
        c.forcing.path = f.at("path").get<std::string>();
      } else {
        throw DomainError("unknown forcing type '" + type + "'");
      }
    }
    c.output_dir = j.value("output_dir", c.output_dir);
    c.sobolev_constant = j.value("C", c.sobolev_constant);
    c.sample_every = j.value("sample_every", c.sample_every);
    c.snapshot_every = j.value("snapshot_every", c.snapshot_every);
  } catch (const json::exception& e) {
    throw DomainError(std::string("bad configuration: ") + e.what());
  }
  validate(c);
  if (!(c.sobolev_constant > 0.0)) throw DomainError("C must be > 0");
  return c;
}

inline SimConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw DomainError("cannot parse " + path + ": " + e.what());
  }
  return config_from_json(j);
}

/// 64-bit FNV-1a of the canonical (sorted-key) JSON dump, as 16 hex digits.
inline std::string config_hash(const SimConfig& c) {
  const std::string text = to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[i] = digits[h & 0xf];
  return out;
}

}  // namespace adm
