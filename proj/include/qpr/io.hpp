#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpr/analytic.hpp"
#include "qpr/config.hpp"
#include "qpr/errors.hpp"
#include "qpr/periodic.hpp"
#include "qpr/qpmap.hpp"
#include "qpr/renorm1d.hpp"

namespace qpr {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// JSON bindings (ADL hooks for nlohmann)

inline void to_json(json& j, const DiscDomain& d) {
  j = json{{"center", d.center}, {"radius", d.radius}};
}
inline void from_json(const json& j, DiscDomain& d) {
  d.center = j.at("center").get<double>();
  d.radius = j.at("radius").get<double>();
}

inline void to_json(json& j, const AnalyticMap1D& f) {
  j = json{{"domain", f.domain}, {"coeffs", f.coeffs}};
}
inline void from_json(const json& j, AnalyticMap1D& f) {
  j.at("domain").get_to(f.domain);
  f.coeffs = j.at("coeffs").get<std::vector<double>>();
}

inline void to_json(json& j, const ComplexMap1D& f) {
  json c = json::array();
  for (const cplx& z : f.coeffs) c.push_back(json::array({z.real(), z.imag()}));
  j = json{{"domain", f.domain}, {"coeffs", std::move(c)}};
}
inline void from_json(const json& j, ComplexMap1D& f) {
  j.at("domain").get_to(f.domain);
  f.coeffs.clear();
  for (const auto& e : j.at("coeffs")) f.coeffs.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
}

inline void to_json(json& j, const PeriodicFn& g) {
  json c = json::array();
  for (const cplx& z : g.coeffs) c.push_back(json::array({z.real(), z.imag()}));
  j = json{{"coeffs", std::move(c)}};
}
inline void from_json(const json& j, PeriodicFn& g) {
  g.coeffs.clear();
  for (const auto& e : j.at("coeffs")) g.coeffs.emplace_back(e.at(0).get<double>(), e.at(1).get<double>());
  if (g.coeffs.size() % 2 == 0) throw ConfigError("periodic function needs an odd mode count");
}

inline void to_json(json& j, const QPMap& f) {
  j = json{{"max_mode", f.max_mode()}, {"modes", f.modes}};
}
inline void from_json(const json& j, QPMap& f) {
  f.modes = j.at("modes").get<std::vector<ComplexMap1D>>();
  if (f.modes.size() % 2 == 0) throw ConfigError("quasi-periodic map needs an odd mode count");
}

inline json config_to_json(const RenormConfig& c) {
  return json{{"delta", c.delta},
              {"disc", c.disc},
              {"n_x", c.n_x},
              {"k_theta", c.k_theta},
              {"m_nodes", c.m_nodes},
              {"tol_newton", c.tol_newton},
              {"tol_residual", c.tol_residual},
              {"tol_degenerate", c.tol_degenerate},
              {"k0", c.k0},
              {"omega", c.omega}};
}

// Partial configs are allowed: absent keys keep their defaults; unknown keys
// are rejected so typos fail loudly.
inline RenormConfig config_from_json(const json& j) {
  RenormConfig c;
  try {
    for (const auto& [key, val] : j.items()) {
    if (key == "delta")
      c.delta = val.get<double>();
    else if (key == "disc")
      val.get_to(c.disc);
    else if (key == "n_x")
      c.n_x = val.get<int>();
    else if (key == "k_theta")
      c.k_theta = val.get<int>();
    else if (key == "m_nodes")
      c.m_nodes = val.get<int>();
    else if (key == "tol_newton")
      c.tol_newton = val.get<double>();
    else if (key == "tol_residual")
      c.tol_residual = val.get<double>();
    else if (key == "tol_degenerate")
      c.tol_degenerate = val.get<double>();
    else if (key == "k0")
      c.k0 = val.get<double>();
    else if (key == "omega")
      c.omega = val.get<double>();
    else
      throw ConfigError("unknown config key: " + key);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config value has the wrong type: ") + e.what());
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Files

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline void save_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) throw ConfigError("write failed: " + path);
}

// The fixed-point artifact produced by one command and consumed by others.
struct FixedPointArtifact {
  AnalyticMap1D phi;
  double a = 0.0;
  double residual = 0.0;
  int n_x = 0;
  double delta = 0.0;
};

inline void to_json(json& j, const FixedPointArtifact& fp) {
  j = json{{"phi", fp.phi}, {"a", fp.a}, {"residual", fp.residual}, {"N_x", fp.n_x},
           {"delta", fp.delta}};
}
inline void from_json(const json& j, FixedPointArtifact& fp) {
  j.at("phi").get_to(fp.phi);
  fp.a = j.at("a").get<double>();
  fp.residual = j.at("residual").get<double>();
  fp.n_x = j.at("N_x").get<int>();
  fp.delta = j.at("delta").get<double>();
}

inline FixedPointArtifact load_fixed_point(const std::string& path) {
  const json j = load_json(path);
  try {
    return j.get<FixedPointArtifact>();
  } catch (const json::exception& e) {
    throw ConfigError(path + ": malformed fixed-point file: " + e.what());
  }
}

// ---------------------------------------------------------------------------
// CSV (C locale, 17 significant digits, reruns byte-identical)

inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw ConfigError("cannot write " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
      out_ << (i ? "," : "") << header[i];
    out_ << "\n";
  }

  void row(std::initializer_list<double> vals) {
    std::size_t i = 0;
    for (double v : vals) out_ << (i++ ? "," : "") << csv_num(v);
    out_ << "\n";
  }

  void row_mixed(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

// ---------------------------------------------------------------------------
// Run manifest: enough to reproduce the run, nothing volatile, so repeated
// runs of the same command produce identical bytes.

struct RunManifest {
  std::string tool;
  std::string version;
  std::string command;
  json config;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

inline void to_json(json& j, const RunManifest& m) {
  j = json{{"tool", m.tool},     {"version", m.version}, {"command", m.command},
           {"config", m.config}, {"inputs", m.inputs},   {"outputs", m.outputs}};
}

inline void write_manifest(const std::string& path, const RunManifest& m) {
  json j = m;
  save_json(path, j);
}

}  // namespace qpr
