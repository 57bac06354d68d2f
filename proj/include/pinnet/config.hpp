#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pinnet/dynamics.hpp"
#include "pinnet/matlin.hpp"
#include "pinnet/mobility.hpp"
#include "pinnet/switchnet.hpp"

namespace pinnet {

// Sectioned key-value text: `[section]` headers, `key = value` entries,
// `#` comment lines.  Matrix values are rows of numbers separated by `;`,
// or `file:PATH` pointing at a whitespace-separated row-per-line text file
// resolved relative to the config file.
struct ConfigSection {
  std::string name;
  std::vector<std::pair<std::string, std::string>> entries;

  const std::string* find(const std::string& key) const;
};

struct ConfigFile {
  std::vector<ConfigSection> sections;
  std::string dir;  // base for file: references

  const ConfigSection* find(const std::string& name) const;
  static ConfigFile parse(const std::string& text, const std::string& dir = "");
  static ConfigFile load(const std::string& path);
  std::string serialize() const;
};

Matrix parse_matrix(const std::string& value, const std::string& dir);
std::vector<double> parse_vector(const std::string& value);
double parse_double(const std::string& value);
std::string format_double(double v);
std::string format_matrix(const Matrix& m);
std::string format_vector(const std::vector<double>& v);

enum class ExperimentKind { SlowSwitching, MobileSpatial, Custom };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Custom;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::size_t runs = 1;
  double h = 0.01;
  double horizon = 10;

  // Node model dx = -Dx + T g(x) and the membership weighting.
  Matrix D, T, G, Gamma;
  double alpha = 0, beta = 0, lf = 0;

  CouplingParams coupling;

  // Switched topology family plus its driving chain.
  std::vector<Matrix> L;
  std::vector<Matrix> C;
  Matrix embedded;
  std::vector<double> q;         // explicit exit rates, or
  double q_low = 0, q_high = 0;  // a range the harness draws them from

  bool has_mobility = false;
  MobilityConfig mobility;
  double p_meet = 0, p_region = 0;

  std::string weights = "identity";  // identity | perron
  double k2 = 0;                     // estimate override; 0 = use alpha
  double k4 = 0;
  double delta = 0;
  std::size_t r_steps = 0;

  bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_experiment(const ConfigFile& file);
ExperimentConfig load_experiment(const std::string& path);
std::string serialize_experiment(const ExperimentConfig& cfg);

// Builds the saturating three-cell node field from the config matrices.
DynamicsSpec dynamics_from(const ExperimentConfig& cfg);

}  // namespace pinnet
