#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "skm/diagnostics.hpp"
#include "skm/forward_sim.hpp"
#include "skm/kinetic_model.hpp"
#include "skm/mcmc.hpp"
#include "skm/observation.hpp"
#include "skm/particle_filter.hpp"
#include "skm/prior.hpp"

namespace skm {

/// A fully specified inference problem: model, observation regime, priors,
/// plus defaults and data-generation metadata.
struct ModelBundle {
  std::string name;
  KineticModel model;
  ObservationModel obs;
  PriorSet priors;
  Approximation default_approximation = Approximation::cle;
  int default_m = 5;
  double default_rho = 0.99;
  int default_N = 2;
  std::optional<Eigen::VectorXd> true_theta;  // generating rates for synthetic data
  std::optional<Dataset> builtin_data;        // fixed real-data builtin
  std::uint64_t default_data_seed = 20170815;
};

/// Parses the model-definition JSON: species, reactions (name->coefficient
/// maps), observation {P row-major, Sigma matrix or scalar, n}, priors, an
/// initial_state, and an optional OU augmentation block.
ModelBundle model_from_json(const nlohmann::json& j, const std::string& name);
ModelBundle load_model_file(const std::string& path);
nlohmann::json model_to_json(const ModelBundle& bundle);

// --- datasets ---------------------------------------------------------

/// CSV with header time,y1,...,yp and one row per observation time.
void write_dataset_csv(const std::string& path, const Dataset& data);
Dataset read_dataset_csv(const std::string& path);

// --- chains ------------------------------------------------------------

/// CSV with header iter,log_c_1..log_c_v,log_phat,accepted.
void write_chain_csv(const std::string& path, const std::vector<ChainRecord>& records);

struct ChainFile {
  Eigen::MatrixXd log_c;  // iterations x v
  std::vector<double> log_phat;
  std::vector<int> accepted;
};
ChainFile read_chain_csv(const std::string& path);

// --- run configuration ---------------------------------------------------

/// Normalised run configuration; "pmmh" is folded into cpmmh with rho = 0 at
/// parse time. Serialising and re-parsing a normalised config is the
/// identity.
struct RunConfig {
  std::string builtin;     // one of the built-in model names, or empty
  std::string model_file;  // path to a model JSON, or empty
  std::string approximation = "cle";
  int m = 0;  // 0 = builtin default
  int N = 0;  // 0 = builtin default
  std::string proposal = "bridge";
  std::string sampler = "cpmmh";
  double rho = -1.0;  // <0 = builtin default
  int iters = 10000;
  std::uint64_t seed = 1;
  std::vector<double> init_log_c;  // empty = zeros
  int pilot_iters = 5000;
  std::string data_path;           // empty = synthesize
  std::uint64_t data_seed = 0;     // 0 = builtin default
  double sigma = -1.0;             // >= 0 overrides the observation noise sd
  std::string output_dir = "skm_out";

  void normalize();  // throws std::invalid_argument on inconsistent settings
  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
};

// --- misc ---------------------------------------------------------------

std::string format_double(double v);      // shortest round-trip-exact decimal
std::string fnv1a_hex(const std::string& bytes);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

nlohmann::json tuning_report_to_json(const TuningReport& report);

}  // namespace skm
