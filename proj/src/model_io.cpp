#include "skm/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace skm {

namespace {

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("expected a non-empty matrix");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) throw std::invalid_argument("ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

Prior prior_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  Prior p;
  if (type == "normal-on-log") {
    p.kind = Prior::Kind::normal_on_log;
    p.a = j.at("mean").get<double>();
    p.b = j.at("sd").get<double>();
    if (!(p.b > 0.0)) throw std::invalid_argument("normal-on-log prior needs sd > 0");
  } else if (type == "gamma") {
    p.kind = Prior::Kind::gamma;
    p.a = j.at("shape").get<double>();
    p.b = j.at("rate").get<double>();
    if (!(p.a > 0.0 && p.b > 0.0)) throw std::invalid_argument("gamma prior needs shape, rate > 0");
  } else if (type == "exponential") {
    p.kind = Prior::Kind::exponential;
    p.a = j.at("rate").get<double>();
    if (!(p.a > 0.0)) throw std::invalid_argument("exponential prior needs rate > 0");
  } else {
    throw std::invalid_argument("unknown prior type '" + type + "'");
  }
  return p;
}

nlohmann::json prior_to_json(const Prior& p) {
  nlohmann::json j;
  switch (p.kind) {
    case Prior::Kind::normal_on_log:
      j["type"] = "normal-on-log";
      j["mean"] = p.a;
      j["sd"] = p.b;
      break;
    case Prior::Kind::gamma:
      j["type"] = "gamma";
      j["shape"] = p.a;
      j["rate"] = p.b;
      break;
    case Prior::Kind::exponential:
      j["type"] = "exponential";
      j["rate"] = p.a;
      break;
  }
  return j;
}

}  // namespace

ModelBundle model_from_json(const nlohmann::json& j, const std::string& name) {
  ModelBundle bundle;
  bundle.name = name;

  const std::vector<std::string> species = j.at("species").get<std::vector<std::string>>();
  std::vector<std::pair<std::vector<std::pair<std::string, int>>,
                        std::vector<std::pair<std::string, int>>>>
      reactions;
  for (const auto& rj : j.at("reactions")) {
    std::vector<std::pair<std::string, int>> reactants, products;
    for (const auto& [k, v] : rj.at("reactants").items()) reactants.emplace_back(k, v.get<int>());
    for (const auto& [k, v] : rj.at("products").items()) products.emplace_back(k, v.get<int>());
    reactions.push_back({std::move(reactants), std::move(products)});
  }
  ReactionNetwork net = build_network(species, reactions);

  bundle.model.network = std::move(net);
  if (j.contains("augmentation")) {
    const auto& a = j.at("augmentation");
    bundle.model.augmentation =
        augment_with_ou_rate(bundle.model.network, a.at("diffusing_rate_index").get<int>(),
                             a.at("initial_log_rate").get<double>());
  }

  const auto init = j.at("initial_state").get<std::vector<double>>();
  bundle.model.initial_state =
      Eigen::Map<const Eigen::VectorXd>(init.data(), static_cast<Eigen::Index>(init.size()));
  bundle.model.validate();

  const auto& oj = j.at("observation");
  bundle.obs.P = matrix_from_json(oj.at("P"));
  const int p = bundle.obs.obs_dim();
  if (oj.at("Sigma").is_number()) {
    bundle.obs.Sigma =
        oj.at("Sigma").get<double>() * Eigen::MatrixXd::Identity(p, p);
  } else {
    bundle.obs.Sigma = matrix_from_json(oj.at("Sigma"));
  }
  bundle.obs.n_obs = oj.at("n").get<int>();
  bundle.obs.validate(bundle.model.latent_dim());

  for (const auto& pj : j.at("priors")) bundle.priors.components.push_back(prior_from_json(pj));
  if (bundle.priors.size() != bundle.model.param_dim())
    throw std::invalid_argument("model JSON: need one prior per inferred parameter");

  if (j.contains("defaults")) {
    const auto& dj = j.at("defaults");
    if (dj.contains("approximation"))
      bundle.default_approximation = dj.at("approximation").get<std::string>() == "poisson-leap"
                                         ? Approximation::poisson_leap
                                         : Approximation::cle;
    if (dj.contains("m")) bundle.default_m = dj.at("m").get<int>();
    if (dj.contains("rho")) bundle.default_rho = dj.at("rho").get<double>();
    if (dj.contains("N")) bundle.default_N = dj.at("N").get<int>();
    if (dj.contains("data_seed")) bundle.default_data_seed = dj.at("data_seed").get<std::uint64_t>();
  }
  if (j.contains("true_rates")) {
    const auto t = j.at("true_rates").get<std::vector<double>>();
    bundle.true_theta =
        Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
  }
  return bundle;
}

ModelBundle load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open model file '" + path + "'");
  nlohmann::json j;
  in >> j;
  std::string name = path;
  const auto slash = name.find_last_of('/');
  if (slash != std::string::npos) name = name.substr(slash + 1);
  const auto dot = name.find_last_of('.');
  if (dot != std::string::npos) name = name.substr(0, dot);
  return model_from_json(j, name);
}

nlohmann::json model_to_json(const ModelBundle& bundle) {
  nlohmann::json j;
  j["species"] = bundle.model.network.species_names();
  nlohmann::json reactions = nlohmann::json::array();
  for (const auto& r : bundle.model.network.reactions()) {
    nlohmann::json rj;
    rj["reactants"] = nlohmann::json::object();
    rj["products"] = nlohmann::json::object();
    for (int s = 0; s < bundle.model.network.species_count(); ++s) {
      const std::string& nm = bundle.model.network.species_names()[s];
      if (r.reactants[s] > 0) rj["reactants"][nm] = r.reactants[s];
      if (r.products[s] > 0) rj["products"][nm] = r.products[s];
    }
    reactions.push_back(rj);
  }
  j["reactions"] = reactions;
  j["observation"]["P"] = matrix_to_json(bundle.obs.P);
  j["observation"]["Sigma"] =
      bundle.obs.error_free() ? nlohmann::json(0.0) : matrix_to_json(bundle.obs.Sigma);
  j["observation"]["n"] = bundle.obs.n_obs;
  nlohmann::json priors = nlohmann::json::array();
  for (const auto& p : bundle.priors.components) priors.push_back(prior_to_json(p));
  j["priors"] = priors;
  std::vector<double> init(bundle.model.initial_state.data(),
                           bundle.model.initial_state.data() + bundle.model.initial_state.size());
  j["initial_state"] = init;
  if (bundle.model.augmentation) {
    j["augmentation"]["diffusing_rate_index"] = bundle.model.augmentation->diffusing_rate_index;
    j["augmentation"]["initial_log_rate"] = bundle.model.augmentation->initial_log_rate;
  }
  if (bundle.true_theta) {
    std::vector<double> t(bundle.true_theta->data(),
                          bundle.true_theta->data() + bundle.true_theta->size());
    j["true_rates"] = t;
  }
  j["defaults"]["approximation"] =
      bundle.default_approximation == Approximation::poisson_leap ? "poisson-leap" : "cle";
  j["defaults"]["m"] = bundle.default_m;
  j["defaults"]["rho"] = bundle.default_rho;
  j["defaults"]["N"] = bundle.default_N;
  j["defaults"]["data_seed"] = bundle.default_data_seed;
  return j;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  const int p = data.y.empty() ? 0 : static_cast<int>(data.y.front().size());
  out << "time";
  for (int i = 1; i <= p; ++i) out << ",y" << i;
  out << "\n";
  for (int t = 0; t < data.size(); ++t) {
    out << format_double(data.times[t]);
    for (int i = 0; i < p; ++i) out << "," << format_double(data.y[t](i));
    out << "\n";
  }
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open dataset '" + path + "'");
  Dataset data;
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty dataset file");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() < 2) throw std::invalid_argument("dataset row needs time plus observations");
    data.times.push_back(row[0]);
    data.y.push_back(Eigen::Map<const Eigen::VectorXd>(row.data() + 1,
                                                       static_cast<Eigen::Index>(row.size() - 1)));
  }
  return data;
}

void write_chain_csv(const std::string& path, const std::vector<ChainRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  const int v = records.empty() ? 0 : static_cast<int>(records.front().log_c.size());
  out << "iter";
  for (int i = 1; i <= v; ++i) out << ",log_c_" << i;
  out << ",log_phat,accepted\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    out << (i + 1);
    for (int jdx = 0; jdx < v; ++jdx) out << "," << format_double(records[i].log_c(jdx));
    out << "," << format_double(records[i].log_phat) << "," << (records[i].accepted ? 1 : 0)
        << "\n";
  }
}

ChainFile read_chain_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open chain '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty chain file");
  int v = 0;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
      if (cell.rfind("log_c_", 0) == 0) ++v;
  }
  if (v == 0) throw std::invalid_argument("chain file has no log_c columns");
  std::vector<std::vector<double>> rows;
  ChainFile cf;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<int>(row.size()) != v + 3)
      throw std::invalid_argument("chain row has wrong column count");
    rows.push_back(std::move(row));
  }
  cf.log_c.resize(static_cast<Eigen::Index>(rows.size()), v);
  cf.log_phat.reserve(rows.size());
  cf.accepted.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int jdx = 0; jdx < v; ++jdx) cf.log_c(static_cast<Eigen::Index>(i), jdx) = rows[i][jdx + 1];
    cf.log_phat.push_back(rows[i][v + 1]);
    cf.accepted.push_back(static_cast<int>(rows[i][v + 2]));
  }
  return cf;
}

void RunConfig::normalize() {
  if (builtin.empty() == model_file.empty())
    throw std::invalid_argument("config: exactly one of builtin/model_file is required");
  if (approximation != "cle" && approximation != "poisson-leap")
    throw std::invalid_argument("config: approximation must be cle or poisson-leap");
  if (sampler == "pmmh") {
    sampler = "cpmmh";
    rho = 0.0;
  }
  if (sampler != "cpmmh" && sampler != "mis")
    throw std::invalid_argument("config: sampler must be cpmmh, pmmh or mis");
  if (sampler == "mis" && approximation != "cle")
    throw std::invalid_argument("config: mis requires the cle approximation");
  if (proposal != "bridge" && proposal != "bootstrap")
    throw std::invalid_argument("config: proposal must be bridge or bootstrap");
  if (iters < 1) throw std::invalid_argument("config: iters must be >= 1");
  if (m < 0 || N < 0) throw std::invalid_argument("config: m and N must be positive");
  if (rho > 1.0) throw std::invalid_argument("config: rho must lie in [0,1]");
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  if (!builtin.empty()) j["builtin"] = builtin;
  if (!model_file.empty()) j["model_file"] = model_file;
  j["approximation"] = approximation;
  j["m"] = m;
  j["filter"]["N"] = N;
  j["filter"]["proposal"] = proposal;
  j["sampler"]["kind"] = sampler;
  j["sampler"]["rho"] = rho;
  j["sampler"]["iters"] = iters;
  j["sampler"]["seed"] = seed;
  j["sampler"]["pilot_iters"] = pilot_iters;
  if (!init_log_c.empty()) j["sampler"]["init_log_c"] = init_log_c;
  if (!data_path.empty())
    j["data"]["path"] = data_path;
  else {
    j["data"]["synth_seed"] = data_seed;
    if (sigma >= 0.0) j["data"]["sigma"] = sigma;
  }
  j["output_dir"] = output_dir;
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  if (j.contains("builtin")) c.builtin = j.at("builtin").get<std::string>();
  if (j.contains("model_file")) c.model_file = j.at("model_file").get<std::string>();
  if (j.contains("approximation")) c.approximation = j.at("approximation").get<std::string>();
  if (j.contains("m")) c.m = j.at("m").get<int>();
  if (j.contains("filter")) {
    const auto& f = j.at("filter");
    if (f.contains("N")) c.N = f.at("N").get<int>();
    if (f.contains("proposal")) c.proposal = f.at("proposal").get<std::string>();
  }
  if (j.contains("sampler")) {
    const auto& s = j.at("sampler");
    if (s.contains("kind")) c.sampler = s.at("kind").get<std::string>();
    if (s.contains("rho")) c.rho = s.at("rho").get<double>();
    if (s.contains("iters")) c.iters = s.at("iters").get<int>();
    if (s.contains("seed")) c.seed = s.at("seed").get<std::uint64_t>();
    if (s.contains("pilot_iters")) c.pilot_iters = s.at("pilot_iters").get<int>();
    if (s.contains("init_log_c")) c.init_log_c = s.at("init_log_c").get<std::vector<double>>();
  }
  if (j.contains("data")) {
    const auto& d = j.at("data");
    if (d.contains("path")) c.data_path = d.at("path").get<std::string>();
    if (d.contains("synth_seed")) c.data_seed = d.at("synth_seed").get<std::uint64_t>();
    if (d.contains("sigma")) c.sigma = d.at("sigma").get<double>();
  }
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  return c;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json tuning_report_to_json(const TuningReport& report) {
  nlohmann::json j;
  for (const auto& [N, s2] : report.sigma2_by_N) j["sigma2_by_N"][std::to_string(N)] = s2;
  for (const auto& [N, rl] : report.rho_l_by_N) j["rho_l_by_N"][std::to_string(N)] = rl;
  for (const auto& [N, d] : report.deaths_by_N) j["deaths_by_N"][std::to_string(N)] = d;
  j["rho"] = report.rho;
  j["rho_l"] = report.rho_l;
  j["recommended_N"] = report.recommendation.N;
  j["target_sigma2"] = report.recommendation.target;
  j["target_reachable"] = report.recommendation.reachable;
  j["replicates"] = report.replicates;
  j["seed"] = report.seed;
  return j;
}

}  // namespace skm
