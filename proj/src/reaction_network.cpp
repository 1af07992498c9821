#include "skm/reaction_network.hpp"

#include <stdexcept>
#include <unordered_map>

namespace skm {

ReactionNetwork::ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions)
    : species_names_(std::move(species)), reactions_(std::move(reactions)) {
  const int s = species_count();
  const int v = reaction_count();
  if (s < 1) throw std::invalid_argument("ReactionNetwork: at least one species required");
  if (v < 1) throw std::invalid_argument("ReactionNetwork: empty reaction list");
  stoich_.resize(s, v);
  for (int i = 0; i < v; ++i) {
    const Reaction& r = reactions_[i];
    if (static_cast<int>(r.reactants.size()) != s || static_cast<int>(r.products.size()) != s)
      throw std::invalid_argument("ReactionNetwork: coefficient vectors must cover all species");
    for (int j = 0; j < s; ++j) {
      if (r.reactants[j] < 0 || r.products[j] < 0)
        throw std::invalid_argument("ReactionNetwork: stoichiometric coefficients must be >= 0");
      if (r.reactants[j] > 1)
        throw std::invalid_argument(
            "ReactionNetwork: reactant coefficients above 1 are unsupported "
            "(monomial mass-action hazards only)");
      stoich_(j, i) = static_cast<double>(r.products[j] - r.reactants[j]);
    }
  }
}

ReactionNetwork build_network(
    const std::vector<std::string>& species,
    const std::vector<std::pair<std::vector<std::pair<std::string, int>>,
                                std::vector<std::pair<std::string, int>>>>& reactions) {
  std::unordered_map<std::string, int> index;
  for (int j = 0; j < static_cast<int>(species.size()); ++j) index[species[j]] = j;
  if (reactions.empty()) throw std::invalid_argument("build_network: empty reaction list");

  std::vector<Reaction> built;
  built.reserve(reactions.size());
  for (const auto& [reactants, products] : reactions) {
    Reaction r;
    r.reactants.assign(species.size(), 0);
    r.products.assign(species.size(), 0);
    for (const auto& [name, coef] : reactants) {
      auto it = index.find(name);
      if (it == index.end()) throw std::invalid_argument("build_network: unknown species '" + name + "'");
      r.reactants[it->second] = coef;
    }
    for (const auto& [name, coef] : products) {
      auto it = index.find(name);
      if (it == index.end()) throw std::invalid_argument("build_network: unknown species '" + name + "'");
      r.products[it->second] = coef;
    }
    built.push_back(std::move(r));
  }
  return ReactionNetwork(species, std::move(built));
}

void hazard_into(const ReactionNetwork& net, const Eigen::VectorXd& x,
                 const Eigen::VectorXd& rates, Eigen::VectorXd& out, bool& clamped,
                 bool& state_invalid) {
  const int s = net.species_count();
  const int v = net.reaction_count();
  clamped = false;
  state_invalid = false;
  for (int j = 0; j < s; ++j)
    if (x(j) < 0.0) state_invalid = true;
  for (int i = 0; i < v; ++i) {
    double h = rates(i);
    const Reaction& r = net.reactions()[i];
    for (int j = 0; j < s; ++j)
      if (r.reactants[j] == 1) h *= x(j);
    if (h < 0.0) {
      h = 0.0;
      clamped = true;
    }
    out(i) = h;
  }
}

HazardResult hazard(const ReactionNetwork& net, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& rates) {
  HazardResult res;
  res.h.resize(net.reaction_count());
  hazard_into(net, x, rates, res.h, res.clamped, res.state_invalid);
  return res;
}

}  // namespace skm
