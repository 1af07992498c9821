#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace skm {

/// One reaction: reactant and product stoichiometric coefficients, indexed
/// by species. Coefficients are non-negative integers; reactant coefficients
/// above 1 are rejected (mass-action hazards here use the monomial form, so
/// binomial self-interactions such as 2X -> ... are unsupported).
struct Reaction {
  std::vector<int> reactants;
  std::vector<int> products;
};

class ReactionNetwork {
 public:
  ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions);

  int species_count() const { return static_cast<int>(species_names_.size()); }
  int reaction_count() const { return static_cast<int>(reactions_.size()); }

  const std::vector<std::string>& species_names() const { return species_names_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }

  /// Stoichiometry matrix: S(j,i) = products[i][j] - reactants[i][j].
  const Eigen::MatrixXd& stoich() const { return stoich_; }

 private:
  std::vector<std::string> species_names_;
  std::vector<Reaction> reactions_;
  Eigen::MatrixXd stoich_;
};

/// Builds a network from reactions given as name->coefficient maps.
ReactionNetwork build_network(
    const std::vector<std::string>& species,
    const std::vector<std::pair<std::vector<std::pair<std::string, int>>,
                                std::vector<std::pair<std::string, int>>>>& reactions);

struct HazardResult {
  Eigen::VectorXd h;
  bool clamped = false;        // some component was raised to zero
  bool state_invalid = false;  // the state has a negative species count
};

/// Mass-action hazards h_i = c_i * prod_j x_j^{p_ij}. Components that come
/// out negative (possible when x has negative entries under the CLE) are
/// clamped at zero and flagged.
HazardResult hazard(const ReactionNetwork& net, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& rates);

/// In-place variant used on hot paths; `out` must have size v.
void hazard_into(const ReactionNetwork& net, const Eigen::VectorXd& x,
                 const Eigen::VectorXd& rates, Eigen::VectorXd& out, bool& clamped,
                 bool& state_invalid);

}  // namespace skm
