#pragma once

#include <cstdint>
#include <vector>

#include "influence/planted.hpp"

namespace influence {

/// Parameters of the randomized planted model (arc rules 1-4).
struct RandomPlantedSpec {
  int k = 0;
  std::vector<int> group_sizes;        // n_l, l = 1..k
  std::vector<int> subordinate_counts; // r_l
  int g0_size = 0;
  double q = 0.0;  // cross-group noise intensity
  double s = 0.0;  // subordinate density
  std::uint64_t seed = 0;
};

/// Parameters of the two-layer forest-fire generator.
struct ForestFireSpec {
  int k = 0;
  int sender_cap = 0;    // u_i
  int receiver_cap = 0;  // u_f
  double p1 = 0.0;       // probability the next node is a receiver
  double p2 = 0.0;       // burn-chain continuation probability
  double sigma_pct = 0.0;
  std::uint64_t seed = 0;
};

struct ForestFireResult {
  PlantedInstance instance;
  std::int64_t arcs_before_noise = 0;  // E_orig
  std::int64_t noise_arcs = 0;         // E_noise
};

/// Realized quantities and conditions of the noisy deterministic recovery
/// theorem. H_l is the maximal valid choice: all G_l receivers with no
/// sender outside L_l.
struct DeterministicRecoveryReport {
  std::vector<int> h_sizes;          // |H_l|
  std::vector<double> theta;         // |H_l| / n_l
  std::vector<double> beta_max;      // max H_l-coverage ratio over L_l subordinates
  std::vector<int> z;                // per-subordinate G_0 neighbour count
  double rho = 0.0;                  // min theta / max theta
  bool rho_defined = false;          // false when some theta_l = 0
  int n_min = 0;
  bool a1_prime_ok = false;
  bool cond_beta = false;            // beta_l < rho/2 for all l (strict)
  bool cond_z = false;               // z_i <= n_min theta_l rho / 2 (non-strict)
  bool pass = false;
};

/// Realized quantities and the two halves of the cascade recovery condition.
struct CascadeRecoveryReport {
  std::vector<int> n_hat;      // receivers of G_l with no sender outside L_l
  std::vector<int> alpha;      // max in-group coverage over L_l subordinates
  std::vector<int> gamma;      // max out-of-group coverage
  double xi_round = 0.0;
  bool premise_ok = false;     // influencer covers G_l; alpha_l < n_l
  bool cond_min_nhat = false;  // min n_hat >= (1-p)^{0.5+xi/2} max(alpha + gamma/(1-p))
  bool cond_swap = false;      // n_l - alpha_l > (1-p)^{-k} gamma_l (strict)
  bool pass = false;
};

/// Noiseless planted instance satisfying A1-A3 exactly. Each subordinate's
/// neighbourhood is a uniformly random proper subset of its group (size
/// uniform on [0, n_l-1]). G_0 is empty.
PlantedInstance gen_noiseless(int k, const std::vector<int>& group_sizes,
                              const std::vector<int>& subordinate_counts,
                              std::uint64_t seed);

/// Noisy deterministic instance satisfying A1'-A3' with the realized
/// theta_l = floor(theta_l n_l)/n_l and per-subordinate H_l coverage
/// floor(beta_l |H_l|). Subordinates take every allowed arc outside the
/// capped categories (all of G_l \ H_l and all cross-group receivers
/// outside H), the adversarial-within-model choice, plus z_cap_l arcs
/// into G_0.
PlantedInstance gen_deterministic_noisy(int k, const std::vector<int>& group_sizes,
                                        const std::vector<int>& subordinate_counts,
                                        int g0_size,
                                        const std::vector<double>& theta_targets,
                                        const std::vector<double>& beta_targets,
                                        const std::vector<int>& z_caps,
                                        std::uint64_t seed);

PlantedInstance gen_random_planted(const RandomPlantedSpec& spec);

ForestFireResult gen_forest_fire(const ForestFireSpec& spec);

DeterministicRecoveryReport check_deterministic_recovery(const PlantedInstance& inst);

/// p is the uniform arc probability of the cascade model; xi_round must lie
/// in [0, 1/(2k+1)).
CascadeRecoveryReport check_cascade_recovery(const PlantedInstance& inst, double p, double xi_round);

}  // namespace influence
