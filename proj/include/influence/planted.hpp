#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "influence/graph.hpp"

namespace influence {

/// Planted-influencer instance: graph plus ground-truth group structure.
///
/// Senders are partitioned into groups L_1..L_k (first member of each group
/// is the influencer); receivers into G_0, G_1..G_k where G_0 is the noise
/// block attached to no influencer (may be empty).
struct PlantedInstance {
  BipartiteGraph graph;
  int k = 0;
  std::vector<std::vector<int>> sender_groups;    // L_1..L_k
  std::vector<std::vector<int>> receiver_groups;  // index 0 = G_0, then G_1..G_k
  std::vector<int> influencers;                   // size k

  SelectionVector x_star() const;

  /// Group id per sender, 1-based (0 never occurs: every sender is grouped).
  std::vector<int> sender_group_ids() const;
  /// Group id per receiver, 0 = G_0.
  std::vector<int> receiver_group_ids() const;

  /// Recovery error sqrt(sum over influencers of |x_i - 1|^2).
  double recovery_error(std::span<const double> x) const;

  /// Throws std::invalid_argument when the partition structure is broken.
  void validate() const;
};

/// A1-A3 (noiseless): influencer l covers all of G_l, no cross-group arcs,
/// every subordinate adjacent to a proper subset of its G_l, G_0 empty.
bool satisfies_noiseless_assumptions(const PlantedInstance& inst);

/// A1' only: influencer l adjacent to all of G_l, no influencer adjacent to
/// any G_0 receiver.
bool satisfies_a1_prime(const PlantedInstance& inst);

/// Instance bundle on disk: <dir>/graph.txt in graph-core format plus
/// <dir>/meta.txt, a key-value sidecar with the group structure, generator
/// parameters and seed.
void save_instance(const PlantedInstance& inst, const std::string& dir,
                   const std::map<std::string, std::string>& extra_meta = {});
PlantedInstance load_instance(const std::string& dir);
std::map<std::string, std::string> load_instance_meta(const std::string& dir);

}  // namespace influence
