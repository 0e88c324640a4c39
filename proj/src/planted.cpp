#include "influence/planted.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace influence {

SelectionVector PlantedInstance::x_star() const {
  return indicator(graph.num_senders(), influencers);
}

std::vector<int> PlantedInstance::sender_group_ids() const {
  std::vector<int> ids(graph.num_senders(), -1);
  for (int l = 0; l < k; ++l)
    for (int i : sender_groups[l]) ids[i] = l + 1;
  return ids;
}

std::vector<int> PlantedInstance::receiver_group_ids() const {
  std::vector<int> ids(graph.num_receivers(), -1);
  for (int l = 0; l < static_cast<int>(receiver_groups.size()); ++l)
    for (int j : receiver_groups[l]) ids[j] = l;
  return ids;
}

double PlantedInstance::recovery_error(std::span<const double> x) const {
  double acc = 0.0;
  for (int i : influencers) {
    const double d = x[i] - 1.0;
    acc += d * d;
  }
  return std::sqrt(acc);
}

void PlantedInstance::validate() const {
  if (k <= 0) throw std::invalid_argument("instance has k <= 0");
  if (static_cast<int>(sender_groups.size()) != k)
    throw std::invalid_argument("sender_groups size != k");
  if (static_cast<int>(receiver_groups.size()) != k + 1)
    throw std::invalid_argument("receiver_groups size != k+1 (G_0 first)");
  if (static_cast<int>(influencers.size()) != k)
    throw std::invalid_argument("influencers size != k");

  std::vector<char> seen(graph.num_senders(), 0);
  for (int l = 0; l < k; ++l) {
    const auto& group = sender_groups[l];
    if (group.empty()) throw std::invalid_argument("empty sender group");
    if (group.front() != influencers[l])
      throw std::invalid_argument("influencer is not first member of its group");
    for (int i : group) {
      if (i < 0 || i >= graph.num_senders() || seen[i])
        throw std::invalid_argument("sender partition broken");
      seen[i] = 1;
    }
  }
  if (std::count(seen.begin(), seen.end(), 1) != graph.num_senders())
    throw std::invalid_argument("sender partition does not cover all senders");

  std::vector<char> seen_r(graph.num_receivers(), 0);
  for (const auto& group : receiver_groups) {
    for (int j : group) {
      if (j < 0 || j >= graph.num_receivers() || seen_r[j])
        throw std::invalid_argument("receiver partition broken");
      seen_r[j] = 1;
    }
  }
  if (std::count(seen_r.begin(), seen_r.end(), 1) != graph.num_receivers())
    throw std::invalid_argument("receiver partition does not cover all receivers");
}

bool satisfies_noiseless_assumptions(const PlantedInstance& inst) {
  if (!inst.receiver_groups[0].empty()) return false;  // no G_0 in A1-A3
  const auto rgroup = inst.receiver_group_ids();
  for (int l = 1; l <= inst.k; ++l) {
    const int infl = inst.influencers[l - 1];
    // A1: influencer adjacent to every receiver of its group, and (A2) to
    // nothing else.
    std::size_t in_group = 0;
    for (int j : inst.graph.receivers_of(infl)) {
      if (rgroup[j] != l) return false;
      ++in_group;
    }
    if (in_group != inst.receiver_groups[l].size()) return false;
  }
  for (int l = 1; l <= inst.k; ++l) {
    for (std::size_t s = 1; s < inst.sender_groups[l - 1].size(); ++s) {
      const int sub = inst.sender_groups[l - 1][s];
      for (int j : inst.graph.receivers_of(sub))
        if (rgroup[j] != l) return false;  // A2
      // A3: proper subset of G_l.
      if (inst.graph.outdegree(sub) >=
          static_cast<int>(inst.receiver_groups[l].size()))
        return false;
    }
  }
  return true;
}

bool satisfies_a1_prime(const PlantedInstance& inst) {
  const auto rgroup = inst.receiver_group_ids();
  for (int l = 1; l <= inst.k; ++l) {
    const int infl = inst.influencers[l - 1];
    std::size_t covered = 0;
    for (int j : inst.graph.receivers_of(infl)) {
      if (rgroup[j] == 0) return false;  // influencer into G_0
      if (rgroup[j] == l) ++covered;
    }
    if (covered != inst.receiver_groups[l].size()) return false;
  }
  return true;
}

namespace {

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(v[i]);
  }
  return out;
}

std::vector<int> split_ints(const std::string& s) {
  std::vector<int> out;
  std::istringstream in(s);
  int v;
  while (in >> v) out.push_back(v);
  return out;
}

}  // namespace

void save_instance(const PlantedInstance& inst, const std::string& dir,
                   const std::map<std::string, std::string>& extra_meta) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_graph_file(inst.graph, (fs::path(dir) / "graph.txt").string());

  std::ofstream meta((fs::path(dir) / "meta.txt").string(), std::ios::binary);
  if (!meta) throw std::runtime_error("cannot write meta file in " + dir);
  meta << "k " << inst.k << "\n";
  meta << "influencers " << join_ints(inst.influencers) << "\n";
  meta << "sender_group " << join_ints(inst.sender_group_ids()) << "\n";
  meta << "receiver_group " << join_ints(inst.receiver_group_ids()) << "\n";
  for (const auto& [key, value] : extra_meta) meta << key << " " << value << "\n";
}

std::map<std::string, std::string> load_instance_meta(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream meta((fs::path(dir) / "meta.txt").string(), std::ios::binary);
  if (!meta) throw std::runtime_error("cannot open meta file in " + dir);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(meta, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto space = line.find(' ');
    if (space == std::string::npos)
      kv[line] = "";
    else
      kv[line.substr(0, space)] = line.substr(space + 1);
  }
  return kv;
}

PlantedInstance load_instance(const std::string& dir) {
  namespace fs = std::filesystem;
  auto kv = load_instance_meta(dir);
  auto graph = read_graph_file((fs::path(dir) / "graph.txt").string());

  const auto need = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end())
      throw std::runtime_error(std::string("meta key missing: ") + key);
    return it->second;
  };

  PlantedInstance inst{std::move(graph), 0, {}, {}, {}};
  inst.k = std::stoi(need("k"));
  inst.influencers = split_ints(need("influencers"));
  const auto sgroup = split_ints(need("sender_group"));
  const auto rgroup = split_ints(need("receiver_group"));
  if (static_cast<int>(sgroup.size()) != inst.graph.num_senders() ||
      static_cast<int>(rgroup.size()) != inst.graph.num_receivers())
    throw std::runtime_error("meta group arrays do not match graph dimensions");

  inst.sender_groups.assign(inst.k, {});
  inst.receiver_groups.assign(inst.k + 1, {});
  // Influencer must come first within its group; it is the recorded index.
  for (int l = 0; l < inst.k; ++l) inst.sender_groups[l].push_back(inst.influencers[l]);
  for (int i = 0; i < inst.graph.num_senders(); ++i) {
    const int l = sgroup[i];
    if (l < 1 || l > inst.k) throw std::runtime_error("bad sender group id");
    if (i != inst.influencers[l - 1]) inst.sender_groups[l - 1].push_back(i);
  }
  for (int j = 0; j < inst.graph.num_receivers(); ++j) {
    const int l = rgroup[j];
    if (l < 0 || l > inst.k) throw std::runtime_error("bad receiver group id");
    inst.receiver_groups[l].push_back(j);
  }
  inst.validate();
  return inst;
}

}  // namespace influence
