#include "influence/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace influence {

BipartiteGraph::BipartiteGraph(int num_senders, int num_receivers,
                               std::vector<Arc> arcs)
    : num_senders_(num_senders), num_receivers_(num_receivers) {
  if (num_senders < 0 || num_receivers < 0)
    throw DimensionError("negative node count");

  std::sort(arcs.begin(), arcs.end());
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    const auto [i, j] = arcs[a];
    if (i < 0 || i >= num_senders_)
      throw DimensionError("sender index " + std::to_string(i) + " out of range");
    if (j < 0 || j >= num_receivers_)
      throw DimensionError("receiver index " + std::to_string(j) + " out of range");
    if (a > 0 && arcs[a] == arcs[a - 1])
      throw DimensionError("duplicate arc (" + std::to_string(i) + ", " +
                           std::to_string(j) + ")");
  }

  sender_ptr_.assign(num_senders_ + 1, 0);
  receiver_ptr_.assign(num_receivers_ + 1, 0);
  for (const auto& [i, j] : arcs) {
    ++sender_ptr_[i + 1];
    ++receiver_ptr_[j + 1];
  }
  for (int i = 0; i < num_senders_; ++i) sender_ptr_[i + 1] += sender_ptr_[i];
  for (int j = 0; j < num_receivers_; ++j) receiver_ptr_[j + 1] += receiver_ptr_[j];

  arc_receiver_.resize(arcs.size());
  arc_sender_.resize(arcs.size());
  std::vector<int> fill(receiver_ptr_.begin(), receiver_ptr_.end() - 1);
  std::size_t pos = 0;
  for (const auto& [i, j] : arcs) {
    arc_receiver_[pos++] = j;           // arcs already sender-major sorted
    arc_sender_[fill[j]++] = i;         // receiver-major, senders ascending
  }
}

bool BipartiteGraph::has_arc(int sender, int receiver) const {
  const auto nbrs = receivers_of(sender);
  return std::binary_search(nbrs.begin(), nbrs.end(), receiver);
}

std::vector<Arc> BipartiteGraph::arcs() const {
  std::vector<Arc> out;
  out.reserve(arc_receiver_.size());
  for (int i = 0; i < num_senders_; ++i)
    for (int j : receivers_of(i)) out.emplace_back(i, j);
  return out;
}

bool SelectionVector::is_feasible(double tol) const {
  double sum = 0.0;
  for (double v : values) {
    if (v < -tol || v > 1.0 + tol) return false;
    sum += v;
  }
  return std::abs(sum - k) <= tol;
}

SelectionVector indicator(int num_senders, std::span<const int> chosen) {
  SelectionVector sel;
  sel.values.assign(num_senders, 0.0);
  sel.k = static_cast<int>(chosen.size());
  for (int i : chosen) {
    if (i < 0 || i >= num_senders) throw DimensionError("sender index out of range");
    sel.values[i] = 1.0;
  }
  return sel;
}

std::vector<double> apply_incidence_transpose(const BipartiteGraph& g,
                                              std::span<const double> x) {
  if (static_cast<int>(x.size()) != g.num_senders())
    throw DimensionError("selection length " + std::to_string(x.size()) +
                         " != num_senders " + std::to_string(g.num_senders()));
  std::vector<double> out(g.num_receivers(), 0.0);
  for (int j = 0; j < g.num_receivers(); ++j) {
    double acc = 0.0;
    for (int i : g.senders_of(j)) acc += x[i];
    out[j] = acc;
  }
  return out;
}

std::vector<double> apply_incidence_transpose(const BipartiteGraph& g,
                                              const SelectionVector& x) {
  return apply_incidence_transpose(g, std::span<const double>(x.values));
}

int reachable_count(const BipartiteGraph& g, std::span<const int> s) {
  std::vector<char> in_set(g.num_senders(), 0);
  for (int i : s) {
    if (i < 0 || i >= g.num_senders()) throw DimensionError("sender index out of range");
    in_set[i] = 1;
  }
  int count = 0;
  for (int j = 0; j < g.num_receivers(); ++j) {
    for (int i : g.senders_of(j)) {
      if (in_set[i]) {
        ++count;
        break;
      }
    }
  }
  return count;
}

namespace {

// Strict unsigned decimal parse; rejects trailing garbage.
bool parse_int(const std::string& tok, int& out) {
  if (tok.empty()) return false;
  long long v = 0;
  for (char c : tok) {
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
    if (v > 1'000'000'000LL) return false;
  }
  out = static_cast<int>(v);
  return true;
}

}  // namespace

BipartiteGraph read_graph(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  int m = -1, n = -1;
  std::vector<Arc> arcs;

  auto next_content_line = [&](std::string& out) {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      out = line;
      return true;
    }
    return false;
  };

  std::string content;
  if (!next_content_line(content))
    throw ParseError(line_no, "missing 'senders' header");
  {
    std::istringstream ls(content);
    std::string key, value, extra;
    ls >> key >> value;
    if (key != "senders" || !parse_int(value, m) || (ls >> extra))
      throw ParseError(line_no, "expected 'senders <m>'");
  }
  if (!next_content_line(content))
    throw ParseError(line_no, "missing 'receivers' header");
  {
    std::istringstream ls(content);
    std::string key, value, extra;
    ls >> key >> value;
    if (key != "receivers" || !parse_int(value, n) || (ls >> extra))
      throw ParseError(line_no, "expected 'receivers <n>'");
  }

  while (next_content_line(content)) {
    std::istringstream ls(content);
    std::string a, b, extra;
    int i = 0, j = 0;
    ls >> a >> b;
    if (!parse_int(a, i) || !parse_int(b, j) || (ls >> extra))
      throw ParseError(line_no, "expected arc '<i> <j>'");
    if (i >= m)
      throw ParseError(line_no, "sender index " + std::to_string(i) +
                                    " out of range (senders " + std::to_string(m) + ")");
    if (j >= n)
      throw ParseError(line_no, "receiver index " + std::to_string(j) +
                                    " out of range (receivers " + std::to_string(n) + ")");
    arcs.emplace_back(i, j);
  }

  std::sort(arcs.begin(), arcs.end());
  const auto dup = std::adjacent_find(arcs.begin(), arcs.end());
  if (dup != arcs.end())
    throw ParseError(line_no, "duplicate arc (" + std::to_string(dup->first) + ", " +
                                  std::to_string(dup->second) + ")");

  return BipartiteGraph(m, n, std::move(arcs));
}

BipartiteGraph read_graph_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open graph file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return read_graph(buf.str());
}

std::string write_graph(const BipartiteGraph& g) {
  std::string out;
  out += "senders " + std::to_string(g.num_senders()) + "\n";
  out += "receivers " + std::to_string(g.num_receivers()) + "\n";
  for (int i = 0; i < g.num_senders(); ++i)
    for (int j : g.receivers_of(i))
      out += std::to_string(i) + " " + std::to_string(j) + "\n";
  return out;
}

void write_graph_file(const BipartiteGraph& g, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open graph file for write: " + path);
  f << write_graph(g);
}

}  // namespace influence
