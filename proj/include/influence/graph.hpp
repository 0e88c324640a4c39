#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace influence {

/// Error for malformed graph text, carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Arc = std::pair<int, int>;  // (sender, receiver)

/// Directed bipartite graph, arcs from senders to receivers.
///
/// Adjacency is stored compressed in both orientations at construction time;
/// every solver needs both, so the doubled memory is accepted. Instances are
/// immutable after construction and safe to share across threads.
class BipartiteGraph {
 public:
  /// Throws DimensionError on out-of-range indices and on duplicate arcs;
  /// duplicates always signal a generator bug and are never merged.
  BipartiteGraph(int num_senders, int num_receivers, std::vector<Arc> arcs);

  int num_senders() const { return num_senders_; }
  int num_receivers() const { return num_receivers_; }
  std::int64_t num_arcs() const { return static_cast<std::int64_t>(arc_receiver_.size()); }

  /// Receivers adjacent to sender i, ascending.
  std::span<const int> receivers_of(int sender) const {
    return {arc_receiver_.data() + sender_ptr_[sender],
            arc_receiver_.data() + sender_ptr_[sender + 1]};
  }
  /// Senders adjacent to receiver j, ascending.
  std::span<const int> senders_of(int receiver) const {
    return {arc_sender_.data() + receiver_ptr_[receiver],
            arc_sender_.data() + receiver_ptr_[receiver + 1]};
  }

  int outdegree(int sender) const { return sender_ptr_[sender + 1] - sender_ptr_[sender]; }
  int indegree(int receiver) const { return receiver_ptr_[receiver + 1] - receiver_ptr_[receiver]; }

  bool has_arc(int sender, int receiver) const;

  /// Arcs in sender-major (lexicographic) order.
  std::vector<Arc> arcs() const;

 private:
  int num_senders_ = 0;
  int num_receivers_ = 0;
  std::vector<int> sender_ptr_;    // size num_senders+1
  std::vector<int> arc_receiver_;  // receiver ids, sender-major
  std::vector<int> receiver_ptr_;  // size num_receivers+1
  std::vector<int> arc_sender_;    // sender ids, receiver-major
};

/// Fractional selection of senders with its budget k.
struct SelectionVector {
  std::vector<double> values;
  int k = 0;

  /// 0 <= x <= 1 and sum(x) == k within tol.
  bool is_feasible(double tol = 1e-9) const;
};

SelectionVector indicator(int num_senders, std::span<const int> chosen);

/// out_j = sum of x_i over senders i adjacent to receiver j (A^T x).
std::vector<double> apply_incidence_transpose(const BipartiteGraph& g,
                                              std::span<const double> x);
std::vector<double> apply_incidence_transpose(const BipartiteGraph& g,
                                              const SelectionVector& x);

/// Number of receivers adjacent to at least one sender in s.
int reachable_count(const BipartiteGraph& g, std::span<const int> s);

/// Text format: "senders <m>", "receivers <n>", then one "<i> <j>" arc per
/// line, 0-based, sorted lexicographically on write. '#' starts a comment.
BipartiteGraph read_graph(const std::string& text);
BipartiteGraph read_graph_file(const std::string& path);
std::string write_graph(const BipartiteGraph& g);
void write_graph_file(const BipartiteGraph& g, const std::string& path);

}  // namespace influence
