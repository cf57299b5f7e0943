#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <unordered_map>
#include <vector>

namespace pairrank {

struct MatchRecord {
  std::string winner;
  std::string loser;
  int64_t count = 1;
};

// Aggregated directed win counts between two players; a < b by index.
struct Edge {
  int a = 0;
  int b = 0;
  int64_t wins_ab = 0;  // times a beat b
  int64_t wins_ba = 0;
};

// Sparse directed win-count matrix over a compacted player set.
// Player indices are assigned by sorting the distinct ids, so the matrix
// is independent of input order.
class WinMatrix {
 public:
  WinMatrix() = default;
  static WinMatrix from_records(const std::vector<MatchRecord>& records);

  int num_players() const { return int(labels_.size()); }
  int64_t total_matches() const { return total_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(int i) const { return labels_[size_t(i)]; }
  // -1 when the id is unknown
  int index_of(const std::string& id) const;

  const std::vector<Edge>& edges() const { return edges_; }
  // indices into edges() for every edge incident to player i
  const std::vector<int>& incident_edges(int i) const { return adjacency_[size_t(i)]; }
  int64_t matches_of(int i) const { return per_player_matches_[size_t(i)]; }

  // directed count w_ij (0 when the pair never met)
  int64_t wins(int i, int j) const;

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> index_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<int64_t> per_player_matches_;
  int64_t total_ = 0;
};

// Text format: one record per line, "winner,loser" or "winner,loser,count".
// Lines starting with '#' and blank lines are ignored.
std::vector<MatchRecord> parse_match_records(std::istream& in,
                                             const std::string& source_name);
WinMatrix load_matches(std::istream& in, const std::string& source_name);
WinMatrix load_matches_file(const std::string& path);

}  // namespace pairrank
