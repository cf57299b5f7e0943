#include "pairrank/win_matrix.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>

#include "pairrank/error.hpp"

namespace pairrank {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(const std::string& source, size_t line, const std::string& what) {
  fail(ErrorCode::parse, source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::vector<MatchRecord> parse_match_records(std::istream& in, const std::string& source_name) {
  std::vector<MatchRecord> records;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;

    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      size_t comma = s.find(',', start);
      fields.push_back(trim(s.substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 2 && fields.size() != 3)
      parse_fail(source_name, lineno, "expected 'winner,loser' or 'winner,loser,count'");
    if (fields[0].empty() || fields[1].empty())
      parse_fail(source_name, lineno, "empty player id");
    if (fields[0] == fields[1])
      parse_fail(source_name, lineno, "winner and loser are the same player '" + fields[0] + "'");

    MatchRecord r{fields[0], fields[1], 1};
    if (fields.size() == 3) {
      const std::string& c = fields[2];
      auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), r.count);
      if (ec != std::errc() || ptr != c.data() + c.size() || r.count < 0)
        parse_fail(source_name, lineno, "bad count '" + c + "'");
    }
    records.push_back(std::move(r));
  }
  return records;
}

WinMatrix WinMatrix::from_records(const std::vector<MatchRecord>& records) {
  WinMatrix w;
  std::set<std::string> ids;
  for (const auto& r : records) {
    ids.insert(r.winner);
    ids.insert(r.loser);
  }
  w.labels_.assign(ids.begin(), ids.end());
  for (int i = 0; i < int(w.labels_.size()); ++i) w.index_[w.labels_[size_t(i)]] = i;

  std::map<std::pair<int, int>, std::pair<int64_t, int64_t>> counts;
  for (const auto& r : records) {
    if (r.count == 0) continue;
    int wi = w.index_.at(r.winner);
    int li = w.index_.at(r.loser);
    auto key = std::minmax(wi, li);
    auto& c = counts[key];
    if (wi < li)
      c.first += r.count;
    else
      c.second += r.count;
  }

  w.adjacency_.resize(w.labels_.size());
  w.per_player_matches_.assign(w.labels_.size(), 0);
  for (const auto& [key, c] : counts) {
    Edge e{key.first, key.second, c.first, c.second};
    int idx = int(w.edges_.size());
    w.edges_.push_back(e);
    w.adjacency_[size_t(e.a)].push_back(idx);
    w.adjacency_[size_t(e.b)].push_back(idx);
    int64_t pair_total = e.wins_ab + e.wins_ba;
    w.per_player_matches_[size_t(e.a)] += pair_total;
    w.per_player_matches_[size_t(e.b)] += pair_total;
    w.total_ += pair_total;
  }
  return w;
}

int WinMatrix::index_of(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : it->second;
}

int64_t WinMatrix::wins(int i, int j) const {
  if (i == j) return 0;
  for (int e : adjacency_[size_t(i)]) {
    const Edge& edge = edges_[size_t(e)];
    if (edge.a == std::min(i, j) && edge.b == std::max(i, j))
      return i < j ? edge.wins_ab : edge.wins_ba;
  }
  return 0;
}

WinMatrix load_matches(std::istream& in, const std::string& source_name) {
  return WinMatrix::from_records(parse_match_records(in, source_name));
}

WinMatrix load_matches_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open match file '" + path + "'");
  return load_matches(in, path);
}

}  // namespace pairrank
