#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dosefind/trial.hpp"

namespace dosefind {

inline std::string action_code(ActionKind kind) {
  switch (kind) {
    case ActionKind::escalate: return "E";
    case ActionKind::stay: return "S";
    case ActionKind::deescalate: return "D";
    case ActionKind::deescalate_unacceptable: return "DU";
    case ActionKind::stop: return "STOP";
  }
  throw std::logic_error("action_code: unknown action");
}

/// Lookup from (patients at the current dose, DLTs at the current dose) to
/// the next action. Columns are the attainable dose-group sizes; only
/// reachable cells carry an entry.
class MonitoringTable {
 public:
  MonitoringTable(std::vector<int> group_sizes,
                  std::map<std::pair<int, int>, ActionKind> cells)
      : group_sizes_(std::move(group_sizes)), cells_(std::move(cells)) {
    std::sort(group_sizes_.begin(), group_sizes_.end());
  }

  const std::vector<int>& group_sizes() const noexcept { return group_sizes_; }

  int max_dlts() const noexcept {
    int m = 0;
    for (const auto& [key, unused] : cells_) m = std::max(m, key.second);
    return m;
  }

  std::optional<ActionKind> cell(int patients, int dlts) const {
    const auto it = cells_.find({patients, dlts});
    if (it == cells_.end()) return std::nullopt;
    return it->second;
  }

  const std::map<std::pair<int, int>, ActionKind>& cells() const noexcept { return cells_; }

  friend bool operator==(const MonitoringTable&, const MonitoringTable&) = default;

 private:
  std::vector<int> group_sizes_;
  std::map<std::pair<int, int>, ActionKind> cells_;
};

/// Within each column, more DLTs never move the action toward escalation.
/// Severity order: E < S < D = DU.
inline bool column_monotone(const MonitoringTable& table) {
  const auto rank = [](ActionKind a) {
    switch (a) {
      case ActionKind::escalate: return 0;
      case ActionKind::stay: return 1;
      default: return 2;
    }
  };
  for (int n : table.group_sizes()) {
    int prev = -1;
    for (int t = 0; t <= n; ++t) {
      const auto cell = table.cell(n, t);
      if (!cell) continue;
      const int r = rank(*cell);
      if (r < prev) return false;
      prev = r;
    }
  }
  return true;
}

/// Aligned text rendering: one row per DLT count, one column per group size.
inline std::string to_text(const MonitoringTable& table) {
  std::ostringstream os;
  os << "dlts";
  for (int n : table.group_sizes()) os << "\tn=" << n;
  os << '\n';
  const int rows = table.max_dlts();
  for (int t = 0; t <= rows; ++t) {
    os << t;
    for (int n : table.group_sizes()) {
      const auto cell = table.cell(n, t);
      os << '\t' << (cell ? action_code(*cell) : "");
    }
    os << '\n';
  }
  return os.str();
}

/// CSV rendering: header "dlts,n3,n6,...", blank fields for unreachable cells.
inline std::string to_csv(const MonitoringTable& table) {
  std::ostringstream os;
  os << "dlts";
  for (int n : table.group_sizes()) os << ",n" << n;
  os << '\n';
  const int rows = table.max_dlts();
  for (int t = 0; t <= rows; ++t) {
    os << t;
    for (int n : table.group_sizes()) {
      const auto cell = table.cell(n, t);
      os << ',' << (cell ? action_code(*cell) : "");
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace dosefind
