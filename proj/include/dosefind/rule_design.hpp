#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dosefind/monitoring.hpp"
#include "dosefind/trial.hpp"

namespace dosefind {

/// The rule-based designs: cohorts of 3 with the classic rules, the same
/// rules with cohorts of 2 or 4, and the single-patient run-in that hands
/// over to cohorts of 3 after the first DLT.
enum class RuleDesignKind {
  three_plus_three,
  two_plus_two,
  four_plus_four,
  hybrid_1_2_3,
};

inline std::string rule_design_name(RuleDesignKind kind) {
  switch (kind) {
    case RuleDesignKind::three_plus_three: return "3+3";
    case RuleDesignKind::two_plus_two: return "2+2";
    case RuleDesignKind::four_plus_four: return "4+4";
    case RuleDesignKind::hybrid_1_2_3: return "1+2+3/3+3";
  }
  throw std::logic_error("rule_design_name: unknown design");
}

/// What to do when the lowest dose proves too toxic. Only closing the
/// study is implemented; restarting at a fraction of the starting dose
/// would need a dose ladder that can grow downward.
enum class FloorPolicy { close_study };

/// What to do when escalation is mandated at the top dose: keep treating
/// there until the dose group is complete, then accept it as the MTD
/// (flagged as a boundary result) if it passes.
enum class CeilingPolicy { expand_top_then_stop };

/// Decision for one dose group under cohorts of size c: after the first
/// cohort 0 DLTs escalate, 1 holds for a second cohort, 2 or more rule the
/// dose out; after the full group at most 1 DLT escalates, 2 or more rule
/// the dose out. Cells that cannot occur under the design are rejected.
inline Action symmetric_decision(int cohort_size, int patients, int dlts) {
  if (cohort_size < 1) throw std::invalid_argument("symmetric_decision: bad cohort size");
  if (dlts < 0 || dlts > patients) {
    throw std::invalid_argument("symmetric_decision: DLT count out of range");
  }
  const int c = cohort_size;
  if (patients == c) {
    if (dlts == 0) return Action::escalate();
    if (dlts == 1) return Action::stay();
    return Action::deescalate_unacceptable();
  }
  if (patients == 2 * c) {
    // A full group pools a first cohort with 0 or 1 DLTs and a second
    // cohort, so more than c + 1 DLTs cannot occur.
    if (dlts > c + 1) {
      throw std::invalid_argument("symmetric_decision: unreachable cell");
    }
    if (dlts <= 1) return Action::escalate();
    return Action::deescalate_unacceptable();
  }
  throw std::invalid_argument("symmetric_decision: unreachable cell");
}

/// The standard design's rules (cohorts of 3).
inline Action std33_decision(int patients, int dlts) {
  return symmetric_decision(3, patients, dlts);
}

enum class HybridStage { accelerate, standard };

/// Decision plus an explicit size for the next cohort when the stage
/// transition dictates one (the two-patient bridge that completes a
/// single-patient dose group to three).
struct HybridDecision {
  Action action;
  std::optional<int> next_cohort_size;
};

/// Single-patient run-in: a clear patient escalates; the first DLT calls
/// for two more patients at the same dose, after which the standard rules
/// apply everywhere with the dose group pooled.
inline HybridDecision hybrid123_decision(HybridStage stage, int patients, int dlts) {
  if (dlts < 0 || dlts > patients) {
    throw std::invalid_argument("hybrid123_decision: DLT count out of range");
  }
  if (stage == HybridStage::accelerate) {
    if (patients != 1) {
      throw std::invalid_argument("hybrid123_decision: run-in groups hold one patient");
    }
    if (dlts == 0) return {Action::escalate(), std::nullopt};
    return {Action::stay(), 2};
  }
  if (patients != 3 && patients != 6) {
    throw std::invalid_argument("hybrid123_decision: unreachable cell");
  }
  return {std33_decision(patients, dlts), std::nullopt};
}

/// Highest dose with a completed group (2 x cohort size patients or more)
/// and at most 1 DLT; the standard design's MTD heuristic.
inline std::optional<int> select_mtd_standard(const std::vector<DoseGroupRecord>& groups,
                                              int cohort_size) {
  if (cohort_size < 1) throw std::invalid_argument("select_mtd_standard: bad cohort size");
  std::optional<int> best;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].patients >= 2 * cohort_size && groups[i].dlts <= 1) {
      best = static_cast<int>(i) + 1;
    }
  }
  return best;
}

inline std::optional<int> select_mtd_standard(const TrialState& state, int cohort_size) {
  return select_mtd_standard(state.groups(), cohort_size);
}

inline std::optional<int> select_mtd_standard(const TrialOutcome& outcome, int cohort_size) {
  return select_mtd_standard(outcome.groups, cohort_size);
}

/// Driver for the rule-based designs. Beyond the per-group decisions, the
/// driver owns the trial-level conventions:
///  - an escalation that has nowhere to go (top dose, or the next dose is
///    excluded) keeps enrolling at the current dose until its group is
///    complete, then stops and accepts the current dose as the MTD;
///  - de-escalating onto a dose whose group is already complete (so it has
///    at most 1 DLT) stops immediately with that dose as the MTD;
///  - de-escalating onto an incomplete dose enrolls the group's remaining
///    cohorts there;
///  - an unacceptable-toxicity call at dose 1 closes the study.
class RuleDesign {
 public:
  RuleDesign(RuleDesignKind kind, int num_doses,
             FloorPolicy floor = FloorPolicy::close_study,
             CeilingPolicy ceiling = CeilingPolicy::expand_top_then_stop)
      : kind_(kind), num_doses_(num_doses), floor_(floor), ceiling_(ceiling) {
    if (num_doses < 1) throw std::invalid_argument("RuleDesign: need at least one dose");
  }

  RuleDesignKind kind() const noexcept { return kind_; }
  int num_doses() const noexcept { return num_doses_; }
  FloorPolicy floor_policy() const noexcept { return floor_; }
  CeilingPolicy ceiling_policy() const noexcept { return ceiling_; }

  bool is_hybrid() const noexcept { return kind_ == RuleDesignKind::hybrid_1_2_3; }

  /// Cohort size of the symmetric designs; the hybrid's standard stage.
  int cohort_size() const noexcept {
    switch (kind_) {
      case RuleDesignKind::two_plus_two: return 2;
      case RuleDesignKind::four_plus_four: return 4;
      default: return 3;
    }
  }

  /// Patients in a completed dose group.
  int group_cap() const noexcept { return is_hybrid() ? 6 : 2 * cohort_size(); }

  std::optional<Action> before_cohort(const TrialState& state) const {
    const auto& g = state.group(state.current_dose());
    if (g.patients >= group_cap()) {
      // Reached only by de-escalating onto a previously accepted dose.
      if (g.dlts > 1) throw std::logic_error("RuleDesign: completed group was not accepted");
      return Action::stop_with_mtd(state.current_dose());
    }
    return std::nullopt;
  }

  int next_cohort_size(const TrialState& state) const {
    const auto& g = state.group(state.current_dose());
    if (!is_hybrid()) return cohort_size();
    switch (g.patients) {
      case 0: return state.total_dlts() == 0 ? 1 : 3;
      case 1: return 2;  // bridge a single-patient group up to three
      case 3: return 3;
      default: throw std::logic_error("RuleDesign: no cohort fits this group");
    }
  }

  Action after_cohort(const TrialState& state) const {
    const int dose = state.current_dose();
    const auto& g = state.group(dose);
    const Action cell = cell_decision(g.patients, g.dlts);
    if (cell.kind() != ActionKind::escalate) return cell;

    const bool at_top = dose == state.num_doses();
    if (!at_top && !state.is_excluded(dose + 1)) return cell;
    if (g.patients < group_cap()) return Action::stay();
    return Action::stop_with_mtd(dose, /*at_boundary=*/at_top);
  }

 private:
  Action cell_decision(int patients, int dlts) const {
    if (!is_hybrid()) return symmetric_decision(cohort_size(), patients, dlts);
    const HybridStage stage =
        patients == 1 ? HybridStage::accelerate : HybridStage::standard;
    return hybrid123_decision(stage, patients, dlts).action;
  }

  RuleDesignKind kind_;
  int num_doses_;
  FloorPolicy floor_;
  CeilingPolicy ceiling_;
};

/// All reachable (patients, DLTs) cells of a rule design with the action
/// each dictates.
inline MonitoringTable monitoring_table(RuleDesignKind kind) {
  std::map<std::pair<int, int>, ActionKind> cells;
  std::vector<int> sizes;
  if (kind == RuleDesignKind::hybrid_1_2_3) {
    sizes = {1, 3, 6};
    for (int t = 0; t <= 1; ++t) {
      cells[{1, t}] = hybrid123_decision(HybridStage::accelerate, 1, t).action.kind();
    }
    for (int t = 0; t <= 3; ++t) {
      cells[{3, t}] = hybrid123_decision(HybridStage::standard, 3, t).action.kind();
    }
    for (int t = 0; t <= 4; ++t) {
      cells[{6, t}] = hybrid123_decision(HybridStage::standard, 6, t).action.kind();
    }
  } else {
    const int c = RuleDesign(kind, 1).cohort_size();
    sizes = {c, 2 * c};
    for (int t = 0; t <= c; ++t) {
      cells[{c, t}] = symmetric_decision(c, c, t).kind();
    }
    for (int t = 0; t <= c + 1; ++t) {
      cells[{2 * c, t}] = symmetric_decision(c, 2 * c, t).kind();
    }
  }
  return MonitoringTable(std::move(sizes), std::move(cells));
}

}  // namespace dosefind
