#pragma once

#include <concepts>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dosefind/rng.hpp"

namespace dosefind {

/// True DLT probabilities per dose level. Dose levels are 1-based
/// everywhere in this library, matching clinical "dose level 1" usage.
/// Monotonicity is not required; callers that need it can check
/// is_nondecreasing().
class DoseToxicityCurve {
 public:
  explicit DoseToxicityCurve(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) {
      throw std::invalid_argument("DoseToxicityCurve: need at least one dose level");
    }
    for (double p : probs_) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("DoseToxicityCurve: probabilities must lie in [0,1]");
      }
    }
  }

  int num_doses() const noexcept { return static_cast<int>(probs_.size()); }

  double prob(int dose) const {
    if (dose < 1 || dose > num_doses()) {
      throw std::out_of_range("DoseToxicityCurve: dose index out of range");
    }
    return probs_[static_cast<std::size_t>(dose - 1)];
  }

  const std::vector<double>& probs() const noexcept { return probs_; }

  bool is_nondecreasing() const noexcept {
    for (std::size_t i = 1; i < probs_.size(); ++i) {
      if (probs_[i] < probs_[i - 1]) return false;
    }
    return true;
  }

 private:
  std::vector<double> probs_;
};

/// Patients treated and DLTs observed in one dose group.
struct DoseGroupRecord {
  int patients = 0;
  int dlts = 0;

  friend bool operator==(const DoseGroupRecord&, const DoseGroupRecord&) = default;
};

/// One enrolled cohort: where it was treated, how many patients, how many DLTs.
struct CohortRecord {
  int dose = 0;
  int size = 0;
  int dlts = 0;

  friend bool operator==(const CohortRecord&, const CohortRecord&) = default;
};

enum class TrialStatus { active, stopped_with_mtd, stopped_no_mtd };

enum class ActionKind {
  escalate,                  // E
  stay,                      // S
  deescalate,                // D: one level down, dose stays admissible
  deescalate_unacceptable,   // DU: current and higher doses become off limits
  stop,                      // terminal
};

/// A design decision. Stop actions carry the final MTD (if any) and whether
/// the MTD was accepted at the top of the dose ladder under mandated
/// escalation.
class Action {
 public:
  static Action escalate() noexcept { return Action(ActionKind::escalate); }
  static Action stay() noexcept { return Action(ActionKind::stay); }
  static Action deescalate() noexcept { return Action(ActionKind::deescalate); }
  static Action deescalate_unacceptable() noexcept {
    return Action(ActionKind::deescalate_unacceptable);
  }
  static Action stop_with_mtd(int dose, bool at_boundary = false) noexcept {
    Action a(ActionKind::stop);
    a.mtd_ = dose;
    a.at_boundary_ = at_boundary;
    return a;
  }
  static Action stop_no_mtd() noexcept { return Action(ActionKind::stop); }

  ActionKind kind() const noexcept { return kind_; }
  std::optional<int> mtd() const noexcept { return mtd_; }
  bool at_boundary() const noexcept { return at_boundary_; }

  friend bool operator==(const Action&, const Action&) = default;

 private:
  explicit Action(ActionKind kind) noexcept : kind_(kind) {}

  ActionKind kind_;
  std::optional<int> mtd_;
  bool at_boundary_ = false;
};

class TrialState;

TrialState new_trial(int num_doses);
TrialState record_cohort(TrialState state, int dose, int size, int dlts);
TrialState apply_action(TrialState state, const Action& action);

/// The sequential-trial record: per-dose counts, the current dose, the set
/// of doses ruled out as unacceptably toxic, and the terminal status.
///
/// Exclusion is upward closed (ruling out dose j rules out every dose
/// above it), so the excluded set is stored as its smallest element.
/// TrialState is a value; the transition functions take it by value and
/// return the updated state.
class TrialState {
 public:
  int num_doses() const noexcept { return static_cast<int>(groups_.size()); }
  TrialStatus status() const noexcept { return status_; }
  bool active() const noexcept { return status_ == TrialStatus::active; }

  int current_dose() const {
    if (!active()) throw std::logic_error("TrialState: no current dose after stopping");
    return current_;
  }

  const DoseGroupRecord& group(int dose) const {
    check_dose(dose);
    return groups_[static_cast<std::size_t>(dose - 1)];
  }
  const std::vector<DoseGroupRecord>& groups() const noexcept { return groups_; }

  /// Smallest excluded dose; num_doses() + 1 when nothing is excluded.
  int first_excluded() const noexcept { return first_excluded_; }
  bool is_excluded(int dose) const {
    check_dose(dose);
    return dose >= first_excluded_;
  }
  bool any_excluded() const noexcept { return first_excluded_ <= num_doses(); }

  std::optional<int> mtd() const noexcept { return mtd_; }
  bool mtd_at_boundary() const noexcept { return mtd_at_boundary_; }

  const std::vector<CohortRecord>& cohort_log() const noexcept { return log_; }

  int total_patients() const noexcept {
    int n = 0;
    for (const auto& g : groups_) n += g.patients;
    return n;
  }
  int total_dlts() const noexcept {
    int t = 0;
    for (const auto& g : groups_) t += g.dlts;
    return t;
  }

 private:
  friend TrialState new_trial(int num_doses);
  friend TrialState record_cohort(TrialState state, int dose, int size, int dlts);
  friend TrialState apply_action(TrialState state, const Action& action);

  TrialState() = default;

  void check_dose(int dose) const {
    if (dose < 1 || dose > num_doses()) {
      throw std::out_of_range("TrialState: dose index out of range");
    }
  }

  std::vector<DoseGroupRecord> groups_;
  std::vector<CohortRecord> log_;
  int current_ = 1;
  int first_excluded_ = 0;  // num_doses() + 1 when nothing is excluded
  TrialStatus status_ = TrialStatus::active;
  std::optional<int> mtd_;
  bool mtd_at_boundary_ = false;
};

inline TrialState new_trial(int num_doses) {
  if (num_doses < 1) throw std::invalid_argument("new_trial: need at least one dose level");
  TrialState st;
  st.groups_.assign(static_cast<std::size_t>(num_doses), DoseGroupRecord{});
  st.current_ = 1;
  st.first_excluded_ = num_doses + 1;
  st.status_ = TrialStatus::active;
  return st;
}

inline TrialState record_cohort(TrialState state, int dose, int size, int dlts) {
  if (!state.active()) throw std::logic_error("record_cohort: trial already stopped");
  if (dose != state.current_) {
    throw std::invalid_argument("record_cohort: cohorts are treated at the current dose");
  }
  if (size < 1) throw std::invalid_argument("record_cohort: cohort size must be positive");
  if (dlts < 0 || dlts > size) {
    throw std::invalid_argument("record_cohort: DLT count must lie in [0, size]");
  }
  auto& g = state.groups_[static_cast<std::size_t>(dose - 1)];
  g.patients += size;
  g.dlts += dlts;
  state.log_.push_back(CohortRecord{dose, size, dlts});
  return state;
}

inline TrialState apply_action(TrialState state, const Action& action) {
  if (!state.active()) throw std::logic_error("apply_action: trial already stopped");
  switch (action.kind()) {
    case ActionKind::escalate:
      // Escalation into an excluded dose or above the top never happens from
      // the designs in this library (they resolve those cases to stay/stop);
      // resolving to "hold the dose" keeps the transition total.
      if (state.current_ < state.num_doses() && !state.is_excluded(state.current_ + 1)) {
        ++state.current_;
      }
      break;
    case ActionKind::stay:
      break;
    case ActionKind::deescalate:
      // Plain de-escalation below the lowest dose holds at dose 1; only an
      // unacceptable-toxicity call at dose 1 closes the study.
      if (state.current_ > 1) --state.current_;
      break;
    case ActionKind::deescalate_unacceptable:
      state.first_excluded_ = state.current_;
      if (state.current_ == 1) {
        state.status_ = TrialStatus::stopped_no_mtd;
      } else {
        --state.current_;
      }
      break;
    case ActionKind::stop:
      if (action.mtd().has_value()) {
        const int dose = *action.mtd();
        state.check_dose(dose);
        if (state.group(dose).patients == 0) {
          throw std::invalid_argument("apply_action: MTD must be a treated dose");
        }
        state.status_ = TrialStatus::stopped_with_mtd;
        state.mtd_ = dose;
        state.mtd_at_boundary_ = action.at_boundary();
      } else {
        state.status_ = TrialStatus::stopped_no_mtd;
      }
      break;
  }
  return state;
}

/// Final record of one trial run.
struct TrialOutcome {
  std::optional<int> mtd;
  bool mtd_at_boundary = false;
  TrialStatus status = TrialStatus::stopped_no_mtd;
  std::vector<DoseGroupRecord> groups;
  std::vector<CohortRecord> cohort_log;

  const DoseGroupRecord& group(int dose) const {
    if (dose < 1 || dose > static_cast<int>(groups.size())) {
      throw std::out_of_range("TrialOutcome: dose index out of range");
    }
    return groups[static_cast<std::size_t>(dose - 1)];
  }

  int total_patients() const noexcept {
    int n = 0;
    for (const auto& g : groups) n += g.patients;
    return n;
  }
  int total_dlts() const noexcept {
    int t = 0;
    for (const auto& g : groups) t += g.dlts;
    return t;
  }

  friend bool operator==(const TrialOutcome&, const TrialOutcome&) = default;
};

inline TrialOutcome trial_outcome(TrialState state) {
  if (state.active()) throw std::logic_error("trial_outcome: trial still active");
  TrialOutcome out;
  out.mtd = state.mtd();
  out.mtd_at_boundary = state.mtd_at_boundary();
  out.status = state.status();
  out.groups = state.groups();
  out.cohort_log = state.cohort_log();
  return out;
}

/// A dose-assignment design, as seen by the trial driver.
///
/// before_cohort may end the trial using only the information already in
/// the state (a dose revisited with a completed, accepted group; a sample
/// size cap). next_cohort_size says how many patients to treat at the
/// current dose. after_cohort maps the updated state to the next action;
/// designs resolve blocked escalations (top of the ladder, next dose
/// excluded) themselves, so the action returned here is always applicable.
template <class D>
concept TrialDesign = requires(const D& design, const TrialState& state) {
  { design.num_doses() } -> std::convertible_to<int>;
  { design.before_cohort(state) } -> std::convertible_to<std::optional<Action>>;
  { design.next_cohort_size(state) } -> std::convertible_to<int>;
  { design.after_cohort(state) } -> std::convertible_to<Action>;
};

/// Runs one trial to termination. Deterministic given the seed behind
/// `rng`: cohort DLT counts are binomial draws with the cohort size and
/// the true rate at the current dose.
template <TrialDesign D>
TrialOutcome run_trial(const D& design, const DoseToxicityCurve& curve, Rng& rng) {
  if (design.num_doses() != curve.num_doses()) {
    throw std::invalid_argument("run_trial: design and curve dose counts differ");
  }
  TrialState st = new_trial(curve.num_doses());
  // All designs here terminate in a handful of cohorts; the cap turns a
  // non-terminating design configuration into a loud error.
  constexpr int kMaxCohorts = 100000;
  int cohorts = 0;
  while (st.active()) {
    if (std::optional<Action> stop = design.before_cohort(st)) {
      st = apply_action(std::move(st), *stop);
      break;
    }
    if (++cohorts > kMaxCohorts) {
      throw std::logic_error("run_trial: design did not terminate");
    }
    const int dose = st.current_dose();
    const int size = design.next_cohort_size(st);
    const int dlts = binomial_draw(rng, size, curve.prob(dose));
    st = record_cohort(std::move(st), dose, size, dlts);
    st = apply_action(std::move(st), design.after_cohort(st));
  }
  return trial_outcome(std::move(st));
}

/// Re-runs a design against a fixed sequence of cohort outcomes instead of
/// random draws. Feeding a run's own cohort_log back through reproduces
/// that run exactly; any disagreement (wrong dose or cohort size) throws.
template <TrialDesign D>
TrialOutcome replay_trial(const D& design, const std::vector<CohortRecord>& log) {
  TrialState st = new_trial(design.num_doses());
  std::size_t next = 0;
  while (st.active()) {
    if (std::optional<Action> stop = design.before_cohort(st)) {
      st = apply_action(std::move(st), *stop);
      break;
    }
    if (next >= log.size()) throw std::invalid_argument("replay_trial: log too short");
    const CohortRecord rec = log[next++];
    if (rec.dose != st.current_dose() || rec.size != design.next_cohort_size(st)) {
      throw std::invalid_argument("replay_trial: log disagrees with the design's choices");
    }
    st = record_cohort(std::move(st), rec.dose, rec.size, rec.dlts);
    st = apply_action(std::move(st), design.after_cohort(st));
  }
  if (next != log.size()) throw std::invalid_argument("replay_trial: log too long");
  return trial_outcome(std::move(st));
}

}  // namespace dosefind
