#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <vector>

#include "dosefind/rule_design.hpp"
#include "dosefind/trial.hpp"

using namespace dosefind;

TEST_CASE("standard design cells") {
  REQUIRE(std33_decision(3, 0) == Action::escalate());
  REQUIRE(std33_decision(3, 1) == Action::stay());
  REQUIRE(std33_decision(3, 2) == Action::deescalate_unacceptable());
  REQUIRE(std33_decision(3, 3) == Action::deescalate_unacceptable());
  REQUIRE(std33_decision(6, 0) == Action::escalate());
  REQUIRE(std33_decision(6, 1) == Action::escalate());
  REQUIRE(std33_decision(6, 2) == Action::deescalate_unacceptable());
  REQUIRE(std33_decision(6, 4) == Action::deescalate_unacceptable());

  REQUIRE_THROWS_AS(std33_decision(4, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(std33_decision(6, 5), std::invalid_argument);
  REQUIRE_THROWS_AS(std33_decision(3, 4), std::invalid_argument);
}

TEST_CASE("symmetric variants use the same DLT thresholds") {
  REQUIRE(symmetric_decision(2, 2, 1) == Action::stay());
  REQUIRE(symmetric_decision(2, 2, 2) == Action::deescalate_unacceptable());
  REQUIRE(symmetric_decision(2, 4, 1) == Action::escalate());
  REQUIRE(symmetric_decision(4, 8, 1) == Action::escalate());
  REQUIRE(symmetric_decision(4, 4, 0) == Action::escalate());
  REQUIRE(symmetric_decision(4, 8, 2) == Action::deescalate_unacceptable());
  REQUIRE(symmetric_decision(3, 3, 2) == Action::deescalate_unacceptable());

  REQUIRE_THROWS_AS(symmetric_decision(2, 3, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(symmetric_decision(4, 8, 6), std::invalid_argument);
}

TEST_CASE("run-in decisions") {
  const HybridDecision clear = hybrid123_decision(HybridStage::accelerate, 1, 0);
  REQUIRE(clear.action == Action::escalate());
  REQUIRE_FALSE(clear.next_cohort_size.has_value());

  const HybridDecision first_dlt = hybrid123_decision(HybridStage::accelerate, 1, 1);
  REQUIRE(first_dlt.action == Action::stay());
  REQUIRE(first_dlt.next_cohort_size == 2);

  REQUIRE(hybrid123_decision(HybridStage::standard, 6, 2).action ==
          Action::deescalate_unacceptable());
  REQUIRE(hybrid123_decision(HybridStage::standard, 3, 0).action == Action::escalate());

  REQUIRE_THROWS_AS(hybrid123_decision(HybridStage::accelerate, 3, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(hybrid123_decision(HybridStage::standard, 4, 0), std::invalid_argument);
}

TEST_CASE("standard MTD heuristic") {
  REQUIRE(select_mtd_standard(std::vector<DoseGroupRecord>{{6, 0}, {6, 1}, {3, 2}}, 3) == 2);
  REQUIRE_FALSE(select_mtd_standard(std::vector<DoseGroupRecord>{{3, 3}}, 3).has_value());
  REQUIRE(select_mtd_standard(std::vector<DoseGroupRecord>{{6, 1}, {6, 1}, {6, 2}}, 3) == 2);
  // generalized group size for the cohort-of-2 variant
  REQUIRE(select_mtd_standard(std::vector<DoseGroupRecord>{{4, 1}, {2, 2}}, 2) == 1);
}

TEST_CASE("monitoring tables") {
  SECTION("cohorts of 3 reproduce the standard table exactly") {
    const MonitoringTable table = monitoring_table(RuleDesignKind::three_plus_three);
    REQUIRE(table.group_sizes() == std::vector<int>{3, 6});
    const std::map<std::pair<int, int>, ActionKind> expected = {
        {{3, 0}, ActionKind::escalate},
        {{3, 1}, ActionKind::stay},
        {{3, 2}, ActionKind::deescalate_unacceptable},
        {{3, 3}, ActionKind::deescalate_unacceptable},
        {{6, 0}, ActionKind::escalate},
        {{6, 1}, ActionKind::escalate},
        {{6, 2}, ActionKind::deescalate_unacceptable},
        {{6, 3}, ActionKind::deescalate_unacceptable},
        {{6, 4}, ActionKind::deescalate_unacceptable},
    };
    REQUIRE(table.cells() == expected);
    REQUIRE_FALSE(table.cell(3, 4).has_value());
    REQUIRE_FALSE(table.cell(6, 5).has_value());
  }
  SECTION("cohorts of 2 cover their reachable cells") {
    const MonitoringTable table = monitoring_table(RuleDesignKind::two_plus_two);
    REQUIRE(table.group_sizes() == std::vector<int>{2, 4});
    for (int t = 0; t <= 2; ++t) {
      REQUIRE(table.cell(2, t) == symmetric_decision(2, 2, t).kind());
    }
    for (int t = 0; t <= 3; ++t) {
      REQUIRE(table.cell(4, t) == symmetric_decision(2, 4, t).kind());
    }
    REQUIRE_FALSE(table.cell(4, 4).has_value());
  }
  SECTION("run-in design exposes the single-patient column") {
    const MonitoringTable table = monitoring_table(RuleDesignKind::hybrid_1_2_3);
    REQUIRE(table.group_sizes() == std::vector<int>{1, 3, 6});
    REQUIRE(table.cell(1, 0) == ActionKind::escalate);
    REQUIRE(table.cell(1, 1) == ActionKind::stay);
    REQUIRE(table.cell(3, 2) == ActionKind::deescalate_unacceptable);
    REQUIRE(table.cell(6, 1) == ActionKind::escalate);
  }
  SECTION("columns never move toward escalation as DLTs rise") {
    for (RuleDesignKind kind :
         {RuleDesignKind::three_plus_three, RuleDesignKind::two_plus_two,
          RuleDesignKind::four_plus_four, RuleDesignKind::hybrid_1_2_3}) {
      REQUIRE(column_monotone(monitoring_table(kind)));
    }
  }
}

TEST_CASE("de-escalating onto a completed accepted dose stops with it as MTD") {
  const RuleDesign design(RuleDesignKind::three_plus_three, 3);
  TrialState st = new_trial(3);
  st = record_cohort(std::move(st), 1, 3, 1);
  st = apply_action(std::move(st), design.after_cohort(st));  // (3,1) -> stay
  REQUIRE(st.current_dose() == 1);
  st = record_cohort(std::move(st), 1, 3, 0);
  st = apply_action(std::move(st), design.after_cohort(st));  // (6,1) -> escalate
  REQUIRE(st.current_dose() == 2);
  st = record_cohort(std::move(st), 2, 3, 3);
  st = apply_action(std::move(st), design.after_cohort(st));  // DU, back onto dose 1
  REQUIRE(st.current_dose() == 1);
  const std::optional<Action> stop = design.before_cohort(st);
  REQUIRE(stop.has_value());
  st = apply_action(std::move(st), *stop);
  REQUIRE(st.status() == TrialStatus::stopped_with_mtd);
  REQUIRE(st.mtd() == 1);
  REQUIRE_FALSE(st.mtd_at_boundary());
}

TEST_CASE("run-in design forced paths") {
  const RuleDesign design(RuleDesignKind::hybrid_1_2_3, 2);
  SECTION("no toxicity: single patients up, then the top group fills") {
    Rng rng(1);
    const TrialOutcome out = run_trial(design, DoseToxicityCurve({0.0, 0.0}), rng);
    REQUIRE(out.mtd == 2);
    REQUIRE(out.mtd_at_boundary);
    REQUIRE(out.group(1) == DoseGroupRecord{1, 0});
    REQUIRE(out.group(2) == DoseGroupRecord{6, 0});
    REQUIRE(out.cohort_log == std::vector<CohortRecord>{
                                  {1, 1, 0}, {2, 1, 0}, {2, 2, 0}, {2, 3, 0}});
  }
  SECTION("immediate toxicity: bridge fails at the floor") {
    Rng rng(1);
    const TrialOutcome out = run_trial(design, DoseToxicityCurve({1.0, 1.0}), rng);
    REQUIRE(out.status == TrialStatus::stopped_no_mtd);
    REQUIRE(out.group(1) == DoseGroupRecord{3, 3});
    REQUIRE(out.cohort_log == std::vector<CohortRecord>{{1, 1, 1}, {1, 2, 2}});
  }
  SECTION("toxic top dose: fall back onto a run-in dose and complete it") {
    Rng rng(1);
    const TrialOutcome out = run_trial(design, DoseToxicityCurve({0.0, 1.0}), rng);
    REQUIRE(out.mtd == 1);
    REQUIRE(out.group(1) == DoseGroupRecord{6, 0});
    REQUIRE(out.group(2) == DoseGroupRecord{3, 3});
    REQUIRE(out.cohort_log == std::vector<CohortRecord>{
                                  {1, 1, 0}, {2, 1, 1}, {2, 2, 2}, {1, 2, 0}, {1, 3, 0}});
  }
}

TEST_CASE("driver stop always agrees with the MTD heuristic") {
  for (RuleDesignKind kind :
       {RuleDesignKind::three_plus_three, RuleDesignKind::two_plus_two,
        RuleDesignKind::four_plus_four, RuleDesignKind::hybrid_1_2_3}) {
    const RuleDesign design(kind, 4);
    const DoseToxicityCurve curve({0.08, 0.22, 0.45, 0.7});
    const int c = design.cohort_size();
    for (std::uint64_t rep = 0; rep < 400; ++rep) {
      Rng rng = replication_rng(31337, rep);
      const TrialOutcome out = run_trial(design, curve, rng);
      REQUIRE(out.mtd == select_mtd_standard(out.groups, c));
      // no dose group exceeds its cap
      for (const DoseGroupRecord& g : out.groups) {
        REQUIRE(g.patients <= design.group_cap());
      }
    }
  }
}

TEST_CASE("accepted doses bound the observed rates around the MTD") {
  const RuleDesign design(RuleDesignKind::three_plus_three, 4);
  const DoseToxicityCurve curve({0.1, 0.25, 0.4, 0.6});
  for (std::uint64_t rep = 0; rep < 500; ++rep) {
    Rng rng = replication_rng(92, rep);
    const TrialOutcome out = run_trial(design, curve, rng);
    if (!out.mtd) continue;
    const int d = *out.mtd;
    for (int dose = 1; dose <= 4; ++dose) {
      const DoseGroupRecord& g = out.group(dose);
      if (g.patients == 0) continue;
      const double rate = static_cast<double>(g.dlts) / g.patients;
      if (dose <= d && g.patients >= 6) {
        REQUIRE(rate <= 1.0 / 6.0 + 1e-12);
      }
      if (dose > d) {
        REQUIRE(rate >= 1.0 / 3.0 - 1e-12);
      }
    }
  }
}
