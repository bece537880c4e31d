"""Obstacle, attribution, coverage, balance and suggestion reports."""

import random
from fractions import Fraction
from pathlib import Path

from fairmodel.analysis import (
    SUGGESTION_TRIGGERS,
    attribution_report,
    dimension_balance,
    obstacle_report,
    stage_coverage,
    suggest,
)
from fairmodel.catalogue import STAGES, builtin
from fairmodel.dsl import parse
from fairmodel.model import ElementKind

from helpers import random_model

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def corpus_model(name):
    path = CORPUS / f"{name}.fair"
    return parse(path.read_text(), str(path))


class TestObstacleReport:
    def test_confinement_fixture(self):
        report = obstacle_report(corpus_model("covid_confinement"))
        by_id = {s.obstacle: s for s in report}
        assert [s.obstacle for s in report] == sorted(by_id)
        assert by_id["herd_immunity_at_risk"].state == "resolved"
        assert by_id["herd_immunity_at_risk"].resolvers == ("apply_measures",)
        assert by_id["vaccination_long_term"].state == "accepted"
        assert by_id["vaccination_long_term"].strategy == "accept"
        assert by_id["hospital_overload"].state == "open"
        assert by_id["hospital_overload"].targets == ("equitable_access",)

    def test_resolution_wins_over_acceptance(self):
        model = parse('model "m" { dimension social\n'
                      ' value v "v" in social\n'
                      ' activity a "a" { operationalizes v }\n'
                      ' obstacle o "o" accepted reduce { obstructs v }\n'
                      ' activity r "r" { resolves o } }')
        (status,) = obstacle_report(model)
        assert status.state == "resolved"
        assert status.strategy == "reduce"

    def test_random_states_rederived(self):
        rng = random.Random(11)
        for _ in range(50):
            model = random_model(rng)
            for status in obstacle_report(model):
                element = model.element(status.obstacle)
                resolved = any(l.target == status.obstacle
                               for l in model.links if l.kind.value == "resolves")
                if resolved:
                    assert status.state == "resolved"
                elif element.annotation("accepted") is not None:
                    assert status.state == "accepted"
                else:
                    assert status.state == "open"


class TestAttribution:
    def test_quota_fixture(self):
        report = attribution_report(corpus_model("one_quota"))
        assert len(report.system) == 6
        assert not report.environment
        assert len(report.unspecified) == 7
        assert report.system_share == Fraction(1)

    def test_share_is_exact(self):
        model = parse('model "m" { goal a "a" @is\n goal b "b" @env\n'
                      ' goal c "c" @env\n goal d "d" }')
        report = attribution_report(model)
        assert report.system_share == Fraction(1, 3)
        assert report.unspecified == ("d",)

    def test_share_none_when_unattributed(self):
        assert attribution_report(parse('model "m" { goal g "g" }')).system_share is None

    def test_random_partition(self):
        rng = random.Random(12)
        for _ in range(50):
            model = random_model(rng)
            report = attribution_report(model)
            non_dim = [e.id for e in model.elements.values()
                       if e.kind is not ElementKind.DIMENSION]
            assert sorted(report.system + report.environment
                          + report.unspecified) == sorted(non_dim)
            if report.system or report.environment:
                assert report.system_share == Fraction(
                    len(report.system), len(report.system) + len(report.environment))


class TestStageCoverage:
    def test_quota_fixture_covers_three_stages(self):
        report = stage_coverage(corpus_model("one_quota"), builtin())
        # violation-anticipation: implementation+evolution; transparency:
        # adoption+implementation
        assert report.stages_covered == ("adoption", "implementation", "evolution")
        assert report.fraction == Fraction(3, 5)
        assert report.per_stage["implementation"] == ("transparency",
                                                      "violation-anticipation")
        assert report.per_stage["design"] == ()

    def test_unwoven_model_covers_nothing(self):
        report = stage_coverage(corpus_model("covid_vaccination"), builtin())
        assert report.fraction == Fraction(0)
        assert report.stages_covered == ()

    def test_all_patterns_cover_everything(self):
        from fairmodel.weave import WeaveRequest, apply
        model = parse('model "m" { dimension social\n'
                      ' value top "Fair for all" in social\n'
                      ' activity run "Run it" { operationalizes top } }')
        for i, (name, card) in enumerate(builtin().cards.items()):
            bindings = {p: "stock" for p in card.placeholders()}
            model = apply(model, WeaveRequest(name, anchor="top",
                                              prefix=f"p{i}",
                                              bindings=bindings), builtin())
        report = stage_coverage(model, builtin())
        assert report.stages_covered == STAGES
        assert report.fraction == Fraction(1)

    def test_unknown_provenance_ignored(self):
        model = parse('model "m" { goal g "g" pattern "homegrown" }')
        assert stage_coverage(model, builtin()).fraction == Fraction(0)


class TestDimensionBalance:
    def test_confinement_fixture_is_social_dominated(self):
        balance = dimension_balance(corpus_model("covid_confinement"))
        assert balance == {"social": 5, "economic": 1}
        assert max(balance, key=balance.get) == "social"

    def test_declared_unused_dimension_reports_zero(self):
        model = parse('model "m" { dimension social\n dimension technical\n'
                      ' value v "v" in social\n'
                      ' activity a "a" { operationalizes v } }')
        assert dimension_balance(model) == {"social": 1, "technical": 0}

    def test_random_counts_rederived(self):
        rng = random.Random(13)
        for _ in range(50):
            model = random_model(rng)
            balance = dimension_balance(model)
            for dim, count in balance.items():
                assert count == sum(
                    1 for e in model.elements.values()
                    if e.kind is ElementKind.VALUE and e.dimension == dim)


class TestSuggest:
    def test_overview_fixture(self):
        pairs = {(s.element, s.pattern)
                 for s in suggest(corpus_model("one_overview"), builtin())}
        assert ("quota_exhausted", "violation-anticipation") in pairs
        assert ("free_care", "distributive-justice") in pairs
        assert ("work_organised", "transparency") in pairs

    def test_vaccination_fixture(self):
        pairs = {(s.element, s.pattern)
                 for s in suggest(corpus_model("covid_vaccination"), builtin())}
        assert ("supply_secured", "distributive-justice") in pairs
        assert ("people_adhere", "rule-acceptance") in pairs

    def test_open_obstacle_triggers_anticipation(self):
        model = parse('model "m" { goal g "g"\n'
                      ' obstacle bad_weather "Bad weather" { obstructs g } }')
        pairs = [(s.element, s.pattern, s.reason) for s in suggest(model, builtin())]
        assert pairs == [("bad_weather", "violation-anticipation", "open obstacle")]

    def test_keyword_matches_word_prefixes_case_insensitively(self):
        model = parse('model "m" { goal g "Global Acceptance of the rules" }')
        (s,) = suggest(model, builtin())
        assert (s.element, s.pattern) == ("g", "rule-acceptance")
        # no match inside words
        model = parse('model "m" { goal g "unacceptable" }')
        assert suggest(model, builtin()) == []

    def test_output_is_sorted_and_deduped(self):
        model = parse('model "m" { goal a "quota load"\n goal b "quota" }')
        out = suggest(model, builtin())
        assert [(s.element, s.pattern) for s in out] == [
            ("a", "violation-anticipation"), ("b", "violation-anticipation")]

    def test_trigger_table_names_real_patterns(self):
        assert set(SUGGESTION_TRIGGERS) == set(builtin().cards)
