"""Pattern instantiation, grafting into models and fragment imports."""

import pytest

from fairmodel.catalogue import builtin
from fairmodel.dsl import parse
from fairmodel.model import (
    DuplicateLink,
    ElementKind,
    IncompatibleEndpoints,
    LinkKind,
)
from fairmodel.validator import validate
from fairmodel.weave import (
    MissingBinding,
    PrefixCollision,
    SelectionNotClosed,
    UnknownAnchor,
    UnknownFragment,
    UnknownPattern,
    UnknownPlaceholder,
    WeaveRequest,
    apply,
    archetype_root,
    default_attach_kind,
    import_fragment,
    instantiate,
)

BASE = '''
model "base" {
  dimension environmental
  dimension economic
  dimension social
  dimension personal
  dimension technical
  value top_value "Fair service for all" in social
  activity keep_running "Keep the service running" {
    operationalizes top_value
  }
  fragment later_phase {
    dimension social
    value later "Later concern" in social
    activity handle_later "Handle it later" {
      operationalizes later
    }
  }
}
'''


def base_model():
    return parse(BASE)


def non_dim_count(m):
    return sum(1 for e in m.elements.values()
               if e.kind is not ElementKind.DIMENSION)


class TestInstantiate:
    def test_placeholder_substitution_and_reslug(self):
        card = builtin().cards["distributive-justice"]
        frag = instantiate(card, {"Resource": "vaccines"})
        root = frag.element("fair_distribution_of_vaccines")
        assert root.name == "Fair distribution of vaccines"
        assert root.annotation("pattern") == "distributive-justice"
        # unrenamed elements keep their archetype ids
        assert "apply_proportional_remuneration" in frag.elements
        assert not frag.placeholders()

    def test_census_is_preserved(self):
        for card in builtin().cards.values():
            bindings = {p: "stock" for p in card.placeholders()}
            frag = instantiate(card, bindings)
            assert (non_dim_count(frag), len(frag.links)) == card.census()

    def test_provenance_on_every_non_dimension_element(self):
        card = builtin().cards["transparency"]
        frag = instantiate(card, {})
        for element in frag.elements.values():
            if element.kind is ElementKind.DIMENSION:
                assert element.annotation("pattern") is None
            else:
                assert element.annotation("pattern") == "transparency"

    def test_missing_binding(self):
        card = builtin().cards["distributive-justice"]
        with pytest.raises(MissingBinding) as exc:
            instantiate(card, {})
        assert exc.value.placeholders == ["Resource"]

    def test_unknown_placeholder(self):
        card = builtin().cards["co-evolution"]
        with pytest.raises(UnknownPlaceholder):
            instantiate(card, {"Resource": "x"})


def test_archetype_root_and_default_attach():
    cards = builtin().cards
    root = archetype_root(cards["substantial-freedom"].archetype)
    assert root.id == "personal_fulfilment_limited"
    assert default_attach_kind(root) is LinkKind.OBSTRUCTS
    root = archetype_root(cards["transparency"].archetype)
    assert root.id == "operations_transparent"
    assert default_attach_kind(root) is LinkKind.REFINES


class TestApply:
    def test_full_weave_arithmetic(self):
        model = base_model()
        card = builtin().cards["violation-anticipation"]
        woven = apply(model, WeaveRequest(
            "violation-anticipation", anchor="top_value", prefix="va",
            bindings={"Load": "queue length"}), builtin())
        elements, links = card.census()
        assert non_dim_count(woven) - non_dim_count(model) == elements
        # every internal link survives, plus the graft to the anchor
        assert len(woven.links) - len(model.links) == links + 1
        assert "va__violation_anticipated" in woven.elements
        graft = woven.links[-1]
        assert (graft.kind, graft.source, graft.target) == (
            LinkKind.REFINES, "va__violation_anticipated", "top_value")
        assert not [d for d in validate(woven) if d.severity == "error"]

    def test_dimensions_merge_unprefixed(self):
        model = base_model()
        woven = apply(model, WeaveRequest(
            "distributive-justice", anchor="top_value", prefix="dj",
            bindings={"Resource": "beds"}), builtin())
        dims = [e.id for e in woven.elements.values()
                if e.kind is ElementKind.DIMENSION]
        assert dims == ["environmental", "economic", "social", "personal",
                        "technical"]

    def test_obstacle_root_attaches_with_obstructs(self):
        woven = apply(base_model(), WeaveRequest(
            "substantial-freedom", anchor="top_value", prefix="sf"), builtin())
        graft = woven.links[-1]
        assert graft.kind is LinkKind.OBSTRUCTS
        assert graft.source == "sf__personal_fulfilment_limited"

    def test_selection_subsets_the_archetype(self):
        woven = apply(base_model(), WeaveRequest(
            "transparency", anchor="top_value", prefix="pub",
            selection=("operations_transparent", "evidence_published",
                       "publish_evidence")), builtin())
        added = [e for e in woven.elements.values()
                 if e.id.startswith("pub__")]
        assert len(added) == 3
        assert len(woven.links) - len(base_model().links) == 2 + 1

    def test_selection_must_be_closed(self):
        with pytest.raises(SelectionNotClosed):
            apply(base_model(), WeaveRequest(
                "transparency", anchor="top_value", prefix="pub",
                selection=("operations_transparent", "publish_evidence")),
                builtin())

    def test_selection_must_include_root(self):
        with pytest.raises(SelectionNotClosed):
            apply(base_model(), WeaveRequest(
                "transparency", anchor="top_value", prefix="pub",
                selection=("evidence_published", "publish_evidence")),
                builtin())

    def test_selection_names_must_exist(self):
        with pytest.raises(SelectionNotClosed):
            apply(base_model(), WeaveRequest(
                "transparency", anchor="top_value", prefix="pub",
                selection=("operations_transparent", "ghost")), builtin())

    def test_prefix_collision(self):
        model = apply(base_model(), WeaveRequest(
            "co-evolution", anchor="top_value", prefix="co"), builtin())
        with pytest.raises(PrefixCollision):
            apply(model, WeaveRequest(
                "transparency", anchor="top_value", prefix="co"), builtin())

    def test_unknown_anchor_and_pattern(self):
        with pytest.raises(UnknownAnchor):
            apply(base_model(), WeaveRequest(
                "co-evolution", anchor="ghost", prefix="co"), builtin())
        with pytest.raises(UnknownPattern):
            apply(base_model(), WeaveRequest(
                "no-such-pattern", anchor="top_value", prefix="x"), builtin())

    def test_incompatible_attach_kind(self):
        with pytest.raises(IncompatibleEndpoints):
            apply(base_model(), WeaveRequest(
                "co-evolution", anchor="keep_running", prefix="co"), builtin())

    def test_model_fragment_as_pattern_source(self):
        woven = apply(base_model(), WeaveRequest(
            "later_phase", anchor="top_value", prefix="lp"), builtin())
        assert "lp__later" in woven.elements
        assert woven.element("lp__later").annotation("pattern") == "later_phase"

    def test_purity(self):
        model = base_model()
        apply(model, WeaveRequest("co-evolution", anchor="top_value",
                                  prefix="co"), builtin())
        assert model.structurally_equal(base_model())


class TestImportFragment:
    def test_creates_reference_and_link(self):
        model = base_model()
        out = import_fragment(model, "top_value", "later_phase")
        ref = out.element("later_phase")
        assert ref.kind is ElementKind.FRAGMENT_REF
        link = out.links[-1]
        assert (link.kind, link.source, link.target) == (
            LinkKind.DETAILED_BY, "top_value", "later_phase")
        assert not [d for d in validate(out) if d.severity == "error"]

    def test_subtree_is_unchanged_by_import(self):
        model = base_model()
        before = model.subtree("top_value")
        out = import_fragment(model, "top_value", "later_phase")
        assert out.subtree("top_value") == before

    def test_reuses_existing_reference(self):
        model = import_fragment(base_model(), "top_value", "later_phase")
        out = import_fragment(model, "keep_running", "later_phase")
        assert non_dim_count(out) == non_dim_count(model)

    def test_duplicate_import_rejected(self):
        model = import_fragment(base_model(), "top_value", "later_phase")
        with pytest.raises(DuplicateLink):
            import_fragment(model, "top_value", "later_phase")

    def test_unknown_fragment_and_element(self):
        with pytest.raises(UnknownFragment):
            import_fragment(base_model(), "top_value", "ghost")
        from fairmodel.model import UnknownEndpoint
        with pytest.raises(UnknownEndpoint):
            import_fragment(base_model(), "ghost", "later_phase")
