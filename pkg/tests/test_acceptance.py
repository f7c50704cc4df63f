"""Acceptance suite: one test per release criterion, each printing PASS/FAIL
in the terminal summary (see conftest)."""

from __future__ import annotations

import itertools
import json
import random
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from conftest import stage1_candidates, stage2_cards
from golden_vars import GOLDEN_VARIABLES, MANDATORY_LINES
from scenario_driver import drive_walkthrough
from wordcraft import assoc, canvas, keywords
from wordcraft.api import build_app
from wordcraft.canvas import coverage_core
from wordcraft.config import AppConfig
from wordcraft.errors import (
    FormatError,
    RecallPathIncomplete,
    WordcraftError,
)
from wordcraft.models import BBox
from wordcraft.session import create_session, replay_events, tick_active

GOLDEN_DIR = Path(__file__).parent / "data" / "golden"


# -- 1. end-to-end walkthrough replay ------------------------------------------------


def test_walkthrough_replay_byte_identical(tmp_path):
    started = time.monotonic()

    def one_run(run_dir: Path) -> tuple[dict, bytes, list[str]]:
        client = TestClient(build_app(AppConfig(data_dir=str(run_dir), mock_provider=True)))
        session_id, card, hints = drive_walkthrough(client)
        card_bytes = (run_dir / "cards" / f"{card['card_id']}.json").read_bytes()
        return card, card_bytes, hints

    card, first_bytes, hints = one_run(tmp_path / "run1")
    card2, second_bytes, hints2 = one_run(tmp_path / "run2")

    assert [k["keyword"] for k in card["keywords"]] == ["喇叭", "晕死"]
    chains = {link["chain"] for link in card["links"]}
    assert "dizziness" in chains
    notes = [note for link in card["links"] for note in link["notes"]]
    assert notes == [
        "The speaker can guide the way in the labyrinth",
        "I felt faint in the labyrinth filled with the echoes of speakers",
    ]
    assert hints == [
        "The speaker may produce echoes in the labyrinth.",
        "Sound bouncing off endless walls can confuse even a steady walker.",
        "A voice meant to guide can overwhelm when it repeats from every side.",
    ]
    assert card["association"] == (
        "I felt faint in the labyrinth filled with the echoes of speakers"
    )
    assert card["style"] == "pixar_animation"
    assert card["image_ref"] == f"cards/{card['card_id']}.png"

    assert hints2 == hints
    assert first_bytes == second_bytes
    assert json.loads(first_bytes) == card

    elapsed = time.monotonic() - started
    assert elapsed < 5.0, f"walkthrough replay took {elapsed:.1f}s"


# -- 2. pipeline cardinality under fuzzed provider output ------------------------------


def _bad_stage1(rng: random.Random) -> object:
    kind = rng.randrange(3)
    if kind == 0:
        return "{definitely not json"
    if kind == 1:
        return stage1_candidates(rng.randrange(0, 10))
    broken = stage1_candidates(rng.randrange(0, 10))
    return broken + ["junk", 42, {"keyword": ""}]


def _bad_stage2(rng: random.Random, fresh) -> object:
    kind = rng.randrange(4)
    if kind == 0:
        return stage2_cards([fresh() for _ in range(rng.choice([0, 2, 3, 5, 6]))])
    if kind == 1:
        name = fresh()
        return stage2_cards([name, name, fresh(), fresh()])
    if kind == 2:
        cards = stage2_cards([fresh() for _ in range(4)])
        cards[rng.randrange(4)]["reasoning"] = ""
        return cards
    return "not json either ["


def test_pipeline_cardinality_under_fuzzing(demo_lexicon, make_gateway):
    started = time.monotonic()
    rng = random.Random(20260808)
    counter = itertools.count()

    def fresh() -> str:
        return f"词{next(counter)}"

    trials = 200
    for trial in range(trials):
        session = create_session(demo_lexicon, "labyrinth", "maze", session_id=f"s{trial}")
        segment = keywords.brush_segment(session, 0, 4)

        script: list[object] = []
        stage1_plan = rng.choices(["good", "bad"], weights=[3, 1], k=1)[0]
        if stage1_plan == "bad":
            script.append(_bad_stage1(rng))
            retry_good = rng.random() < 0.5
            script.append(stage1_candidates(rng.randrange(10, 26)) if retry_good else _bad_stage1(rng))
            stage1_ok = retry_good
        else:
            script.append(stage1_candidates(rng.randrange(10, 26)))
            stage1_ok = True

        stage2_ok = False
        if stage1_ok:
            stage2_plan = rng.choices(["good", "bad"], weights=[3, 1], k=1)[0]
            if stage2_plan == "bad":
                script.append(_bad_stage2(rng, fresh))
                retry_good = rng.random() < 0.5
                script.append(
                    stage2_cards([fresh() for _ in range(4)]) if retry_good else _bad_stage2(rng, fresh)
                )
                stage2_ok = retry_good
            else:
                script.append(stage2_cards([fresh() for _ in range(4)]))
                stage2_ok = True

        gateway, mock = make_gateway(script)
        expect_success = stage1_ok and stage2_ok
        if expect_success:
            batch = keywords.suggest_keywords(session, gateway, segment.segment_id)
            assert len(batch.cards) == 4
            for card in batch.cards:
                assert card.keyword and card.explanation and card.reasoning
            assert len({c.keyword for c in batch.cards}) == 4
        else:
            with pytest.raises(FormatError):
                keywords.suggest_keywords(session, gateway, segment.segment_id)
            # The failed call left no batch behind.
            assert session.batches == []

    elapsed = time.monotonic() - started
    assert elapsed < 10.0, f"cardinality fuzzing took {elapsed:.1f}s"


# -- 3. exhaustive coverage oracle ---------------------------------------------------------


def _powerset(items):
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def _coverage_oracle(node_ids, link_pairs, element_tag_sets, relation_index_pairs):
    """Independent truth table: apply the two activation rules literally."""
    active_nodes = set()
    for node in node_ids:
        for tags in element_tag_sets:
            if node in tags:
                active_nodes.add(node)
    active_links = set()
    for a, b in link_pairs:
        co_located = False
        for tags in element_tag_sets:
            if a in tags and b in tags:
                co_located = True
        related = False
        for i, j in relation_index_pairs:
            ti, tj = element_tag_sets[i], element_tag_sets[j]
            if (a in ti and b in tj) or (b in ti and a in tj):
                related = True
        if co_located or related:
            active_links.add((a, b))
    return active_nodes, active_links


def test_coverage_matches_oracle_exhaustively_and_is_monotone():
    started = time.monotonic()
    checked = 0
    for n in range(1, 5):
        nodes = list(range(n))
        all_pairs = list(itertools.combinations(nodes, 2))
        link_subsets = [list(s) for s in _powerset(all_pairs)]
        tag_choices = [
            frozenset(c) for r in range(1, n + 1) for c in itertools.combinations(nodes, r)
        ]
        for element_count in range(0, 4):
            for tags in itertools.product(tag_choices, repeat=element_count):
                rel_pairs = list(itertools.combinations(range(element_count), 2))
                for rel_subset in _powerset(rel_pairs):
                    rel_tag_pairs = [(tags[i], tags[j]) for i, j in rel_subset]
                    for links in link_subsets:
                        got = coverage_core(nodes, links, tags, rel_tag_pairs)
                        want = _coverage_oracle(nodes, links, tags, rel_subset)
                        assert got == want
                        checked += 1

                    # Monotonicity on every single-step deletion (equivalently,
                    # every single-step addition seen from the smaller state),
                    # evaluated over the complete link set.
                    base = coverage_core(nodes, all_pairs, tags, rel_tag_pairs)
                    for k in range(len(rel_subset)):
                        smaller = [p for idx, p in enumerate(rel_subset) if idx != k]
                        shrunk = coverage_core(
                            nodes, all_pairs, tags, [(tags[i], tags[j]) for i, j in smaller]
                        )
                        assert shrunk[0] <= base[0] and shrunk[1] <= base[1]
                    for i in range(element_count):
                        kept_tags = tuple(t for idx, t in enumerate(tags) if idx != i)
                        kept_rels = [
                            (a - (a > i), b - (b > i))
                            for a, b in rel_subset
                            if i not in (a, b)
                        ]
                        shrunk = coverage_core(
                            nodes,
                            all_pairs,
                            kept_tags,
                            [(kept_tags[a], kept_tags[b]) for a, b in kept_rels],
                        )
                        assert shrunk[0] <= base[0] and shrunk[1] <= base[1]

    assert checked == 1781112
    elapsed = time.monotonic() - started
    assert elapsed < 30.0, f"coverage enumeration took {elapsed:.1f}s"


# -- 4. gating exactness over random sessions ------------------------------------------------


def _random_session(rng: random.Random, demo_lexicon, make_gateway, index: int):
    session = create_session(demo_lexicon, "labyrinth", "maze", session_id=f"g{index}")
    for k in range(rng.randrange(0, 4)):
        start = rng.randrange(0, len(session.phonemes))
        try:
            segment = keywords.brush_segment(session, start, start + 1)
        except WordcraftError:
            continue
        keywords.select_keyword(session, segment.segment_id, keyword=f"词{index}-{k}")
    node_ids = [n.node_id for n in session.map.nodes]
    for a, b in itertools.combinations(node_ids, 2):
        if rng.random() < 0.4:
            assoc.upsert_link(session, a, b)
    elements = []
    for _ in range(rng.randrange(0, 4)):
        tags = [n for n in node_ids if rng.random() < 0.5]
        if not tags:
            continue
        x, y = rng.random() * 0.4, rng.random() * 0.4
        element = canvas.add_element(session, BBox(x, y, 0.2, 0.2), tags)
        elements.append(element)
    for first, second in itertools.combinations(elements, 2):
        if rng.random() < 0.3:
            canvas.add_relation(session, first.element_id, second.element_id)
    return session


def test_gating_exactly_mirrors_coverage(demo_lexicon, make_gateway):
    rng = random.Random(999)
    gateway, _ = make_gateway([])
    complete_count = 0
    for index in range(500):
        session = _random_session(rng, demo_lexicon, make_gateway, index)
        cov = canvas.compute_coverage(session)
        labels = {n.node_id: n.label for n in session.map.nodes}
        if cov.is_complete:
            request = canvas.build_image_request(session, "sketch", gateway)
            assert len(request.layout) == len(session.canvas.elements)
            complete_count += 1
        else:
            with pytest.raises(RecallPathIncomplete) as exc:
                canvas.build_image_request(session, "sketch", gateway)
            details = exc.value.details
            assert sorted(details["missing_nodes"]) == sorted(
                labels[n] for n in cov.missing_nodes
            )
            want_links = sorted(
                tuple(labels[e] for e in session.map.link(l).endpoints)
                for l in cov.missing_links
            )
            assert sorted(map(tuple, details["missing_links"])) == want_links
    assert complete_count > 0  # the sample exercises both branches


# -- 5. structural invariants under operation fuzzing ------------------------------------------


def _fuzz_step(rng, session, make_gateway, tag: str) -> None:
    op = rng.randrange(10)
    if op == 0:
        start = rng.randrange(0, len(session.phonemes) + 1)
        keywords.brush_segment(session, start, start + rng.randrange(0, 3))
    elif op == 1 and session.segments:
        segment = rng.choice(session.segments)
        keywords.select_keyword(session, segment.segment_id, keyword=f"词{tag}")
    elif op == 2:
        anchors = [a.anchor_id for a in session.tree.anchors]
        parent = None
        if session.tree.nodes and rng.random() < 0.5:
            parent = rng.choice(session.tree.nodes).node_id
        anchor_id = rng.choice(anchors)
        if parent is not None:
            node = session.tree.node(parent)
            anchor_id = node.anchor_id
        keywords.add_semantic_node(session, anchor_id, f"概念{tag}", parent_id=parent)
    elif op == 3 and len(session.map.nodes) >= 2:
        a, b = rng.sample([n.node_id for n in session.map.nodes], 2)
        assoc.upsert_link(session, a, b)
    elif op == 4 and session.map.links:
        link = rng.choice(session.map.links)
        if rng.random() < 0.5:
            assoc.set_chain(session, link.link_id, f"chain {tag}")
        else:
            assoc.add_note(session, link.link_id, f"note {tag}")
    elif op == 5 and session.map.links:
        assoc.delete_link(session, rng.choice(session.map.links).link_id)
    elif op == 6:
        tags = [n.node_id for n in session.map.nodes if rng.random() < 0.6]
        canvas.add_element(session, BBox(rng.random(), rng.random(), 0.3, 0.3), tags)
    elif op == 7 and session.canvas.elements:
        element = rng.choice(session.canvas.elements)
        if rng.random() < 0.5 and len(session.canvas.elements) >= 2:
            other = rng.choice(session.canvas.elements)
            canvas.add_relation(session, element.element_id, other.element_id)
        else:
            canvas.delete_element(session, element.element_id)
    elif op == 8:
        if rng.random() < 0.3:
            keywords.clear_segments(session)
        else:
            tick_active(session, rng.randrange(0, 2000))
    elif op == 9 and session.segments:
        segment = rng.choice(session.segments)
        gateway, _ = make_gateway(
            [stage1_candidates(12, prefix=f"s{tag}-"),
             stage2_cards([f"s{tag}-a", f"s{tag}-b", f"s{tag}-c", f"s{tag}-d"])]
        )
        keywords.suggest_keywords(session, gateway, segment.segment_id)


def _assert_invariants(session) -> None:
    spans = sorted((s.start, s.end) for s in session.segments)
    for (a1, b1), (a2, b2) in zip(spans, spans[1:]):
        assert b1 <= a2, "active segments overlap"
    for node in session.tree.nodes:
        assert 1 <= node.depth <= 2
    per_anchor: dict[str, set] = {}
    for node in session.tree.nodes:
        bucket = per_anchor.setdefault(node.anchor_id, set())
        assert node.concept not in bucket
        bucket.add(node.concept)
    pairs = [l.endpoints for l in session.map.links]
    assert len(pairs) == len(set(pairs)), "parallel links"
    node_ids = {n.node_id for n in session.map.nodes}
    for a, b in pairs:
        assert a != b and a in node_ids and b in node_ids
    meanings = [n for n in session.map.nodes if n.kind == "meaning"]
    assert len(meanings) == 1
    chosen = {c.keyword_id for c in session.keyword_choices}
    keyword_nodes = {n.source_ref for n in session.map.nodes if n.kind == "keyword"}
    assert chosen == keyword_nodes, "keyword/node bijection broken"
    replayed = replay_events(session.events)
    assert replayed.to_dict() == session.to_dict(), "replay mismatch"


def test_structural_invariants_under_fuzzing(demo_lexicon, make_gateway):
    rng = random.Random(4242)
    sequences = 1000
    for run in range(sequences):
        session = create_session(demo_lexicon, "labyrinth", "maze", session_id=f"f{run}")
        for step in range(rng.randrange(3, 12)):
            try:
                _fuzz_step(rng, session, make_gateway, f"{run}-{step}")
            except WordcraftError:
                pass
        _assert_invariants(session)


# -- 6. prompt fidelity --------------------------------------------------------------------


def test_prompt_fidelity_golden_files(zh_templates):
    for template_id, variables in GOLDEN_VARIABLES.items():
        rendered = zh_templates.get(template_id).render(variables)
        golden = (GOLDEN_DIR / f"{template_id}.txt").read_text(encoding="utf-8")
        assert rendered == golden, f"golden drift: {template_id}"
        assert MANDATORY_LINES[template_id] in rendered


# -- 7. default temperatures ------------------------------------------------------------------


def test_two_stage_temperature_defaults(demo_lexicon, make_gateway):
    gateway, mock = make_gateway(
        [stage1_candidates(20), stage2_cards(["温一", "温二", "温三", "温四"])]
    )
    session = create_session(demo_lexicon, "labyrinth", "maze", session_id="t1")
    segment = keywords.brush_segment(session, 0, 4)
    keywords.suggest_keywords(session, gateway, segment.segment_id)
    recorded = {call.tag: call.params.temperature for call in mock.recorded}
    assert recorded == {"keyword_gen": 1.0, "keyword_review": 0.3}
