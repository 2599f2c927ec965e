import numpy as np
import pytest

from diarkit.errors import ValidationError
from diarkit.metrics import (
    DerBreakdown,
    ScoringParams,
    combine_breakdowns,
    der,
    optimal_mapping,
    overlap_regions,
    scoring_regions,
)
from diarkit.timeline import Annotation, Timeline
from tests.helpers import (
    brute_force_assignment_total,
    der_frame_oracle,
    perturb_annotation,
    random_annotation,
)


class TestScoringRegions:
    def test_zero_collar_identity(self):
        uem = Timeline([(0, 10)])
        ref = Annotation([((2, 5), "A")])
        assert scoring_regions(ref, uem, ScoringParams(collar=0)) == uem

    def test_hand_case(self):
        out = scoring_regions(
            Annotation([((2, 5), "A")]), Timeline([(0, 10)]), ScoringParams(collar=0.25)
        )
        assert out == Timeline([(0, 1.75), (2.25, 4.75), (5.25, 10)])

    def test_empty_ref_identity(self):
        uem = Timeline([(0, 10)])
        assert scoring_regions(Annotation(), uem, ScoringParams(collar=0.25)) == uem


class TestOptimalMapping:
    def test_renaming_bijection(self):
        ref = Annotation([((0, 5), "A"), ((5, 9), "B")])
        hyp = ref.rename({"A": "X", "B": "Y"})
        scope = Timeline([(0, 10)])
        assert optimal_mapping(ref, hyp, scope) == {"X": "A", "Y": "B"}

    def test_majority_wins_loser_unmapped(self):
        ref = Annotation([((0, 10), "A")])
        hyp = Annotation([((0, 6), "X"), ((6, 10), "Y")])
        mapping = optimal_mapping(ref, hyp, Timeline([(0, 10)]))
        assert mapping == {"X": "A"}

    def test_matches_permutation_oracle(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            n_ref = int(rng.integers(1, 4))
            n_hyp = int(rng.integers(1, 4))
            entries_r, entries_h = [], []
            t = 0.0
            durations = np.round(rng.uniform(0.5, 3.0, size=(n_ref, n_hyp)), 2)
            # lay ref/hyp pairs side by side so every pair has its own overlap
            for i in range(n_ref):
                for j in range(n_hyp):
                    d = float(durations[i, j])
                    entries_r.append(((t, t + d), f"r{i}"))
                    entries_h.append(((t, t + d), f"h{j}"))
                    t += d + 0.5
            ref = Annotation(entries_r)
            hyp = Annotation(entries_h)
            scope = Timeline([(0, t + 1)])
            mapping = optimal_mapping(ref, hyp, scope)
            total = sum(
                ref.timeline(r).intersect(hyp.timeline(h)).duration()
                for h, r in mapping.items()
            )
            assert total == pytest.approx(
                brute_force_assignment_total(durations), abs=1e-6
            )

    def test_empty_sides(self):
        assert optimal_mapping(Annotation(), Annotation(), Timeline([(0, 1)])) == {}


class TestDerBreakdown:
    def test_identity_is_zero(self):
        b = DerBreakdown(0, 0, 0, 10)
        assert b.der == 0.0

    def test_zero_scored_zero_errors(self):
        assert DerBreakdown(0, 0, 0, 0).der == 0.0

    def test_zero_scored_with_errors_raises(self):
        with pytest.raises(ValidationError):
            DerBreakdown(1.0, 0, 0, 0).der

    def test_combine_sums_components(self):
        total = combine_breakdowns(
            [DerBreakdown(1, 0, 1, 10), DerBreakdown(0, 2, 0, 30)]
        )
        assert total.scored == 40
        assert total.der == pytest.approx(4 / 40)


class TestDer:
    def test_perfect_hypothesis(self):
        ref = Annotation([((0, 4), "A"), ((4, 9), "B")])
        for collar in (0.0, 0.25):
            b = der(ref, ref, Timeline([(0, 10)]), ScoringParams(collar=collar))
            assert b.der == 0.0

    def test_missed_tail(self):
        ref = Annotation([((0, 10), "A")])
        hyp = Annotation([((0, 8), "A")])
        b = der(ref, hyp, Timeline([(0, 10)]), ScoringParams(collar=0))
        assert b.missed == pytest.approx(2.0)
        assert b.der == pytest.approx(0.2)

    def test_rename_invariance(self):
        ref = Annotation([((0, 10), "A")])
        hyp = Annotation([((0, 10), "B")])
        b = der(ref, hyp, Timeline([(0, 10)]), ScoringParams(collar=0))
        assert b.der == 0.0

    def test_false_alarm(self):
        ref = Annotation([((0, 5), "A")])
        hyp = Annotation([((0, 7), "A")])
        b = der(ref, hyp, Timeline([(0, 10)]), ScoringParams(collar=0))
        assert b.false_alarm == pytest.approx(2.0)
        assert b.scored == pytest.approx(5.0)

    def test_confusion(self):
        ref = Annotation([((0, 4), "A"), ((4, 8), "B")])
        hyp = Annotation([((0, 6), "X"), ((6, 8), "Y")])
        b = der(ref, hyp, Timeline([(0, 8)]), ScoringParams(collar=0))
        # X->A (4s), Y->B (2s); only [4,6] (X over B) is confusion
        assert b.confusion == pytest.approx(2.0)
        assert b.der == pytest.approx(2 / 8)

    def test_overlap_scored_with_multiplicity(self):
        ref = Annotation([((0, 4), "A"), ((2, 4), "B")])
        hyp = Annotation([((0, 4), "A")])
        b = der(ref, hyp, Timeline([(0, 4)]), ScoringParams(collar=0))
        assert b.scored == pytest.approx(6.0)
        assert b.missed == pytest.approx(2.0)

    def test_score_overlap_false_excludes_regions(self):
        ref = Annotation([((0, 4), "A"), ((2, 4), "B")])
        hyp = Annotation([((0, 4), "A")])
        b = der(ref, hyp, Timeline([(0, 4)]),
                ScoringParams(collar=0, score_overlap=False))
        assert b.scored == pytest.approx(2.0)
        assert b.missed == 0.0
        assert b.der == 0.0

    def test_deleting_hyp_speaker_never_decreases_missed(self):
        rng = np.random.default_rng(31)
        for _ in range(100):
            ref = random_annotation(rng, max_t=30)
            hyp = perturb_annotation(rng, ref, max_t=30)
            if not hyp.speakers:
                continue
            uem = Timeline([(0, 30)])
            params = ScoringParams(collar=0)
            base = der(ref, hyp, uem, params).missed
            victim = hyp.speakers[int(rng.integers(len(hyp.speakers)))]
            reduced = Annotation(
                [(iv, s) for iv, s in hyp.itertracks() if s != victim]
            )
            assert der(ref, reduced, uem, params).missed >= base - 1e-9

    def test_frame_oracle_agreement(self):
        rng = np.random.default_rng(77)
        for trial in range(60):
            ref = random_annotation(rng)
            hyp = perturb_annotation(rng, ref)
            uem = Timeline([(0, 60)])
            for collar in (0.0, 0.25):
                for score_overlap in (True, False):
                    params = ScoringParams(collar=collar, score_overlap=score_overlap)
                    b = der(ref, hyp, uem, params)
                    om, of, oc, osc = der_frame_oracle(
                        ref, hyp, uem, collar, score_overlap
                    )
                    assert b.missed == pytest.approx(om, abs=1e-6)
                    assert b.false_alarm == pytest.approx(of, abs=1e-6)
                    assert b.confusion == pytest.approx(oc, abs=1e-6)
                    assert b.scored == pytest.approx(osc, abs=1e-6)


class TestOverlapRegions:
    def test_two_party(self):
        ann = Annotation([((0, 4), "A"), ((2, 6), "B")])
        assert overlap_regions(ann) == Timeline([(2, 4)])

    def test_no_overlap(self):
        ann = Annotation([((0, 2), "A"), ((3, 4), "B")])
        assert overlap_regions(ann) == Timeline()
