import numpy as np
import pytest

from oracles import oracle_average_precision, oracle_confusion_metrics
from scenetree.errors import ValidationError
from scenetree.metrics import (
    AP_OVERLAPS,
    GtInstance,
    PredInstance,
    ap_suite,
    average_precision,
    mask_iou,
    miou_acc,
)


def test_ap_overlap_grid():
    assert AP_OVERLAPS == (0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95)


def test_mask_iou_basics():
    assert mask_iou([1, 2, 3], [1, 2, 3]) == 1.0
    assert mask_iou([1, 2], [3, 4]) == 0.0
    assert mask_iou([], []) == 0.0
    assert mask_iou(range(1, 7), range(4, 10)) == pytest.approx(3 / 9)


def gt(indices, cat="c"):
    return GtInstance(cat, np.asarray(indices))


def pred(indices, conf, cat="c"):
    return PredInstance(cat, np.asarray(indices), conf)


def test_perfect_predictions_ap_one():
    gts = [gt([0, 1, 2]), gt([10, 11])]
    preds = [pred([0, 1, 2], 1.0), pred([10, 11], 1.0)]
    for threshold in AP_OVERLAPS:
        assert average_precision(preds, gts, threshold) == pytest.approx(1.0)


def test_no_predictions_zero():
    assert average_precision([], [gt([0, 1])], 0.5) == 0.0


def test_no_gt_no_preds_undefined():
    assert average_precision([], [], 0.5) is None


def test_preds_without_gt_zero():
    assert average_precision([pred([0], 0.9)], [], 0.5) == 0.0


def test_mixed_categories_rejected():
    with pytest.raises(ValidationError):
        average_precision([pred([0], 0.5, "a")], [gt([0], "b")], 0.5)


def random_case(rng, n_points=40, max_gt=4, max_pred=8):
    def random_set():
        size = int(rng.integers(1, 8))
        return np.sort(rng.choice(n_points, size=size, replace=False))

    gts = [gt(random_set()) for _ in range(int(rng.integers(1, max_gt + 1)))]
    preds = [
        pred(random_set(), float(rng.choice([0.9, 0.7, 0.7, 0.5, rng.random()])))
        for _ in range(int(rng.integers(0, max_pred + 1)))
    ]
    return preds, gts


def test_ap_matches_oracle_on_random_cases():
    rng = np.random.default_rng(11)
    for trial in range(60):
        preds, gts = random_case(rng)
        threshold = float(rng.choice([0.25, 0.5, 0.75]))
        got = average_precision(preds, gts, threshold)
        want, _ = oracle_average_precision(preds, gts, threshold)
        assert got == pytest.approx(want, abs=1e-9), f"trial {trial}"


def test_ap_monotone_under_fp_removal():
    rng = np.random.default_rng(13)
    for _ in range(30):
        preds, gts = random_case(rng)
        if not preds:
            continue
        threshold = 0.5
        base = average_precision(preds, gts, threshold)
        _, tp_flags = oracle_average_precision(preds, gts, threshold)
        for i, is_tp in enumerate(tp_flags):
            if is_tp:
                continue
            reduced = preds[:i] + preds[i + 1:]
            after = average_precision(reduced, gts, threshold)
            assert after >= base - 1e-12


def test_ap_suite_perfect():
    gts = [gt([0, 1], "a"), gt([5, 6], "b")]
    preds = [pred([0, 1], 1.0, "a"), pred([5, 6], 1.0, "b")]
    report = ap_suite(preds, gts)
    assert report.as_tuple() == (1.0, 1.0, 1.0)
    assert set(report.per_category) == {"a", "b"}


def test_ap_suite_iou_040_only_counts_at_25():
    gts = [gt(list(range(10)))]
    preds = [pred(list(range(4)), 1.0)]  # IoU = 4/10 = 0.4
    report = ap_suite(preds, gts)
    assert report.ap == 0.0
    assert report.ap50 == 0.0
    assert report.ap25 == 1.0


def test_ap_suite_ignores_categories_without_gt():
    gts = [gt([0, 1], "a")]
    preds = [pred([0, 1], 1.0, "a"), pred([5], 0.9, "phantom")]
    report = ap_suite(preds, gts)
    assert list(report.per_category) == ["a"]
    assert report.ap50 == 1.0


def test_ap_suite_multi_category_matches_oracle():
    rng = np.random.default_rng(17)
    for _ in range(10):
        all_preds, all_gts = [], []
        for cat in ("a", "b", "c"):
            preds, gts = random_case(rng)
            for p in preds:
                p.category = cat
            for g in gts:
                g.category = cat
            all_preds.extend(preds)
            all_gts.extend(gts)
        report = ap_suite(all_preds, all_gts)
        expect50 = np.mean([
            oracle_average_precision(
                [p for p in all_preds if p.category == cat],
                [g for g in all_gts if g.category == cat],
                0.5,
            )[0]
            for cat in ("a", "b", "c")
        ])
        assert report.ap50 == pytest.approx(expect50, abs=1e-9)


# -- semantic metrics ----------------------------------------------------------

def test_miou_acc_perfect():
    labels = np.array([0, 1, 2, 1, 0])
    assert miou_acc(labels, labels, 3) == (1.0, 1.0)


def test_miou_acc_disjoint():
    pred = np.array([0, 0, 0])
    gtl = np.array([1, 1, 1])
    assert miou_acc(pred, gtl, 2) == (0.0, 0.0)


def test_miou_acc_ignore_label():
    pred = np.array([0, 1, 0])
    gtl = np.array([0, 1, -1])
    assert miou_acc(pred, gtl, 2) == (1.0, 1.0)


def test_miou_acc_matches_oracle(rng):
    for _ in range(20):
        n = int(rng.integers(10, 200))
        classes = int(rng.integers(2, 6))
        pred = rng.integers(0, classes, size=n)
        gtl = rng.integers(-1, classes, size=n)
        got = miou_acc(pred, gtl, classes)
        want = oracle_confusion_metrics(pred, gtl, classes)
        assert got[0] == pytest.approx(want[0], abs=1e-12)
        assert got[1] == pytest.approx(want[1], abs=1e-12)


def test_miou_length_mismatch():
    with pytest.raises(ValidationError):
        miou_acc([0, 1], [0], 2)
