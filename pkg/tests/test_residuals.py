"""
tests/test_residuals.py
Variational residuals on the oracle and on deliberately corrupted fields.
"""

import numpy as np
import pytest

from core.errors import ExcludedRegion
from medial.corrupted import OffsetMedialField, ScaledMedialField, UnsignedDistanceMedialField
from medial.oracle import OracleMedialField
from medial.residuals import (
    audit,
    inscription_residuals,
    maximality_residuals,
    orthogonality_residuals,
    residual_inscription,
    residual_maximality,
    residual_orthogonality,
    spoke_constancy,
    spoke_constancy_check,
)


def _oracle(scene):
    return OracleMedialField(scene.field)


def _points(scene, n: int = 10_000, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(scene.bounds.lo, scene.bounds.hi, size=(n, scene.dim))


# ---------------------------------------------------------------------------
# Single-point examples
# ---------------------------------------------------------------------------


def test_maximality_examples(disk):
    x = np.array([0.3, 0.0])
    assert residual_maximality(_oracle(disk), disk.field, x) == 0.0
    half = ScaledMedialField(UnsignedDistanceMedialField(disk.field), 0.5)
    assert residual_maximality(half, disk.field, x) == pytest.approx(0.35)


def test_inscription_examples(disk, slab):
    value, skipped = residual_inscription(_oracle(slab), slab.field, np.array([5.0, 0.2]))
    assert value == pytest.approx(0.0, abs=1e-9)
    assert not skipped

    inflated = ScaledMedialField(_oracle(disk), 2.0)
    value, _ = residual_inscription(inflated, disk.field, np.array([0.3, 0.0]))
    assert value == pytest.approx(2.0, abs=1e-9)


def test_inscription_skips_clamped_points(disk):
    value, skipped = residual_inscription(_oracle(disk), disk.field, np.array([1.5, 0.0]))
    assert skipped
    assert value == 0.0


def test_orthogonality_examples(disk, slab):
    assert residual_orthogonality(_oracle(slab), slab.field, np.array([5.0, 0.2])) == pytest.approx(0.0, abs=1e-6)
    assert residual_orthogonality(_oracle(disk), disk.field, np.array([0.3, 0.0])) == pytest.approx(0.0, abs=1e-6)


def test_orthogonality_exclusion_band(disk, box):
    with pytest.raises(ExcludedRegion):
        residual_orthogonality(_oracle(disk), disk.field, np.array([0.99, 0.0]))
    # next to the diagonal MF − |Φ| is below the band
    with pytest.raises(ExcludedRegion):
        residual_orthogonality(_oracle(box), box.field, np.array([0.5, 0.49]))


def test_spoke_constancy_examples(disk, box, slab):
    assert spoke_constancy_check(_oracle(disk), disk.field, np.array([0.3, 0.0])) < 1e-5
    assert spoke_constancy_check(_oracle(slab), slab.field, np.array([5.0, 0.2])) < 1e-5
    assert spoke_constancy_check(_oracle(box), box.field, np.array([0.5, 0.25])) < 1e-4 * box.diag


def test_spoke_constancy_rejects_zero_samples(disk):
    with pytest.raises(ValueError):
        spoke_constancy(_oracle(disk), disk.field, np.array([[0.3, 0.0]]), n_samples=0)


# ---------------------------------------------------------------------------
# Oracle passes on dense samples
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("name", ["disk", "slab", "box", "two_disk"])
def test_oracle_is_maximal_everywhere(request, name):
    scene = request.getfixturevalue(name)
    report = maximality_residuals(_oracle(scene), scene.field, _points(scene))
    assert report.max < 1e-5 * scene.diag


def test_oracle_box_inscription_and_orthogonality(box):
    mf = _oracle(box)
    pts = _points(box, seed=1)
    inscription = inscription_residuals(mf, box.field, pts)
    assert inscription.max < 1e-4 * box.diag
    assert inscription.skipped > 0  # exterior is clamped

    orthogonality = orthogonality_residuals(mf, box.field, pts, fd_step=1e-4 * box.diag)
    assert orthogonality.max < 1e-3
    assert 0 < orthogonality.skipped < len(pts)


def test_oracle_box_spoke_constancy(box):
    report = spoke_constancy(_oracle(box), box.field, _points(box, n=1000, seed=2), n_samples=8)
    assert report.max < 1e-4 * box.diag


# ---------------------------------------------------------------------------
# Corrupted fields trip at least one residual
# ---------------------------------------------------------------------------


def _fires(mf, scene, pts) -> dict:
    reports, _ = audit(mf, scene.field, pts, n_spoke_samples=8)
    return {r.name: r.max > 1e-3 * scene.diag for r in reports}


def test_shrunk_field_violates_maximality(box):
    fired = _fires(ScaledMedialField(_oracle(box), 0.5), box, _points(box, n=2000, seed=3))
    assert fired["maximality"]


def test_inflated_field_violates_inscription(box):
    fired = _fires(OffsetMedialField(_oracle(box), 0.2), box, _points(box, n=2000, seed=4))
    assert fired["inscription"]
    assert not fired["maximality"]


def test_unsigned_distance_field_varies_along_spokes(box):
    fired = _fires(UnsignedDistanceMedialField(box.field), box, _points(box, n=2000, seed=5))
    assert not fired["maximality"]
    assert not fired["inscription"]
    assert fired["spoke_constancy"]


def test_oracle_trips_nothing(box):
    fired = _fires(_oracle(box), box, _points(box, n=2000, seed=6))
    assert not any(fired.values())


def test_scaled_field_rejects_non_positive_scale(disk):
    with pytest.raises(ValueError):
        ScaledMedialField(_oracle(disk), 0.0)


# ---------------------------------------------------------------------------
# Audit table
# ---------------------------------------------------------------------------


def test_audit_table(disk):
    pts = _points(disk, n=500, seed=7)
    reports, table = audit(_oracle(disk), disk.field, pts)
    assert [r.name for r in reports] == ["maximality", "inscription", "orthogonality", "spoke_constancy"]
    assert list(table.columns) == ["residual", "evaluated", "skipped", "mean", "p50", "p99", "max", "clamped"]
    outside = int(np.count_nonzero(disk.field.phi(pts) > 0.0))
    assert int(table["clamped"].iloc[0]) == outside
    assert (table["evaluated"] + table["skipped"] == len(pts)).all()
