"""
tests/test_grid.py
Baked SDF grids, the grid file format, and baked MF grids.
"""

import numpy as np
import pytest

from conftest import make_scene
from core.constants import SIDE_EXTERIOR, SIDE_INTERIOR
from fields.grid import GridField, bake_grid
from medial.grid import GridMedialField, bake_mf_grid
from medial.oracle import OracleConfig, OracleMedialField


def test_bake_disk_node_value(disk):
    grid = bake_grid(disk.field, disk.bounds, (5, 5))
    assert grid.cell_size == pytest.approx(1.0)
    assert grid.values.reshape(5, 5)[2, 2] == pytest.approx(-1.0)
    assert grid.memory_floats == 25


def test_interpolation_reproduces_nodes(box):
    grid = bake_grid(box.field, box.bounds, (9, 9))
    nodes = grid.nodes()
    np.testing.assert_allclose(grid.phi(nodes), box.field.phi(nodes), atol=1e-12)


def test_multilinear_reproduces_linear_field():
    scene = make_scene({"type": "halfspace", "point": [0.25, 0.0], "normal": [1.0, 0.0]}, dim=2,
                       lo=[-2.0, -2.0], hi=[2.0, 2.0])
    grid = bake_grid(scene.field, scene.bounds, (5, 5))
    centers = np.array([[-1.5, -1.5], [0.5, 0.5], [1.5, -0.5], [0.1, 0.3]])
    np.testing.assert_allclose(grid.phi(centers), scene.field.phi(centers), atol=1e-12)


def test_doubling_resolution_scales_memory(sphere):
    coarse = bake_grid(sphere.field, sphere.bounds, (5, 5, 5))
    fine = bake_grid(sphere.field, sphere.bounds, (10, 10, 10))
    assert fine.memory_floats == 2 ** 3 * coarse.memory_floats


def test_interpolation_error_shrinks_quadratically(disk):
    rng = np.random.default_rng(0)
    pts = rng.uniform(-1.8, 1.8, size=(2000, 2))
    pts = pts[np.linalg.norm(pts, axis=1) > 0.3]
    errs = []
    for res in (33, 65):
        grid = bake_grid(disk.field, disk.bounds, (res, res))
        errs.append(np.max(np.abs(grid.phi(pts) - disk.field.phi(pts))))
    assert errs[1] < 0.5 * errs[0]


def test_outside_lattice_is_conservative(disk):
    grid = bake_grid(disk.field, disk.bounds, (17, 17))
    far = np.array([[5.0, 0.0], [0.0, -6.0]])
    np.testing.assert_allclose(grid.phi(far), [4.0, 5.0], atol=1e-12)


def test_grid_gradient_points_outward(disk):
    grid = bake_grid(disk.field, disk.bounds, (65, 65))
    g = grid.gradient(np.array([[1.5, 0.0]]))[0]
    np.testing.assert_allclose(g / np.linalg.norm(g), [1.0, 0.0], atol=1e-3)


def test_grid_rejects_bad_resolution(disk):
    with pytest.raises(ValueError):
        bake_grid(disk.field, disk.bounds, (1, 5))
    with pytest.raises(ValueError):
        GridField(np.zeros(2), 1.0, (2, 2), np.zeros(3))


def test_grid_file_header_round_trip(tmp_path, box):
    grid = bake_grid(box.field, box.bounds, (7, 5))
    path = grid.save(tmp_path / "box.grid")
    header = path.read_bytes().split(b"\n", 1)[0]
    assert b'"format": "gridfield/1"' in header
    loaded = GridField.load(path)
    assert loaded.resolution == (7, 5)
    assert loaded.cell_size == grid.cell_size
    np.testing.assert_array_equal(loaded.origin, grid.origin)
    np.testing.assert_array_equal(loaded.values, grid.values)


def test_grid_file_rejects_foreign_data(tmp_path):
    path = tmp_path / "junk.grid"
    path.write_bytes(b'{"format": "other"}\n\x00\x00')
    with pytest.raises(ValueError):
        GridField.load(path)


def test_rebake_is_deterministic(box):
    a = bake_grid(box.field, box.bounds, (11, 11))
    b = bake_grid(box.field, box.bounds, (11, 11))
    assert a.values.tobytes() == b.values.tobytes()


# ---------------------------------------------------------------------------
# MF grids
# ---------------------------------------------------------------------------


def _grid_mf(scene, res):
    cfg = OracleConfig().resolve(scene.diag)
    interior = bake_mf_grid(scene.field, cfg, scene.bounds, (res, res), SIDE_INTERIOR)
    exterior = bake_mf_grid(scene.field, cfg, scene.bounds, (res, res), SIDE_EXTERIOR)
    return GridMedialField(interior, exterior, scene.field, r_max=cfg.r_max, tol=cfg.tol)


def test_mf_grid_sides_are_tagged(disk):
    mf = _grid_mf(disk, 17)
    assert mf.interior.side == SIDE_INTERIOR
    assert mf.exterior.side == SIDE_EXTERIOR
    assert mf.exterior.meta["r_max"] == pytest.approx(2.0 * disk.diag)


def test_mf_grid_disk_matches_oracle(disk):
    mf = _grid_mf(disk, 17)
    inside = np.array([[0.3, 0.0], [-0.5, 0.4], [0.0, -0.9]])
    np.testing.assert_allclose(mf.mf(inside), 1.0, atol=1e-9)
    outside = np.array([[1.8, 0.0], [0.0, 1.9]])
    assert np.all(mf.clamped(outside))
    assert not np.any(mf.clamped(inside))


def test_mf_grid_error_decreases_with_resolution(box):
    oracle = OracleMedialField(box.field)
    rng = np.random.default_rng(5)
    pts = rng.uniform(-0.95, 0.95, size=(1500, 2))
    truth = oracle.mf(pts)
    errs = [np.mean(np.abs(_grid_mf(box, res).mf(pts) - truth)) for res in (9, 33)]
    assert errs[1] < errs[0]


def test_mf_grid_side_validation(disk):
    mf = _grid_mf(disk, 9)
    with pytest.raises(ValueError):
        GridMedialField(mf.exterior, mf.interior, disk.field)
    with pytest.raises(ValueError):
        bake_mf_grid(disk.field, OracleConfig(), disk.bounds, (9, 9), "both")
