"""
tests/test_render.py
Rendering, 2D field images, the PPM codec and the iteration benchmark.
"""

import numpy as np
import pytest

from core.constants import BACKGROUND_RGB
from core.errors import Dim2NotRenderable
from fields.scene import load_scene
from medial.oracle import OracleMedialField
from tracer.bench import bench_poses, bench_table
from tracer.camera import Camera
from tracer.image import Image, to_uint8
from tracer.marching import TraceConfig
from tracer.render import lattice_points, palette_colors, render, visualize_field_2d

SMALL_CAM = Camera(position=[0.0, 0.8, 3.5], width=24, height=18)


def test_render_is_deterministic(sphere):
    a = render(sphere.field, SMALL_CAM, TraceConfig())
    b = render(sphere.field, SMALL_CAM, TraceConfig())
    assert a.image.to_ppm() == b.image.to_ppm()
    assert (a.image.width, a.image.height) == (24, 18)
    assert a.trace.hit.any() and not a.trace.hit.all()


def test_medial_backend_renders_the_same_silhouette(sphere):
    mf = OracleMedialField(sphere.field)
    naive = render(sphere.field, SMALL_CAM, TraceConfig())
    medial = render(sphere.field, SMALL_CAM, TraceConfig(backend="medial"), mf=mf)
    assert np.mean(naive.trace.hit == medial.trace.hit) > 0.95
    assert medial.stats.mean < naive.stats.mean


def test_2d_scene_is_not_renderable(disk):
    with pytest.raises(Dim2NotRenderable):
        render(disk.field, SMALL_CAM, TraceConfig())


def test_shading_arguments(sphere):
    with pytest.raises(ValueError):
        render(sphere.field, SMALL_CAM, TraceConfig(), shading="lambertian+mfao")
    with pytest.raises(ValueError):
        render(sphere.field, SMALL_CAM, TraceConfig(), shading="toon")


def test_mfao_shading_only_darkens(sphere_plane):
    mf = OracleMedialField(sphere_plane.field)
    cam = Camera(position=[2.5, 1.5, 2.5], look_at=[0.0, 0.5, 0.0], width=16, height=16)
    plain = render(sphere_plane.field, cam, TraceConfig(), shading="lambertian")
    occluded = render(sphere_plane.field, cam, TraceConfig(), shading="lambertian+mfao", mf=mf)
    assert np.all(occluded.image.pixels <= plain.image.pixels)


def test_camera_facing_away_renders_background(sphere):
    cam = Camera(position=[0.0, 0.0, 5.0], look_at=[0.0, 0.0, 10.0], width=8, height=8)
    result = render(sphere.field, cam, TraceConfig())
    assert not result.trace.hit.any()
    assert np.all(result.image.pixels == np.array(BACKGROUND_RGB, dtype=np.uint8))


def test_iteration_shading_colors_every_ray(sphere):
    result = render(sphere.field, SMALL_CAM, TraceConfig(), shading="iterations")
    miss = ~result.trace.hit.reshape(18, 24)
    assert np.any(result.image.pixels[miss] != np.array(BACKGROUND_RGB, dtype=np.uint8))


# ---------------------------------------------------------------------------
# 2D field images
# ---------------------------------------------------------------------------


def test_constant_field_gives_constant_image(disk):
    image = visualize_field_2d(lambda p: np.zeros(p.shape[0]), disk.bounds, (9, 7))
    assert image.pixels.shape == (7, 9, 3)
    assert np.all(image.pixels == 255)


def test_disk_image_is_mirror_symmetric(disk):
    image = visualize_field_2d(disk.field.phi, disk.bounds, (33, 33))
    px = image.pixels.astype(int)
    assert np.max(np.abs(px - px[:, ::-1])) <= 1
    assert np.max(np.abs(px - px[::-1, :])) <= 1


def test_top_left_pixel_samples_the_top_left_corner(disk):
    image = visualize_field_2d(disk.field.phi, disk.bounds, (16, 12))
    corner = np.array([[-2.0, 2.0]])
    expected = to_uint8(palette_colors(disk.field.phi(corner), 0.5 * disk.diag, "sign_split"))[0]
    np.testing.assert_array_equal(image.pixels[0, 0], expected)


def test_lattice_orientation(disk):
    pts = lattice_points(disk.bounds, (3, 2))
    np.testing.assert_allclose(pts, [[-2, 2], [0, 2], [2, 2], [-2, -2], [0, -2], [2, -2]])


def test_sign_split_palette():
    rgb = palette_colors(np.array([-10.0, 0.0, 10.0]), 1.0, "sign_split")
    assert rgb[0, 2] > rgb[0, 0]      # inside is blue
    assert rgb[2, 0] > rgb[2, 2]      # outside is orange
    np.testing.assert_allclose(rgb[1], [1.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        palette_colors(np.zeros(1), 1.0, "rainbow")


def test_visualization_rejects_bad_input(disk, sphere):
    with pytest.raises(ValueError):
        visualize_field_2d(disk.field.phi, disk.bounds, (1, 8))
    with pytest.raises(ValueError):
        visualize_field_2d(sphere.field.phi, sphere.bounds, (8, 8))


# ---------------------------------------------------------------------------
# PPM
# ---------------------------------------------------------------------------


def test_ppm_header_and_load(tmp_path):
    pixels = np.arange(2 * 3 * 3, dtype=np.uint8).reshape(2, 3, 3)
    image = Image(pixels)
    data = image.to_ppm()
    assert data.startswith(b"P6\n3 2\n255\n")
    assert len(data) == len(b"P6\n3 2\n255\n") + pixels.size
    loaded = Image.load(image.save(tmp_path / "sub" / "x.ppm"))
    np.testing.assert_array_equal(loaded.pixels, pixels)


def test_image_rejects_wrong_dtype():
    with pytest.raises(ValueError):
        Image(np.zeros((2, 2, 3), dtype=np.float64))


def test_load_rejects_ascii_ppm(tmp_path):
    path = tmp_path / "ascii.ppm"
    path.write_bytes(b"P3\n1 1\n255\n0 0 0\n")
    with pytest.raises(ValueError):
        Image.load(path)


# ---------------------------------------------------------------------------
# Benchmark
# ---------------------------------------------------------------------------


def test_bench_medial_needs_fewer_iterations(sphere):
    mf = OracleMedialField(sphere.field)
    stats = bench_poses(sphere.field, mf, n_poses=2, seed=0, width=16, height=16)
    assert set(stats) == {"naive", "medial"}
    assert stats["medial"].mean < stats["naive"].mean
    assert stats["naive"].rays == 2 * 16 * 16


def test_bench_is_seeded(sphere):
    mf = OracleMedialField(sphere.field)
    a = bench_table("sphere", bench_poses(sphere.field, mf, n_poses=2, seed=3, width=8, height=8))
    b = bench_table("sphere", bench_poses(sphere.field, mf, n_poses=2, seed=3, width=8, height=8))
    assert list(a.columns) == ["scene", "backend", "mean", "min", "max", "tail"]
    assert list(a["backend"]) == ["naive", "medial"]
    assert a.to_csv(index=False) == b.to_csv(index=False)
    assert (a["min"] <= a["mean"]).all() and (a["mean"] <= a["max"]).all()


@pytest.mark.slow
@pytest.mark.parametrize("name", ["sphere", "box3", "capsule", "torus", "sphere_plane"])
def test_medial_tracing_cuts_iterations_on_every_3d_scene(name):
    scene = load_scene(name)
    mf = OracleMedialField(scene.field)
    stats = bench_poses(scene.field, mf, n_poses=4, seed=0, cfg=TraceConfig(**scene.defaults.trace),
                        width=32, height=32)
    table = bench_table(name, stats).set_index("backend")
    assert table.loc["medial", "mean"] <= 0.8 * table.loc["naive", "mean"]
    assert table.loc["medial", "tail"] <= table.loc["naive", "tail"]
