import hashlib
import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chaoscope.exceptions import InputError
from chaoscope.render import (
    ImageGrid,
    Viewport,
    pgm_bytes,
    plane_coordinates,
    rasterize,
    rasterize_xy,
    read_pgm,
    write_pgm,
)
from chaoscope.sets import PointCloud
from chaoscope.spaces import SpaceModel

E2, P2, CIRCLE = SpaceModel.euclidean(2), SpaceModel.projective2(), SpaceModel.circle()
UNIT = Viewport((0.0, 1.0), (0.0, 1.0), 8, 8)


def test_pgm_golden_bytes():
    white = ImageGrid(np.full((1, 1), 255, dtype=np.uint8))
    assert pgm_bytes(white) == b"P5\n1 1\n255\n\xff"
    two = ImageGrid(np.array([[0, 255]], dtype=np.uint8))
    assert pgm_bytes(two) == b"P5\n2 1\n255\n\x00\xff"
    assert pgm_bytes(two, ascii=True) == b"P2\n2 1\n255\n0 255\n"


def test_pgm_rows_top_to_bottom():
    img = ImageGrid(np.array([[1, 2, 3], [4, 5, 6]], dtype=np.uint8))
    assert pgm_bytes(img) == b"P5\n3 2\n255\n\x01\x02\x03\x04\x05\x06"


def test_write_and_read_pgm(tmp_path):
    img = ImageGrid(np.arange(12, dtype=np.uint8).reshape(3, 4))
    path = tmp_path / "a.pgm"
    write_pgm(img, path)
    assert read_pgm(path) == img
    with pytest.raises(OSError, match="missing"):
        write_pgm(img, tmp_path / "missing" / "b.pgm")


def test_single_point_one_dark_pixel():
    img = rasterize(PointCloud(E2, np.array([[0.5, 0.5]])), Viewport((0, 1), (0, 1), 9, 9))
    assert img.dark_pixels == 1
    assert img.pixels[4, 4] == 0


def test_log_scaled_intensity():
    xy = np.array([[0.1, 0.9]] * 3 + [[0.9, 0.1]])
    img = rasterize_xy(xy, Viewport((0, 1), (0, 1), 2, 2))
    # three hits is the maximum, one hit gives 255 * log 2 / log 4 = 127.5 -> 128
    assert img.pixels.tolist() == [[0, 255], [255, 255 - 128]]


def test_blank_image_warns():
    cloud = PointCloud.from_points(P2, np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]))
    with pytest.warns(UserWarning, match="blank"):
        img = rasterize(cloud, Viewport((-1, 1), (-1, 1), 4, 4))
    assert img.dark_pixels == 0
    with pytest.warns(UserWarning):
        rasterize(PointCloud(E2, np.array([[5.0, 5.0]])), UNIT)


def test_circle_points_drawn_on_unit_circle():
    cloud = PointCloud(CIRCLE, np.array([[0.0], [math.pi / 2]]))
    xy = plane_coordinates(cloud)
    assert np.allclose(xy, [[0.0, 1.0], [1.0, 0.0]])


def test_projective_chart_drawing():
    cloud = PointCloud.from_points(P2, np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [41, 41, 79]]))
    xy = plane_coordinates(cloud)
    assert len(xy) == 2


def test_cannot_draw_sequences():
    with pytest.raises(InputError):
        plane_coordinates(PointCloud(SpaceModel.sequence(3), np.zeros((1, 3))))


def test_viewport_validation():
    with pytest.raises(InputError):
        Viewport((1.0, 1.0), (0.0, 1.0))
    with pytest.raises(InputError):
        Viewport(width=0)
    Viewport(width=10, height=10, autoscale=True)


def test_autoscale_percentile_box(rng):
    xy = rng.uniform(size=(10_000, 2))
    vp = Viewport(width=10, height=10, autoscale=True).fitted(xy)
    lo, hi = np.percentile(xy[:, 0], [1, 99])
    assert vp.xrange == pytest.approx((lo - 0.05 * (hi - lo), hi + 0.05 * (hi - lo)))


@given(st.permutations(list(range(40))))
def test_autoscale_permutation_invariant(perm):
    base = np.column_stack((np.linspace(-3, 7, 40) ** 3, np.sin(np.arange(40.0))))
    vp = Viewport(width=16, height=16, autoscale=True)
    assert rasterize_xy(base[perm], vp) == rasterize_xy(base, vp)


def test_sierpinski_oracle_image(sierpinski_oracle):
    img = rasterize(sierpinski_oracle, Viewport(width=512, height=512, autoscale=True))
    frac = img.dark_pixels / (512 * 512)
    assert 0.03 <= frac <= 0.30
    # three-fold self-similarity: the bottom-left corner sub-triangle, scaled
    # up by two, covers the same pixels as the whole figure (up to edges)
    tri = Viewport((0.0, 1.0), (0.0, 1.0), 256, 256)
    whole = rasterize(sierpinski_oracle, tri).pixels < 255
    corner = sierpinski_oracle.points[(sierpinski_oracle.points[:, 0] < 0.5)
                                      & (sierpinski_oracle.points[:, 1] < math.sqrt(3) / 4)]
    scaled = rasterize_xy(2 * corner, tri).pixels < 255
    assert np.mean(whole == scaled) > 0.97


def test_render_deterministic(tmp_path, sierpinski_oracle):
    vp = Viewport(width=128, height=128, autoscale=True)
    a, b = tmp_path / "a.pgm", tmp_path / "b.pgm"
    write_pgm(rasterize(sierpinski_oracle, vp), a)
    write_pgm(rasterize(sierpinski_oracle, vp), b)
    assert a.read_bytes() == b.read_bytes()
    assert hashlib.sha256(a.read_bytes()).hexdigest() == hashlib.sha256(b.read_bytes()).hexdigest()
