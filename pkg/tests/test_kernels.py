"""Backend parity and correctness of the min-norm-point distance kernel."""

import math

import numpy as np
import pytest
from scipy.optimize import minimize

from valgeo._kernels import BACKEND, hull_distances, pywolfe


def slsqp_distance(x, vertices):
    """Independent QP oracle: min |lam @ V - x| over the simplex."""
    m = vertices.shape[0]

    def objective(lam):
        r = lam @ vertices - x
        return float(r @ r)

    res = minimize(
        objective,
        np.ones(m) / m,
        bounds=[(0.0, 1.0)] * m,
        constraints=({"type": "eq", "fun": lambda lam: lam.sum() - 1.0},),
        method="SLSQP",
        options={"maxiter": 500, "ftol": 1e-14},
    )
    return math.sqrt(max(res.fun, 0.0))


CUBE = np.array(
    [[x, y, z] for x in (-0.5, 0.5) for y in (-0.5, 0.5) for z in (-0.5, 0.5)]
)


class TestKnownDistances:
    def test_axis_face(self):
        d = hull_distances(np.array([[1.5, 0.0, 0.0]]), CUBE)
        assert d[0] == pytest.approx(1.0, abs=1e-9)

    def test_interior_zero(self):
        d = hull_distances(np.array([[0.1, -0.2, 0.3]]), CUBE)
        assert d[0] == pytest.approx(0.0, abs=1e-9)

    def test_corner(self):
        d = hull_distances(np.array([[1.0, 1.0, 1.0]]), CUBE)
        assert d[0] == pytest.approx(math.sqrt(3) / 2, abs=1e-9)

    def test_single_vertex(self):
        d = hull_distances(np.array([[1.0, 1.0]]), np.array([[0.0, 0.0]]))
        assert d[0] == pytest.approx(math.sqrt(2), rel=1e-12)

    def test_segment(self):
        seg = np.array([[0.0, 0.0], [1.0, 0.0]])
        d = hull_distances(np.array([[0.5, 0.7], [2.0, 0.0], [-1.0, -1.0]]), seg)
        assert np.allclose(d, [0.7, 1.0, math.sqrt(2)], atol=1e-9)


class TestBackends:
    def test_backends_agree(self, rng):
        for _ in range(40):
            n = int(rng.integers(2, 7))
            m = int(rng.integers(n + 1, 16))
            verts = rng.normal(size=(m, n))
            pts = rng.normal(size=(6, n)) * 1.5
            fast = hull_distances(pts, verts)
            slow = pywolfe.hull_distances(pts, verts)
            assert np.abs(fast - slow).max() < 1e-9

    def test_matches_slsqp_oracle(self, rng):
        for _ in range(12):
            n = int(rng.integers(2, 5))
            m = int(rng.integers(n + 1, 10))
            verts = rng.normal(size=(m, n))
            x = rng.normal(size=n) * 1.5
            ours = hull_distances(x[None, :], verts)[0]
            assert ours == pytest.approx(slsqp_distance(x, verts), abs=5e-6)

    def test_vertex_distance_upper_bound(self, rng):
        verts = rng.normal(size=(10, 4))
        pts = rng.normal(size=(50, 4)) * 2.0
        d = hull_distances(pts, verts)
        nearest_vertex = np.min(
            np.linalg.norm(pts[:, None, :] - verts[None, :, :], axis=-1), axis=1
        )
        assert np.all(d <= nearest_vertex + 1e-9)

    def test_collinear_vertices(self):
        verts = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [0.5, 0.5]])
        d = hull_distances(np.array([[1.0, 0.0]]), verts)
        assert d[0] == pytest.approx(math.sqrt(0.5), abs=1e-9)

    def test_backend_name(self):
        assert BACKEND in ("cython", "python")

    def test_pure_python_env_override(self):
        import os
        import subprocess
        import sys
        from pathlib import Path

        src = str(Path(__file__).resolve().parents[1] / "src")
        env = dict(os.environ, PYTHONPATH=src, VALGEO_PURE_PYTHON="1")
        snippet = (
            "import numpy as np\n"
            "from valgeo._kernels import BACKEND, hull_distances\n"
            "assert BACKEND == 'python', BACKEND\n"
            "d = hull_distances(np.array([[2.0, 0.0]]), np.eye(2))\n"
            "assert abs(d[0] - 1.0) < 1e-9, d\n"
            "print('ok')\n"
        )
        proc = subprocess.run(
            [sys.executable, "-c", snippet], capture_output=True, text=True, env=env
        )
        assert proc.returncode == 0, proc.stderr
        assert proc.stdout.strip() == "ok"
