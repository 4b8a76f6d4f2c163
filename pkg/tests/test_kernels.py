import os
import subprocess
import sys
import textwrap

import numpy as np
import pytest

from rotorkick import PulseSpec, RotorBasis, build_hamiltonian
from rotorkick.kernels import (
    HAVE_NUMBA,
    numba_disabled,
    rk4_loop_jit,
    rk4_loop_numpy,
    rk4_propagate,
)


def make_problem(j_max=9, p=1.5, sigma=3.0):
    h = build_hamiltonian(RotorBasis(j_max), PulseSpec(p, sigma)).entries
    a = np.ascontiguousarray(-1j * h)
    c0 = np.zeros(j_max + 1, dtype=np.complex128)
    c0[0] = 1.0
    return a, c0


class TestNumpyKernel:
    def test_norm_preserved(self):
        a, c0 = make_problem()
        out = rk4_loop_numpy(a, c0.copy(), 20_000, 1.0 / 20_000)
        assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-10)

    def test_zero_steps_is_identity(self):
        a, c0 = make_problem()
        out = rk4_loop_numpy(a, c0.copy(), 0, 1.0)
        assert np.array_equal(out, c0)

    def test_scalar_exponential_oracle(self):
        # 1x1 system: dc/dt = -i w c  ->  c(1) = exp(-i w)
        a = np.array([[-2.5j]], dtype=np.complex128)
        c0 = np.array([1.0 + 0j])
        out = rk4_loop_numpy(a, c0.copy(), 10_000, 1e-4)
        assert abs(out[0] - np.exp(-2.5j)) < 1e-12


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")
class TestNumbaKernel:
    def test_bit_identical_to_numpy(self):
        a, c0 = make_problem()
        out_np = rk4_loop_numpy(a, c0.copy(), 10_000, 1e-4)
        out_nb = rk4_loop_jit(a, c0.copy(), 10_000, 1e-4)
        assert np.array_equal(out_np, out_nb)

    def test_bit_identical_large_basis(self):
        a, c0 = make_problem(j_max=40, p=5.0, sigma=0.5)
        out_np = rk4_loop_numpy(a, c0.copy(), 5_000, 2e-4)
        out_nb = rk4_loop_jit(a, c0.copy(), 5_000, 2e-4)
        assert np.array_equal(out_np, out_nb)


class TestDispatch:
    def test_flag_reflects_environment(self, monkeypatch):
        monkeypatch.delenv("ROTORKICK_NO_NUMBA", raising=False)
        assert not numba_disabled()
        monkeypatch.setenv("ROTORKICK_NO_NUMBA", "1")
        assert numba_disabled()
        monkeypatch.setenv("ROTORKICK_NO_NUMBA", "0")
        assert not numba_disabled()

    def test_rk4_propagate_matches_kernel(self):
        a, c0 = make_problem()
        h = build_hamiltonian(RotorBasis(9), PulseSpec(1.5, 3.0)).entries
        out = rk4_propagate(h, c0.copy(), 10_000)
        ref = rk4_loop_numpy(a, c0.copy(), 10_000, 1e-4)
        assert np.max(np.abs(out - ref)) < 1e-12

    def test_rejects_nonpositive_steps(self):
        a, c0 = make_problem()
        h = build_hamiltonian(RotorBasis(9), PulseSpec(1.5, 3.0)).entries
        with pytest.raises(ValueError):
            rk4_propagate(h, c0, 0)

    def test_fallback_path_in_subprocess(self, tmp_path):
        # run a tiny propagation with numba disabled via the env flag and
        # check it agrees with the in-process (numba-enabled) result
        a, c0 = make_problem(j_max=5)
        ref = rk4_loop_numpy(a, c0.copy(), 2_000, 5e-4)
        code = textwrap.dedent("""
            import numpy as np
            from rotorkick import PulseSpec, RotorBasis, build_hamiltonian
            from rotorkick.kernels import numba_disabled, rk4_propagate
            assert numba_disabled()
            h = build_hamiltonian(RotorBasis(5), PulseSpec(1.5, 3.0)).entries
            c0 = np.zeros(6, dtype=np.complex128); c0[0] = 1.0
            out = rk4_propagate(np.ascontiguousarray(h), c0, 2000)
            np.save("out.npy", out)
        """)
        env = dict(os.environ, ROTORKICK_NO_NUMBA="1")
        subprocess.run([sys.executable, "-c", code], check=True, env=env,
                       cwd=tmp_path)
        out = np.load(tmp_path / "out.npy")
        assert np.max(np.abs(out - ref)) < 1e-13
