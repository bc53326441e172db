#!/usr/bin/env python3
"""Smoke test for the gibbslab_py extension module.

Builds the cdylib with cargo, loads it directly from the target directory,
and checks a handful of frozen values against the native test suite.
"""

import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build_extension() -> Path:
    subprocess.run(
        ["cargo", "build", "--release", "-p", "gibbslab-py"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "release" / "libgibbslab_py.so"
    if not lib.exists():
        # macOS names the artifact differently
        lib = ROOT / "target" / "release" / "libgibbslab_py.dylib"
    if not lib.exists():
        raise FileNotFoundError("built extension library not found under target/release")
    return lib


def close(a, b, tol=1e-10):
    if abs(a - b) > tol:
        raise AssertionError(f"expected {b!r}, got {a!r} (tol {tol:g})")


def main() -> None:
    lib = build_extension()
    stage = Path(tempfile.mkdtemp(prefix="gibbslab_py_"))
    shutil.copy(lib, stage / "gibbslab_py.so")
    sys.path.insert(0, str(stage))

    import gibbslab_py as gl

    # Kernel scalars, pinned against the native frozen-value tests.
    close(gl.dissipator_coefficient(0.0, 0.0, 1.0), 5.5069531490318369e-1, 1e-12)
    w = gl.odd_kernel_hat(0.7)
    close(w.real, 0.0, 1e-15)
    close(w.imag, 1.4440440444654770e-1, 1e-12)
    close(gl.f_hat(1.1, 1.3), 4.3192119154086556e-1, 1e-12)
    close(gl.thermal_window(0.7, 0.9), 2.6488751892235918e-1, 1e-12)
    close(gl.shift_kernel_hat(0.7), 2.0129119516076502e-2, 1e-12)
    close(gl.gap_constant(), 1.1013906298063674, 1e-10)
    close(gl.gap_constant(), math.sqrt(2.0) * math.exp(-0.25), 1e-12)

    # Closed form for the one-mode spectral gap.
    eps, beta = 0.3, 2.0
    expect = gl.gap_constant() * math.exp(-4.0 * beta**2 * eps**2) * math.cosh(2.0 * beta * eps)
    close(gl.single_mode_gap(eps, beta, gl.gap_constant()), expect, 1e-12)

    # One-mode pipeline end to end.
    model = gl.Model.single_mode(0.4)
    assert model.n_modes == 1 and model.is_free
    pipe = gl.Pipeline(model, 1.0)
    assert pipe.beta == 1.0
    assert pipe.stationarity_residual() < 1e-10
    assert pipe.detailed_balance_residual() < 1e-10
    close(pipe.even_gap(), 1.5534438906398016, 1e-8)
    close(pipe.parent_gap("full"), 0.7767219453199008, 1e-8)
    close(pipe.sigma_min, 0.16798161486607549, 1e-10)
    assert pipe.parent_hermiticity() < 1e-9

    # Interacting model.
    hub = gl.Pipeline(gl.Model.hubbard(1, 0.2, 0.3), 1.0)
    close(hub.even_gap(), 2.0714978587713375, 1e-8)
    assert hub.interaction_norm() > 0.0

    # Mixing certificate: bound never violated, measured rate at least the gap.
    slack, rate, gap = pipe.mixing(seed=11)
    assert slack <= 1e-7, f"bound slack {slack:.3e}"
    assert rate is not None and rate >= gap - 1e-6, f"rate {rate} vs gap {gap}"

    # The naive odd-operator transport anticommutes where a commutator is
    # required; the parity-corrected transport commutes. All three residuals
    # are exact identities.
    superop_comm, naive_anti, corrected_comm = gl.vectorization_counterexample()
    assert superop_comm <= 1e-13 and naive_anti <= 1e-13 and corrected_comm <= 1e-13

    # Capacity guard surfaces as ValueError.
    try:
        gl.Model.hubbard(9, 0.0, 0.0)
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError for an oversized register")

    try:
        gl.Pipeline(gl.Model.single_mode(0.4), -1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError for negative beta")

    print("smoke test passed:", gl.__name__, "from", lib)


if __name__ == "__main__":
    main()
