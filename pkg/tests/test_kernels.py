"""Both kernel backends against reference vectors and against each other."""
import math

import numpy as np
import pytest

from runprob import _backend, _purepy

from conftest import BACKENDS

# published reference outputs
XOSHIRO_1234 = [
    11520,
    0,
    1509978240,
    1215971899390074240,
    1216172134540287360,
    607988272756665600,
    16172922978634559625,
    8476171486693032832,
    10595114339597558777,
    2904607092377533576,
]
SPLITMIX_1234567 = [
    6457827717110365317,
    3203168211198807973,
    9817491932198370423,
    4593380528125082431,
    16408922859458223821,
]


def test_xoshiro_reference(backend):
    assert backend.xoshiro_stream(1, 2, 3, 4, 10) == XOSHIRO_1234


def test_splitmix_reference(backend):
    state = 1234567
    out = []
    for _ in range(5):
        value, state = backend.splitmix64(state)
        out.append(value)
    assert out == SPLITMIX_1234567


def test_histogram_counts(backend):
    hist = backend.longest_run_histogram(4, 0, 16)
    # longest run 0: only 0000; longest run 4: only 1111
    assert hist[0].tolist() == [1, 0, 0, 0, 0]
    assert hist[4].tolist() == [0, 0, 0, 0, 1]
    assert hist.sum() == 16
    assert hist.sum(axis=0).tolist() == [1, 4, 6, 4, 1]


def test_mc_block_degenerate(backend):
    assert backend.mc_block(1, 2, 3, 4, 500, 5, 2, 2**53) == 500
    assert backend.mc_block(1, 2, 3, 4, 500, 5, 1, 0) == 0


def test_recurrence_seeds(backend):
    z = backend.recurrence_float(1 / 8, 1 / 4, 2, 4)
    assert z.tolist() == [1.0, 1.0, 0.75, 0.625, 0.5]


def test_beta_logspace_small(backend):
    value, err = backend.beta_logspace(3, 2, math.log(1 / 8))
    assert abs(value - 0.875) <= err
    assert backend.beta_logspace(-2, 2, math.log(1 / 8)) == (0.0, 0.0)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")
def test_backends_agree():
    from runprob import _kernels

    for n in (0, 1, 7, 13):
        assert (_kernels.longest_run_histogram(n, 0, 1 << n) == _purepy.longest_run_histogram(n, 0, 1 << n)).all()
    args = (0x9E3779B97F4A7C15, 7, 11, 13, 20_000, 9, 3, 3 * 2**51)
    assert _kernels.mc_block(*args) == _purepy.mc_block(*args)
    a = _kernels.recurrence_float(0.0123, 0.3, 4, 5000)
    b = _purepy.recurrence_float(0.0123, 0.3, 4, 5000)
    assert np.max(np.abs(a - b)) <= 1e-15
    for n, r, c in [(40, 1, 0.2), (300, 3, 0.01), (999, 5, 0.03)]:
        va, ea = _kernels.beta_logspace(n, r, math.log(c))
        vb, eb = _purepy.beta_logspace(n, r, math.log(c))
        assert abs(va - vb) <= ea + eb


def test_backend_selected():
    assert _backend.BACKEND in ("cython", "python")
    assert _backend.kernels is not None


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("RUNPROB_THREADS", "3")
    assert _backend.worker_count() == 3
    monkeypatch.setenv("RUNPROB_THREADS", "junk")
    assert _backend.worker_count(2) == 2
    monkeypatch.delenv("RUNPROB_THREADS")
    assert _backend.worker_count() >= 1


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")
def test_benchmark_script_runs(capsys):
    import importlib.util
    from pathlib import Path

    path = Path(__file__).parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    bench = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(bench)
    assert bench.main(["--quick", "--repeat", "1"]) == 0
    assert "speedup" in capsys.readouterr().out
