import importlib
import os
import random
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from eventgraph import _kernels_py, kernels

compiled = pytest.importorskip("eventgraph._kernels", reason="compiled extension not built")

u64 = st.integers(0, 2**64 - 1)


def test_backend_reported():
    assert kernels.BACKEND in ("compiled", "python")


def test_known_hash_values_agree():
    for seed in (0, 1, 2**63, 2**64 - 1):
        for user in ("", "alice", "ünïcødé", "x" * 100):
            assert compiled.hash_user(user, seed) == _kernels_py.hash_user(user, seed)


@given(st.lists(st.text(max_size=12), max_size=20), u64)
def test_hash_users_parity(users, seed):
    assert compiled.hash_users(users, seed) == _kernels_py.hash_users(users, seed)


@given(st.sets(u64, max_size=40), st.integers(1, 10))
def test_bottom_p_parity(values, p):
    assert compiled.bottom_p(values, p) == _kernels_py.bottom_p(values, p) == sorted(values)[:p]


@given(st.sets(u64, max_size=12), st.sets(u64, max_size=12), st.integers(1, 8))
def test_merge_and_intersect_parity(a, b, p):
    sa, sb = sorted(a)[:p], sorted(b)[:p]
    assert compiled.merge_bottom_p(sa, sb, p) == _kernels_py.merge_bottom_p(sa, sb, p)
    want = bool(set(sa) & set(sb))
    assert compiled.sketches_intersect(sa, sb) == _kernels_py.sketches_intersect(sa, sb) == want


def test_pure_python_switch():
    env = dict(os.environ, EVENTGRAPH_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from eventgraph import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
