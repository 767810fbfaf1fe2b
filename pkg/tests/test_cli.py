"""File formats and the command-line front end."""

import json

import numpy as np
import pytest

from slaterkit import cli
from slaterkit import io as skio
from slaterkit import linalg as la
from slaterkit import mixed as mx
from slaterkit import states as st
from slaterkit import witnesses as wi


def write(tmp_path, name, obj):
    path = tmp_path / name
    skio.dump(obj, str(path))
    return str(path)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


@pytest.fixture()
def bell_file(tmp_path):
    bell = st.bipartite_state(np.array([[0, 1], [1, 0]]) / np.sqrt(2))
    return write(tmp_path, "bell.json", skio.pure_state_to_dict(bell))


def test_round_trip_bit_exact(tmp_path):
    gen = np.random.default_rng(0)
    for kind, d, n in (("fermion", 6, 3), ("boson", 3, 2)):
        state = st.random_pure_state(kind, d, n, gen)
        path = write(tmp_path, f"{kind}.json", skio.pure_state_to_dict(state))
        back = skio.load_any(path)
        assert np.array_equal(back.amps, state.amps)
    rho = mx.density_from_mixture(
        [(p, st.random_pure_state("fermion", 4, 2, gen)) for p in gen.dirichlet(np.ones(3))])
    path = write(tmp_path, "rho.json", skio.density_to_dict(rho))
    back = skio.load_any(path)
    assert np.array_equal(back.matrix, rho.matrix)
    w = wi.optimal_witness_example(2, 2, "fermion")
    path = write(tmp_path, "w.json", skio.witness_to_dict(w))
    back = skio.load_any(path)
    assert np.array_equal(back.matrix, w.matrix) and back.slater_class == 2


def test_rank_command_bell(bell_file, capsys):
    code, report = run(capsys, "rank", bell_file)
    assert code == 0 and report["rank_claim"] == 2


def test_rank_command_three_fermion(tmp_path, capsys):
    state = st.fermion_state(6, 3, {(0, 1, 2): 0.8, (2, 4, 5): 0.6})
    path = write(tmp_path, "w3.json", skio.pure_state_to_dict(state))
    code, report = run(capsys, "rank", path)
    assert code == 0
    assert report["rank_claim"] == "rank_ge_2"
    probe = np.array([complex(re, im) for re, im in report["certificate"]["probes"][0]])
    assert np.argmax(np.abs(probe)) == 2


def test_concurrence_and_exit_codes(tmp_path, bell_file, capsys):
    code, report = run(capsys, "concurrence", bell_file)
    assert code == 0 and abs(report["concurrence"] - 1.0) < 1e-12
    # unsupported system -> 4
    state = st.fermion_state(6, 2, {(0, 1): 1.0})
    path = write(tmp_path, "d6.json", skio.pure_state_to_dict(state))
    code, _ = run(capsys, "concurrence", path)
    assert code == 4
    # malformed file -> 2
    bad = tmp_path / "bad.json"
    bad.write_text("not json")
    code, _ = run(capsys, "rank", str(bad))
    assert code == 2


def test_mixed_concurrence_and_slater1(tmp_path, capsys):
    mc = st.maximally_correlated_state("fermion", 2)
    path = write(tmp_path, "rho.json", skio.density_to_dict(mx.density_from_pure(mc)))
    code, report = run(capsys, "mixed-concurrence", path)
    assert code == 0 and abs(report["concurrence"] - 1.0) < 1e-9
    code, report = run(capsys, "slater1", path)
    assert code == 0 and report["is_class_1"] is False


def test_ppt_command(tmp_path, capsys):
    psi_m = np.array([0, 1, -1, 0]) / np.sqrt(2)
    rho = mx.density_matrix(mx.bipartite_space(2, 2),
                            0.25 * np.outer(psi_m, psi_m) + 0.75 * np.eye(4) / 4)
    path = write(tmp_path, "werner.json", skio.density_to_dict(rho))
    code, report = run(capsys, "ppt", path)
    assert code == 0 and report["ppt"] is True

    gen = np.random.default_rng(1)
    vectors = [la.haar_vector(3, gen) for _ in range(3)]
    pairs = [(w, st.boson_state(3, 2, mx._symmetric_pair_vector(e)))
             for w, e in zip(gen.dirichlet(np.ones(3)), vectors)]
    path2 = write(tmp_path, "bos.json", skio.density_to_dict(mx.density_from_mixture(pairs)))
    code, report = run(capsys, "ppt", path2)
    assert code == 0 and report["separability"] == "separable"


def test_witness_pipeline(tmp_path, capsys):
    code, _ = run(capsys, "witness", "make", "--K", "2", "--k", "2", "--kind", "fermion",
                  "-o", str(tmp_path / "w.json"))
    assert code == 0
    mc = st.maximally_correlated_state("fermion", 2)
    rho_path = write(tmp_path, "mc.json", skio.density_to_dict(mx.density_from_pure(mc)))
    code, report = run(capsys, "witness", "eval", str(tmp_path / "w.json"), rho_path)
    assert code == 0
    assert abs(report["value"] + 1.0) < 1e-10 and report["detected"] is True
    code, report = run(capsys, "witness", "optimize", str(tmp_path / "w.json"),
                       "--budget", "32")
    assert code == 0 and report["optimal"] is True


def test_kak_command(tmp_path, capsys):
    u = la.haar_unitary(4, np.random.default_rng(2))
    obj = {"type": "operator", "hermitian": False, "slater_class": 2,
           "space": {"kind": "bipartite", "dims": [2, 2]},
           "matrix": skio._matrix_to_json(u)}
    path = write(tmp_path, "u4.json", obj)
    code, report = run(capsys, "kak", path)
    assert code == 0 and report["residual"] <= 1e-8
    v1 = skio._matrix_from_json(report["v1"])
    ud = skio._matrix_from_json(report["ud"])
    v2 = skio._matrix_from_json(report["v2"])
    assert np.max(np.abs(v1 @ ud @ v2 - u)) <= 1e-8


def test_modes_command(tmp_path, capsys):
    s = 1 / np.sqrt(2)
    state = st.fermion_state(4, 2, {(0, 1): s, (2, 3): s})
    path = write(tmp_path, "pairs.json", skio.pure_state_to_dict(state))
    code, report = run(capsys, "modes", path, "--cut", "0,1")
    assert code == 0 and abs(report["entropy"] - 1.0) < 1e-12


def test_seeded_reports_are_deterministic(tmp_path, capsys):
    state = st.fermion_state(6, 3, {(0, 1, 2): 0.8, (2, 4, 5): 0.6})
    path = write(tmp_path, "w3.json", skio.pure_state_to_dict(state))
    _, a = run(capsys, "rank", path, "--seed", "11")
    _, b = run(capsys, "rank", path, "--seed", "11")
    assert a == b


def test_batch_mode(tmp_path, capsys):
    bell = st.bipartite_state(np.array([[0, 1], [1, 0]]) / np.sqrt(2))
    write(tmp_path, "a.json", skio.pure_state_to_dict(bell))
    write(tmp_path, "b.json", skio.pure_state_to_dict(
        st.maximally_correlated_state("fermion", 2)))
    code, report = run(capsys, "concurrence", str(tmp_path), "--batch")
    assert code == 0
    assert set(report) == {"a.json", "b.json"}
    assert all(abs(entry["concurrence"] - 1.0) < 1e-9 for entry in report.values())
    # a failing file surfaces per-file errors and a nonzero exit
    write(tmp_path, "c.json", skio.pure_state_to_dict(
        st.fermion_state(6, 2, {(0, 1): 1.0})))
    code, report = run(capsys, "concurrence", str(tmp_path), "--batch")
    assert code == 4 and "error" in report["c.json"]
