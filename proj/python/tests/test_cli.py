import json
import os
import pathlib
import subprocess

import pytest

CLI = os.environ.get("CODESUM_CLI")
FIXTURES = pathlib.Path(__file__).resolve().parents[2] / "tests" / "fixtures"

pytestmark = pytest.mark.skipif(not CLI, reason="CODESUM_CLI not set")


def run(*args):
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True)


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "data.jsonl"
    r = run("build-corpus", "--src", FIXTURES / "smoke", "--out", path, "--project", "smoke")
    assert r.returncode == 0, r.stderr
    return path


def train(dataset, out, seed):
    return run("train", "--data", dataset, "--out", out, "--model", "copy", "--epochs", "2",
               "--D", "16", "--k1", "4", "--k2", "4", "--w1", "3", "--w2", "3", "--w3", "2",
               "--seed", seed)


def test_usage_errors_exit_2(tmp_path):
    assert run().returncode == 2
    assert run("train").returncode == 2
    assert run("train", "--data", "x", "--out", "y", "--model", "rnn").returncode == 2
    empty = tmp_path / "empty"
    empty.mkdir()
    r = run("build-corpus", "--src", empty, "--out", tmp_path / "d.jsonl", "--project", "p")
    assert r.returncode == 2 and "no Java files" in r.stderr


def test_corrupt_checkpoint_exits_2(tmp_path, dataset):
    bad = tmp_path / "bad.ckpt"
    bad.write_bytes(b"garbage")
    r = run("evaluate", "--ckpt", bad, "--data", dataset)
    assert r.returncode == 2 and "BadMagic" in r.stderr


def test_same_seed_same_checkpoint(tmp_path, dataset):
    a, b = tmp_path / "a.ckpt", tmp_path / "b.ckpt"
    assert train(dataset, a, 3).returncode == 0
    assert train(dataset, b, 3).returncode == 0
    assert a.read_bytes() == b.read_bytes()


def test_evaluate_and_suggest(tmp_path, dataset):
    ckpt = tmp_path / "m.ckpt"
    assert train(dataset, ckpt, 1).returncode == 0
    r = run("evaluate", "--ckpt", ckpt, "--data", dataset)
    assert r.returncode == 0, r.stderr
    report = json.loads(r.stdout)
    assert 0.0 <= report["f1_at_1"] <= report["f1_at_5"] <= 1.0

    snippet = tmp_path / "body.java"
    snippet.write_text("{ return this.name; }")
    html = tmp_path / "viz.html"
    r = run("suggest", "--ckpt", ckpt, "--snippet", snippet, "-k", "3", "--viz", html)
    assert r.returncode == 0, r.stderr
    assert r.stdout.startswith("1. ")
    assert html.read_text().count('<tr class="alpha">') >= 2
