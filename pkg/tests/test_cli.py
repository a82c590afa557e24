#!/usr/bin/env python

"""Tests for the `rknl` command line."""

import json

import pytest
from click.testing import CliRunner

from rknl_machine import cli
from rknl_machine.bench.families import church
from rknl_machine.core.syntax import parse
from rknl_machine.core.term import alpha_eq
from . import MachineTest, ELABORATE


class TestCli(MachineTest):

    @pytest.fixture(autouse=True)
    def setup(self):
        super().setup()
        self.runner = CliRunner(mix_stderr=False)

    def invoke(self, *args):
        return self.runner.invoke(cli.main, list(args))

    def test_help(self):
        result = self.invoke("--help")
        assert (result.exit_code == 0)
        for command in ("normalize", "trace", "potential", "bench", "verify"):
            assert (command in result.output)

    def test_normalize(self):
        result = self.invoke("normalize", "--term", ELABORATE)
        assert (result.exit_code == 0)
        assert (result.stdout == "c (\\z_0.z_0) (\\z_0.z_0)\nsteps=27 beta=3\n")

    def test_normalize_engines(self):
        result = self.invoke("normalize", "--engine", "no", "--term", ELABORATE)
        assert (result.stdout == "c (\\z.z) (\\z.z)\nsteps=5 beta=5\n")
        result = self.invoke("normalize", "--engine", "rknl-no8", "--family", "cn_dub_I", "--n", "2")
        assert (result.exit_code == 0)
        assert (result.stdout.splitlines()[-1].startswith("steps=73 "))
        result = self.invoke("normalize", "--engine", "kl", "--term", r"(\x.x)(\y.y)")
        assert (result.stdout == "\\y.y\nsteps=4 beta=1\n")

    def test_normalize_from_file(self, tmp_path):
        path = tmp_path / "term.lam"
        path.write_text("λx.x\n", encoding="utf-8")
        result = self.invoke("normalize", "--file", str(path))
        assert (result.exit_code == 0)
        assert (result.stdout.splitlines()[0] == "\\x_0.x_0")

    def test_normalize_trace_goes_to_stderr(self):
        result = self.invoke("normalize", "--trace", "--term", ELABORATE)
        assert (result.exit_code == 0)
        records = [json.loads(line) for line in result.stderr.splitlines() if line.startswith("{")]
        assert (len(records) == 27)

    def test_fuel_exhaustion(self):
        result = self.invoke("normalize", "--fuel", "100", "--term", r"(\x.x x)(\x.x x)")
        assert (result.exit_code == 2)
        assert ("fuel exhausted" in result.stderr)
        result = self.invoke("normalize", "--engine", "no", "--fuel", "100", "--term", r"(\x.x x)(\x.x x)")
        assert (result.exit_code == 2)

    def test_usage_errors(self):
        assert (self.invoke("normalize").exit_code == 1)
        assert (self.invoke("normalize", "--term", "x", "--family", "dn_I", "--n", "1").exit_code == 1)
        assert (self.invoke("normalize", "--family", "dn_I").exit_code == 1)
        assert (self.invoke("normalize", "--family", "nope", "--n", "1").exit_code == 1)
        assert (self.invoke("normalize", "--family", "dn_I", "--n", "-1").exit_code == 1)
        assert (self.invoke("normalize", "--engine", "cbv", "--term", "x").exit_code == 1)
        assert (self.invoke("frobnicate").exit_code == 1)

    def test_parse_error(self):
        result = self.invoke("normalize", "--term", r"f \x.x")
        assert (result.exit_code == 1)
        assert ("byte offset 2" in result.stderr)

    def test_kl_needs_a_closed_term(self):
        result = self.invoke("normalize", "--engine", "kl", "--term", ELABORATE)
        assert (result.exit_code == 1)
        assert ("free variables: c" in result.stderr)

    def test_trace(self):
        result = self.invoke("trace", "--term", ELABORATE)
        assert (result.exit_code == 0)
        lines = result.stdout.splitlines()
        assert (len(lines) == 27)
        assert (json.loads(lines[0]) == {"step": 1, "rule": 1, "mode": "eval", "focus": "\\x.c x x",
                                         "stack_depth": 1, "store_size": 0})
        result = self.invoke("trace", "--engine", "kl", "--term", r"(\x.x)(\y.y)")
        assert ([json.loads(line)["rule"] for line in result.stdout.splitlines()] == [1, 2, 6, 4])

    def test_trace_to_file(self, tmp_path):
        out = tmp_path / "trace.jsonl"
        result = self.invoke("trace", "--engine", "rknl-no8", "--term", r"\x.x", "--out", str(out))
        assert (result.exit_code == 0)
        assert ([json.loads(line)["rule"] for line in out.read_text().splitlines()] == [2, 7, 4, 11, 5])

    def test_potential(self):
        result = self.invoke("potential", "--family", "cn_dub_etaI", "--n", "6")
        assert (result.exit_code == 0)
        lines = result.stdout.splitlines()
        assert (lines[0] == "step,rule,phi_config,phi_store")
        assert (len(lines) == 130)

    def test_bench(self):
        result = self.invoke("bench", "--family", "cn_c2_I", "--n", "1")
        assert (result.exit_code == 0)
        assert ("cn_c2_I,1,rknl,30,30,true" in result.stdout.splitlines())

    def test_verify(self):
        result = self.invoke("verify", "all", "--term", ELABORATE)
        assert (result.exit_code == 0)
        assert ("kl bisimulation: skipped, term is open" in result.stdout)
        assert ("decode: pass" in result.stdout)
        assert ("potential: pass" in result.stdout)
        result = self.invoke("verify", "kl-bisim", "--term", r"(\x.x)(\y.y)")
        assert (result.exit_code == 0)
        assert (result.stdout.startswith("kl bisimulation: pass steps=4"))
        result = self.invoke("verify", "kl-bisim", "--term", ELABORATE)
        assert (result.exit_code == 1)

    def test_verify_bilinear(self):
        result = self.invoke("verify", "bilinear", "--family", "cn_dub_I", "--n", "3")
        assert (result.exit_code == 0)
        assert (result.stdout.startswith("bilinear: steps=69 beta="))
        assert (result.stdout.rstrip().endswith("pass"))

    def test_deeply_nested_input(self):
        depth = 2000
        text = r"\f.\x." + "f (" * (depth - 1) + "f x" + ")" * (depth - 1)
        result = self.invoke("normalize", "--term", text)
        assert (result.exit_code == 0), result.stderr
        assert (alpha_eq(parse(result.stdout.splitlines()[0]), church(depth)))
        result = self.invoke("normalize", "--engine", "no", "--term", text)
        assert (result.stdout.splitlines()[0] == text)

    def test_output_is_byte_stable(self):
        for args in (("trace", "--term", ELABORATE), ("potential", "--family", "cn_dub_etaI", "--n", "3"),
                     ("trace", "--engine", "kl", "--family", "pred_cn", "--n", "2")):
            first, second = self.invoke(*args), self.invoke(*args)
            assert (first.exit_code == 0)
            assert (first.stdout_bytes == second.stdout_bytes)

    def test_help_explains_fuel_exhaustion(self):
        for command in ("potential", "verify"):
            result = self.invoke(command, "--help")
            assert ("exhausts its fuel" in " ".join(result.output.split()))
        result = self.invoke("potential", "--fuel", "50", "--term", r"(\x.x x)(\x.x x)")
        assert (result.exit_code == 0)
        assert (len(result.stdout.splitlines()) == 52)
