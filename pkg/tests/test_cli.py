import contextlib
import csv
import io
import json
import os
import shutil
import tempfile
import unittest

import numpy as np

from anisoqed import cli
from anisoqed.constitutive import ConstitutiveTensors
from anisoqed.emission import TwoLevelAtom, free_space_rate
from anisoqed.errors import SchemaError

OMEGA0 = 3.0e15
C = ConstitutiveTensors.vacuum().constants.c

EYE = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]


def _diag(v):
    return (v * np.eye(3)).tolist()


class TestCli(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.vacuum = self._write("vacuum.json", {"eps1": EYE, "mu2": EYE})
        self.glass = self._write("glass.json", {"eps1": _diag(2.25), "mu2": EYE})

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def _path(self, name):
        return os.path.join(self.tmp, name)

    def _write(self, name, obj):
        path = self._path(name)
        with open(path, "w") as f:
            json.dump(obj, f)
        return path

    def _main(self, argv):
        err = io.StringIO()
        with contextlib.redirect_stderr(err), contextlib.redirect_stdout(io.StringIO()):
            code = cli.main(argv)
        return code, err.getvalue()

    def _run(self, argv, name="out.json"):
        out = self._path(name)
        code, err = self._main(["--out", out] + argv)
        self.assertEqual(code, 0, err)
        with open(out) as f:
            return json.load(f), out

    def _decay_argv(self, material):
        return [
            "decay", "--material", material, "--omega0", str(OMEGA0),
            "--dipole", "0,0,1e-29", "--R", "1e-10", "--n-theta", "8", "--n-phi", "16",
        ]

    def test_vacuum_decay(self):
        doc, _ = self._run(self._decay_argv(self.vacuum))
        self.assertAlmostEqual(doc["result"]["gamma_over_free_space"], 1.0, delta=0.005)
        self.assertEqual(doc["config"]["command"], "decay")
        self.assertTrue(doc["config"]["corrected"])
        self.assertEqual(doc["config"]["quad"]["radial"], "analytic")
        self.assertNotIn("time", doc["result"]["diagnostics"])

    def test_zero_dipole_decay(self):
        table = self._path("sweep.csv")
        argv = self._decay_argv(self.vacuum)
        argv[argv.index("--dipole") + 1] = "0,0,0"
        doc, _ = self._run(["-v", "--csv", table] + argv + ["--sweep-angle", "3"])
        result = doc["result"]
        self.assertEqual(result["gamma"], 0.0)
        self.assertEqual(result["gamma_free_space"], 0.0)
        self.assertIsNone(result["gamma_over_free_space"])
        self.assertEqual(len(result["angle_sweep"]), 3)
        for row in result["angle_sweep"]:
            self.assertEqual(row["gamma"], 0.0)
            self.assertIsNone(row["gamma_over_free_space"])
        with open(table) as f:
            rows = list(csv.reader(f))
        self.assertEqual(len(rows), 4)
        self.assertEqual(rows[1][2], "")

    def test_reruns_are_identical(self):
        _, a = self._run(self._decay_argv(self.glass), "a.json")
        _, b = self._run(self._decay_argv(self.glass), "b.json")
        with open(a, "rb") as fa, open(b, "rb") as fb:
            self.assertEqual(fa.read(), fb.read())

    def test_config_echo_reproduces(self):
        first, a = self._run(self._decay_argv(self.glass), "a.json")
        config = self._write("config.json", first["config"])
        second, b = self._run(["--config", config], "b.json")
        self.assertEqual(first["config"], second["config"])
        with open(a, "rb") as fa, open(b, "rb") as fb:
            self.assertEqual(fa.read(), fb.read())

    def test_config_merges_with_arguments(self):
        first, _ = self._run(self._decay_argv(self.vacuum), "a.json")
        config = self._write("config.json", first["config"])
        second, _ = self._run(["--config", config, "decay", "--uncorrected"], "b.json")
        self.assertFalse(second["config"]["corrected"])
        self.assertEqual(second["config"]["quad"]["n_theta"], 8)

    def test_config_with_file_names(self):
        config = self._write(
            "config.json", {"command": "dispersion", "material": self.glass, "qhat": [1, 0, 0]}
        )
        doc, _ = self._run(["--config", config])
        self.assertEqual(doc["config"]["material"]["eps1"], _diag(2.25))
        self.assertEqual(doc["config"]["material"]["units"], "relative")

    def test_parse_config_in_memory_files(self):
        files = {"glass.json": {"eps1": _diag(2.25), "mu2": EYE}}
        config = cli.parse_config(
            ["localfield", "--material", "glass.json", "--omega", "3e15", "--R", "1e-10"], files
        )
        self.assertEqual(config.command, "localfield")
        self.assertEqual(config.params["hole"]["eps1"], EYE)
        self.assertEqual(config.params["quad"]["n_theta"], 32)
        self.assertAlmostEqual(config.objects["material"].eps1[2, 2] / config.objects["material"].constants.eps0, 2.25)

    def test_malformed_tensor(self):
        bad = self._write(
            "bad.json",
            {"eps1": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0]], "mu2": EYE},
        )
        with self.assertRaises(SchemaError) as ctx:
            cli.parse_config(self._decay_argv(bad))
        self.assertEqual(ctx.exception.path, "eps1/2")
        code, err = self._main(self._decay_argv(bad))
        self.assertEqual(code, 2)
        self.assertIn("eps1/2", err)

    def test_unknown_key(self):
        config = self._write(
            "config.json", {"command": "dispersion", "material": self.vacuum, "qhat": [0, 0, 1], "spin": 1}
        )
        code, _ = self._main(["--config", config])
        self.assertEqual(code, 2)

    def test_onsager_violation(self):
        bad = self._write(
            "bad.json", {"eps1": [[2.0, 0.5, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 2.0]], "mu2": EYE}
        )
        code, err = self._main(["dispersion", "--material", bad, "--qhat", "0,0,1"])
        self.assertEqual(code, 4)
        self.assertIn("eps1_symmetric", err)

    def test_configuration_errors(self):
        code, _ = self._main(["decay", "--material", self.vacuum])
        self.assertEqual(code, 2)
        code, _ = self._main([])
        self.assertEqual(code, 2)
        code, _ = self._main(["decay", "--dipole", "1,2"])
        self.assertEqual(code, 2)
        code, _ = self._main(["dispersion", "--material", self._path("missing.json"), "--qhat", "0,0,1"])
        self.assertEqual(code, 2)

    def test_metric_then_dispersion(self):
        metric = self._write("metric.json", {"g": np.diag([-1.0, 1.0, 1.0, 1.0]).tolist()})
        material = self._path("minkowski.json")
        doc, _ = self._run(["metric", "--metric", metric, "--material-out", material], "m.json")
        self.assertTrue(doc["result"]["onsager"]["ok"])
        np.testing.assert_allclose(doc["result"]["material"]["eps1"], EYE, atol=1e-12)

        doc, _ = self._run(["dispersion", "--material", material, "--qhat", "0,0,1"], "d.json")
        (direction,) = doc["result"]["directions"]
        transverse = [b for b in direction["branches"] if not b["longitudinal_zero_mode"]]
        self.assertEqual(len(transverse), 1)
        self.assertEqual(transverse[0]["lambda_count"], 2)
        self.assertAlmostEqual(transverse[0]["omega"] / C, 1.0, places=10)
        self.assertLess(direction["maxwell_residual"], 1e-10)

    def test_metric_signature(self):
        metric = self._write("metric.json", {"g": np.diag([-1.0, -1.0, -1.0, 1.0]).tolist()})
        code, err = self._main(["metric", "--metric", metric])
        self.assertEqual(code, 2)
        self.assertIn("signature", err)

    def test_verbose_keeps_stdout_clean(self):
        out, err = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = cli.main(["-vv", "dispersion", "--material", self.glass, "--qhat", "0,1,1"])
        self.assertEqual(code, 0)
        doc = json.loads(out.getvalue())
        self.assertEqual(doc["config"]["qhat"], [0.0, 1.0, 1.0])
        self.assertIn("lambdas", err.getvalue())

    def test_dispersion_sweep_csv(self):
        table = self._path("sweep.csv")
        self._run(["--csv", table, "dispersion", "--material", self.glass, "--sweep", "3,4"])
        with open(table) as f:
            rows = list(csv.reader(f))
        self.assertEqual(rows[0], ["theta", "phi", "branch", "lambda", "omega", "X_x", "X_y", "X_z"])
        self.assertGreater(len(rows), 1)

    def test_project(self):
        doc, _ = self._run(
            ["project", "--material", self.vacuum, "--q", "0,0,2", "--field", "1,0", "0,0", "0,1"]
        )
        result = doc["result"]
        np.testing.assert_allclose(result["F_par"], [[0, 0], [0, 0], [0, 1]], atol=1e-14)
        np.testing.assert_allclose(result["F_perp"], [[1, 0], [0, 0], [0, 0]], atol=1e-14)
        for value in result["checks"].values():
            self.assertLess(value, 1e-12)

    def test_localfield(self):
        omega = 3.0e15
        R = 1e-3 * C / omega
        doc, _ = self._run(
            [
                "localfield", "--material", self.glass, "--omega", str(omega), "--R", repr(R),
                "--n-theta", "16", "--n-phi", "32",
            ]
        )
        Q = np.array(doc["result"]["Q"])
        if Q.ndim == 3:
            Q = Q[..., 0]
        expected = (2 * 2.25 + 1) / (3 * 2.25)
        np.testing.assert_allclose(np.diag(Q), expected, rtol=1e-3)

    def test_wwsim_csv(self):
        atom = TwoLevelAtom(OMEGA0, [0.0, 0.0, 1e-29])
        gamma = free_space_rate(atom, ConstitutiveTensors.vacuum().constants)
        table = self._path("traj.csv")
        doc, _ = self._run(
            [
                "--csv", table, "wwsim", "--material", self.vacuum, "--omega0", str(OMEGA0),
                "--dipole", "0,0,1e-29",
                "--window", f"{OMEGA0 - 50 * gamma!r},{OMEGA0 + 50 * gamma!r}",
                "--modes", "200,2,2", "--tfinal", repr(5.0 / gamma), "--dt", repr(1e-3 / gamma),
                "--fit-window", f"{1.0 / gamma!r},{4.0 / gamma!r}",
            ]
        )
        result = doc["result"]
        self.assertLess(abs(result["gamma_fit"] / gamma - 1.0), 0.05)
        self.assertLess(abs(result["golden_rule_rate"] / gamma - 1.0), 0.01)
        self.assertLess(result["norm_drift"], 1e-9)
        self.assertEqual(doc["config"]["store_every"], 25)
        with open(table) as f:
            rows = list(csv.reader(f))
        self.assertEqual(rows[0], ["t", "re_c", "im_c", "norm"])
        self.assertAlmostEqual(float(rows[1][1]), 1.0, places=12)


if __name__ == "__main__":
    unittest.main()
