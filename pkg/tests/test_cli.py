import csv
import json
import tempfile
import unittest
from pathlib import Path
from typing import List
from unittest import mock

import numpy as np

from phonon_diffusion.__main__ import get_parser, main
from phonon_diffusion.kernel import KernelTable, WaveGrid, cache_filename

FAST = ["--n", "16", "--quad-tol", "1e-8"]


def read_rows(path: Path) -> List[List[str]]:
    with open(path, newline="", encoding="utf-8") as csv_file:
        return list(csv.reader(csv_file))


class CliTest(unittest.TestCase):
    def setUp(self) -> None:
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp_dir = Path(self._tmp.name)
        self.cache_dir = self.tmp_dir / "cache"

    def tearDown(self) -> None:
        self._tmp.cleanup()

    def run_cli(self, command: str, *extra: str, out: str = "out") -> int:
        argv = [command, *FAST, "--cache-dir", str(self.cache_dir)]
        argv += ["--out", str(self.tmp_dir / out), *extra]
        return main(argv)

    def test_parser_requires_a_command(self) -> None:
        self.assertEqual(main([]), 2)
        args = get_parser().parse_args(["symbols", "--eps", "0.1,0.05", "--p", "2"])
        self.assertEqual(args.eps, "0.1,0.05")
        self.assertEqual(args.p, 2.0)

    def test_invalid_grid_size(self) -> None:
        self.assertEqual(main(["kernel", "--n", "3", "--out", str(self.tmp_dir)]), 2)

    def test_kernel_cache_is_reproducible(self) -> None:
        self.assertEqual(self.run_cli("kernel"), 0)
        cache_file = self.cache_dir / cache_filename(16, 1e-8)
        first = cache_file.read_bytes()
        self.assertEqual(self.run_cli("kernel", "--force"), 0)
        self.assertEqual(cache_file.read_bytes(), first)

        profile = read_rows(self.tmp_dir / "out" / "kernel_profile_n16.csv")
        self.assertEqual(profile[0], ["k", "V", "V_over_sin53"])
        self.assertEqual(len(profile), 17)
        manifest = json.loads((self.tmp_dir / "out" / "manifest.json").read_text())
        self.assertIn("inputs", manifest)

    def test_corrupted_cache(self) -> None:
        self.assertEqual(self.run_cli("kernel"), 0)
        cache_file = self.cache_dir / cache_filename(16, 1e-8)
        blob = bytearray(cache_file.read_bytes())
        blob[100] ^= 0xFF
        cache_file.write_bytes(bytes(blob))
        self.assertEqual(self.run_cli("kappa"), 1)

    def test_symbols(self) -> None:
        self.assertEqual(self.run_cli("symbols", "--eps", "0.1,0.05", "--xi", "1.0"), 0)
        rows = read_rows(self.tmp_dir / "out" / "symbols.csv")
        self.assertEqual(rows[0][:3], ["eps", "p", "xi"])
        self.assertEqual(len(rows), 3)
        for row in rows[1:]:
            self.assertLess(float(row[3]), 0.0)
            self.assertEqual(float(row[4]), 0.0)

    def test_kappa_and_spectrum(self) -> None:
        self.assertEqual(self.run_cli("kappa"), 0)
        summary = dict(read_rows(self.tmp_dir / "out" / "kappa.csv")[1:])
        self.assertGreater(float(summary["kappa_eff"]), 0.0)
        self.assertEqual(self.run_cli("spectrum"), 0)
        eigenvalues = read_rows(self.tmp_dir / "out" / "spectrum_n16.csv")
        self.assertEqual(len(eigenvalues), 18)

    def test_simulation_is_deterministic(self) -> None:
        args = ["--eps", "0.5", "--modes", "8", "--box-length", "16"]
        args += ["--steps", "100", "--record-every", "50"]
        self.assertEqual(self.run_cli("simulate", *args, out="first"), 0)
        self.assertEqual(self.run_cli("simulate", *args, out="second"), 0)
        first = (self.tmp_dir / "first" / "trace_eps0.5.csv").read_bytes()
        second = (self.tmp_dir / "second" / "trace_eps0.5.csv").read_bytes()
        self.assertEqual(first, second)
        sweep = read_rows(self.tmp_dir / "first" / "sweep.csv")
        self.assertEqual(len(sweep), 2)

    def test_degenerate_table_is_rejected(self) -> None:
        grid = WaveGrid(16)
        empty = KernelTable(
            grid=grid, K=np.zeros((16, 16)), V=np.ones(16), v0=1.0, c1=1.0, c2=1.0,
            quad_tol=1e-8,
        )  # fmt: skip
        with mock.patch(
            "phonon_diffusion.service.experiments.obtain_table", return_value=empty
        ):
            self.assertEqual(self.run_cli("simulate", "--eps", "0.5", "--modes", "8"), 2)

    def test_verify_subset(self) -> None:
        self.assertEqual(self.run_cli("verify", "--only", "kappa"), 0)
        rows = read_rows(self.tmp_dir / "out" / "verify.csv")
        self.assertEqual(rows[0], ["criterion", "measured", "threshold", "pass"])
        self.assertTrue(all(row[3] == "true" for row in rows[1:]))
        self.assertEqual(self.run_cli("verify", "--only", "bogus"), 2)

    def test_verify_collision_rows(self) -> None:
        self.assertIn(self.run_cli("verify", "--only", "collision"), (0, 3))
        names = [row[0] for row in read_rows(self.tmp_dir / "out" / "verify.csv")[1:]]
        for name in (
            "collision.departure",
            "collision.conservation_order",
            "collision.extra_resonance_roots",
        ):
            self.assertIn(name, names)

    def test_config_file(self) -> None:
        config_path = self.tmp_dir / "run.cfg"
        config_path.write_text("# test run\nbogus = 1\n", encoding="utf-8")
        self.assertEqual(self.run_cli("kappa", "--config", str(config_path)), 2)
        self.assertEqual(self.run_cli("kappa", "--config", str(self.tmp_dir / "none")), 1)


if __name__ == "__main__":
    unittest.main()
