"""Smoke test for the ga2d extension module.

Build and run from the repository root:

    cargo build --release -p ga2d-python
    python python/smoke.py target/release

The argument is the directory holding libga2d.so (ga2d.pyd on Windows).
"""

import importlib.util
import math
import pathlib
import shutil
import sys
import tempfile


def load(build_dir):
    build_dir = pathlib.Path(build_dir)
    for name in ("libga2d.so", "libga2d.dylib", "ga2d.pyd"):
        lib = build_dir / name
        if lib.exists():
            break
    else:
        sys.exit(f"no ga2d library in {build_dir}")
    # the import machinery wants the module name as the file stem
    tmp = pathlib.Path(tempfile.mkdtemp())
    target = tmp / ("ga2d.pyd" if lib.suffix == ".pyd" else "ga2d.so")
    shutil.copy(lib, target)
    spec = importlib.util.spec_from_file_location("ga2d", target)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def main():
    ga2d = load(sys.argv[1] if len(sys.argv) > 1 else "target/debug")
    print("ga2d", ga2d.__version__)
    assert "pair_braided" in ga2d.preset_names()

    system = ga2d.System.preset("single4_1x1").resized(60)
    assert ga2d.is_subradiant(system, 0)
    predicted = ga2d.steady_state_population(system, 0)
    assert abs(predicted - 1 / 1.04**2) < 1e-12

    run = ga2d.evolve(system, ga2d.State.bare(system, 0), dt=0.01, t_max=20.0, snapshot_times=[10.0])
    late = [p for t, p in zip(run.times, run.atom_populations[0]) if t >= 10.0]
    mean = sum(late) / len(late)
    print(f"plateau {mean:.5f} predicted {predicted:.5f}")
    assert abs(mean - predicted) / predicted < 0.02
    assert abs(run.final_state.norm() - 1.0) < 1e-9
    assert len(run.snapshots) == 1 and len(run.snapshots[0][1]) == 60 * 60

    small = ga2d.System(12, [(0.0, [(5, 6, 0.2), (6, 5, 0.2), (7, 6, 0.2), (6, 7, 0.2)])])
    start = ga2d.State.bare(small, 0)
    exact = ga2d.exact_evolve(small, start, [2.0])[0]
    stepped = ga2d.step(small, start, 0.005, 400)
    assert stepped.max_abs_diff(exact) < 1e-4

    alpha, field = ga2d.dressed_state(system, 0)
    assert abs(abs(alpha) ** 2 - 1 / 1.04) < 1e-10
    assert len(field) == len(ga2d.bic_support(system, 0)) == 1

    pair = ga2d.System.preset("pair_braided")
    assert ga2d.dfi_pairs(pair) == [(0, 1)]
    assert ga2d.dfi_pairs(ga2d.System.preset("pair_nested")) == []

    times = [0.1 * k for k in range(400)]
    values = [0.9 * math.cos(0.05 * t) ** 2 for t in times]
    fit = ga2d.fit_rabi(times, values, 0.0)
    assert abs(fit["z_r"] - 0.05) < 1e-6

    try:
        ga2d.System(10, [(0.0, [(1, 1, 0.1)]), (0.0, [(1, 1, 0.1)])])
    except ValueError as err:
        assert "multiple atoms" in str(err)
    else:
        raise AssertionError("shared cavity accepted")
    print("smoke test passed")


if __name__ == "__main__":
    main()
