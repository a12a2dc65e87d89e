#!/usr/bin/env python3
"""Smoke test for the jssp_py extension module.

Builds nothing itself: run `cargo build -p jssp-py` first, then
`python3 python/smoke_test.py`. The script copies the cdylib next to a
temp dir under the name Python expects and imports it from there.
"""

import shutil
import sys
import tempfile
from pathlib import Path


def load_module():
    root = Path(__file__).resolve().parent.parent
    candidates = [
        root / "target" / profile / name
        for profile in ("debug", "release")
        for name in ("libjssp_py.so", "jssp_py.so", "libjssp_py.dylib")
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("cdylib not found; run `cargo build -p jssp-py` first")
    staging = Path(tempfile.mkdtemp(prefix="jssp_py_"))
    shutil.copy2(built, staging / "jssp_py.so")
    sys.path.insert(0, str(staging))
    import jssp_py

    return jssp_py


def main():
    jssp_py = load_module()
    print(f"jssp_py {jssp_py.__version__}")

    inst = jssp_py.Instance.generate(3, 3, dur_min=1, dur_max=99, seed=42)
    assert inst.num_jobs == 3 and inst.num_machines == 3
    assert inst.total_ops() == 9

    matrix = inst.to_matrix()
    back, label = jssp_py.Instance.from_matrix(matrix)
    assert back == inst and label is None

    for style in ("job", "machine"):
        text = inst.to_problem_text(style=style)
        assert jssp_py.Instance.from_problem_text(text) == inst

    outcome = jssp_py.solve(inst, time_limit=30.0, exact=True)
    assert outcome.proven_optimal
    assert outcome.makespan >= inst.lower_bound()
    assert outcome.makespan == jssp_py.oracle_makespan(inst)
    print(f"solved: {outcome!r} in {outcome.elapsed:.3f}s")

    solution = outcome.to_text(inst)
    report = jssp_py.validate_solution(inst, solution)
    assert report["feasible"] and report["computed_makespan"] == outcome.makespan
    assert report["violations"] == []

    garbage_report = jssp_py.validate_solution(inst, "just work faster")
    assert not garbage_report["feasible"]
    assert len(garbage_report["violations"]) == inst.total_ops()

    parsed = jssp_py.parse_solution(solution)
    assert len(parsed["ops"]) == inst.total_ops()
    assert parsed["claimed_makespan"] == float(outcome.makespan)

    selection = jssp_py.select_best(inst, ["nonsense", solution])
    assert selection["best"]["index"] == 1
    assert selection["best"]["makespan"] == outcome.makespan
    assert selection["n_feasible"] == 1

    stats = jssp_py.summarize_gaps([0.0, 10.0])
    assert stats["mean"] == 5.0 and stats["p50"] == 5.0

    assert jssp_py.gap_percent(60.0, 55.0) == (60.0 - 55.0) / 55.0 * 100.0

    record = jssp_py.chat_record(inst, outcome, style="machine", prompt_variant=0)
    assert record["system"] == jssp_py.system_prompt()
    assert record["user"].startswith(jssp_py.prompt_variants()[0])
    assert record["assistant"] == solution

    print("smoke test passed")


if __name__ == "__main__":
    main()
