from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field

PASS, FAIL, MISMATCH = "PASS", "FAIL", "MISMATCH"


@dataclass
class CheckResult:
    check_id: str
    inputs: dict
    verdict: str
    detail: str = ""
    wall_time: float = 0.0
    data: dict = field(default_factory=dict)
    # name -> (header, rows); written as CSV, kept out of the JSON report
    tables: dict = field(default_factory=dict, repr=False)

    def to_dict(self, with_time: bool = False) -> dict:
        d = {"check": self.check_id, "inputs": self.inputs, "verdict": self.verdict,
             "detail": self.detail}
        if self.data:
            d["data"] = self.data
        if with_time:
            d["wall_time"] = round(self.wall_time, 3)
        return d


@dataclass
class Report:
    results: list[CheckResult] = field(default_factory=list)
    strict_heun: bool = False

    def add(self, result: CheckResult) -> CheckResult:
        self.results.append(result)
        return result

    def failed(self) -> list[CheckResult]:
        bad = [r for r in self.results if r.verdict == FAIL]
        if self.strict_heun:
            bad += [r for r in self.results if r.verdict == MISMATCH]
        return bad

    @property
    def exit_code(self) -> int:
        return 1 if self.failed() else 0

    def summary_lines(self, with_time: bool = True) -> list[str]:
        lines = []
        for r in self.results:
            t = f" [{r.wall_time:.2f}s]" if with_time else ""
            lines.append(f"{r.verdict:8s} {r.check_id}{t}  {r.detail}".rstrip())
        counts = {v: sum(r.verdict == v for r in self.results) for v in (PASS, FAIL, MISMATCH)}
        lines.append("  ".join(f"{k}={v}" for k, v in counts.items()))
        return lines

    def to_dict(self) -> dict:
        # wall times are left out so that reruns produce identical files
        return {"checks": [r.to_dict() for r in self.results],
                "exit_code": self.exit_code,
                "strict_heun": self.strict_heun}


@contextmanager
def timed(result_holder: dict):
    start = time.perf_counter()
    try:
        yield
    finally:
        result_holder["wall_time"] = time.perf_counter() - start
