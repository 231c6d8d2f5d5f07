"""Seeded batch verification: generate or load instances, solve, evaluate every bound.

Each trial ``t`` derives its own streams from ``SeedSequence([seed, t])``, so a
report depends only on the configuration and trials can be evaluated in any
order.  The right-hand sides use noise level ``noise * NOISE_CYCLE[t % 4]``;
the last level is zero, which makes every fourth generated system consistent.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, bounds, geometry, sketch
from .dense import SchattenOrder, full_qr, pinv
from .errors import ConfigError, NotApplicable
from .matrixio import read_matrix
from .mmlr import MmlrProblem, solve_exact, solve_sketched

SKETCH_CHOICES = {
    "without": sketch.WITHOUT_REPLACEMENT,
    "with": sketch.WITH_REPLACEMENT,
    "gaussian": sketch.GAUSSIAN,
    "file": sketch.USER_SUPPLIED,
}
NOISE_CYCLE = (1.0, 1e-1, 1e-3, 0.0)
DEFAULT_P = ("1", "2", "inf")


@dataclass
class ExperimentConfig:
    m: int = 200
    n: int = 10
    d: int = 5
    c: int = 60
    sketch_kind: str = "gaussian"
    seed: int = 0
    trials: int = 1
    p_list: list = field(default_factory=lambda: [SchattenOrder.coerce(p) for p in DEFAULT_P])
    rank_tol: float | None = None
    angle_tol: float = geometry.DEFAULT_ANGLE_TOL
    slack_tol: float = bounds.SLACK_TOL
    identity_tol: float = bounds.IDENTITY_TOL
    noise: float = 1.0
    a_path: str | None = None
    b_path: str | None = None
    s_path: str | None = None

    def validate(self):
        if self.sketch_kind not in SKETCH_CHOICES:
            raise ConfigError(f"sketch: unknown kind {self.sketch_kind!r}; "
                              f"choose from {sorted(SKETCH_CHOICES)}")
        if (self.a_path is None) != (self.b_path is None):
            raise ConfigError("a/b: give both matrix files or neither")
        if self.sketch_kind == "file" and self.s_path is None:
            raise ConfigError("s: --sketch file needs a sketch matrix file")
        if self.a_path is None:
            for name in ("m", "n", "d"):
                if getattr(self, name) < 1:
                    raise ConfigError(f"{name}: must be positive, got {getattr(self, name)}")
            if self.n > self.m:
                raise ConfigError(f"n: need n <= m, got n={self.n}, m={self.m}")
        if self.sketch_kind != "file" and self.a_path is None:
            if not self.n <= self.c <= self.m:
                raise ConfigError(f"c: need n <= c <= m, got n={self.n}, c={self.c}, m={self.m}")
        if self.trials < 1:
            raise ConfigError(f"trials: must be >= 1, got {self.trials}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed: must be a 64-bit unsigned integer")
        if not self.p_list:
            raise ConfigError("p: need at least one Schatten order")
        for name in ("angle_tol", "slack_tol", "identity_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name}: must be positive")
        if self.rank_tol is not None and not self.rank_tol > 0:
            raise ConfigError("rank_tol: must be positive")
        if not self.angle_tol < math.pi / 4:
            raise ConfigError("angle_tol: must be below pi/4")
        if self.noise < 0:
            raise ConfigError("noise: must be nonnegative")
        return self

    def to_dict(self):
        out = asdict(self)
        out["p_list"] = [str(p) for p in self.p_list]
        return out


def trial_streams(seed, trial):
    """``(problem_rng, sketch_seed)`` for one trial."""
    ss = np.random.SeedSequence([seed, trial])
    problem_ss, sketch_ss = ss.spawn(2)
    sketch_seed = int(sketch_ss.generate_state(1, dtype=np.uint64)[0])
    return np.random.default_rng(problem_ss), sketch_seed


def generate_problem(rng, m, n, d, noise, rank_tol=None):
    """``A`` standard normal, ``B = A X0 + noise * N``."""
    a = rng.standard_normal((m, n))
    x0 = rng.standard_normal((n, d))
    b = a @ x0 + noise * rng.standard_normal((m, d))
    return MmlrProblem(a, b, rank_tol)


def evaluate(problem, s, p_list, slack_tol=bounds.SLACK_TOL, identity_tol=bounds.IDENTITY_TOL):
    """Every report for one instance, in a fixed order."""
    exact = solve_exact(problem)
    sk = solve_sketched(problem, s)
    fq = full_qr(problem.a, problem.rank_tol)
    reports = bounds.eval_general_bounds(problem, exact, sk, list(p_list), slack_tol)
    try:
        reports += bounds.eval_rank_preserving_bound(problem, exact, sk, list(p_list),
                                                     slack_tol, fq=fq)
    except NotApplicable:
        meta = bounds.instance_metadata(problem, s)
        for p in p_list:
            rep = bounds.bound_report("P4.1", 0.0, 0.0, p, slack_tol, applicable=False,
                                      metadata=meta)
            reports.append(rep)
    if problem.d == 1:
        reports.append(bounds.eval_drineas_comparison(problem, exact, sk, slack_tol=slack_tol,
                                                      fq=fq))
    reports += bounds.eval_identity_checks(problem, s, identity_tol, fq=fq)

    # the submultiplicativity step behind the absolute bound: A^+ (P - P_A) B
    diff = geometry.oblique_projector(problem.a, s, problem.rank_tol) - fq.q @ fq.q.T
    reports += bounds.eval_lemma21(pinv(problem.a, problem.rank_tol), diff, problem.b,
                                   list(p_list), slack_tol)
    return exact, sk, reports


def summarize(trials):
    per = {}
    preserved = 0
    for t in trials:
        preserved += bool(t["instance"]["rank_preserved"])
        for r in t["reports"]:
            entry = per.setdefault(r["proposition_id"], {
                "evaluated": 0, "applicable": 0, "holds": 0, "failed": 0, "max_abs_slack": 0.0,
            })
            entry["evaluated"] += 1
            if not r["applicable"]:
                continue
            entry["applicable"] += 1
            if r["holds"]:
                entry["holds"] += 1
            else:
                entry["failed"] += 1
            slack = r["slack"]
            if isinstance(slack, str):
                entry["max_abs_slack"] = "inf"
            elif entry["max_abs_slack"] != "inf":
                entry["max_abs_slack"] = max(entry["max_abs_slack"], abs(slack))
    failed = sum(e["failed"] for e in per.values())
    return {
        "propositions": {k: per[k] for k in bounds.PROPOSITIONS if k in per},
        "trials": len(trials),
        "rank_preservation_rate": preserved / len(trials) if trials else 0.0,
        "failed_reports": failed,
        "all_hold": failed == 0,
    }


def _load_fixed(cfg):
    a = b = s_mat = None
    if cfg.a_path is not None:
        a = read_matrix(cfg.a_path)
        b = read_matrix(cfg.b_path)
    if cfg.sketch_kind == "file":
        s_mat = read_matrix(cfg.s_path)
    return a, b, s_mat


def run_trial(cfg, t, fixed):
    a, b, s_mat = fixed
    rng, sketch_seed = trial_streams(cfg.seed, t)
    if a is not None:
        problem = MmlrProblem(a, b, cfg.rank_tol)
        noise = None
    else:
        noise = cfg.noise * NOISE_CYCLE[t % len(NOISE_CYCLE)]
        problem = generate_problem(rng, cfg.m, cfg.n, cfg.d, noise, cfg.rank_tol)
    if s_mat is not None:
        s = sketch.from_matrix(s_mat, problem.n)
    else:
        s = sketch.make(SKETCH_CHOICES[cfg.sketch_kind], problem.m, cfg.c, problem.n,
                        sketch_seed)
    _, sk, reports = evaluate(problem, s, cfg.p_list, cfg.slack_tol, cfg.identity_tol)
    instance = bounds.instance_metadata(problem, s)
    instance.update({"noise": noise, "rank_preserved": bool(sk.rank_preserved)})
    return {"trial": t, "instance": instance, "reports": [r.to_dict() for r in reports]}


def cmd_verify(cfg):
    """Run all trials and return the RunReport dictionary."""
    cfg.validate()
    start = time.perf_counter()
    fixed = _load_fixed(cfg)
    trials = [run_trial(cfg, t, fixed) for t in range(cfg.trials)]
    return {
        "artifact": {"name": "mmlrsketch", "version": __version__},
        "command": "verify",
        "config": cfg.to_dict(),
        "trials": trials,
        "summary": summarize(trials),
        "timing": {"seconds": time.perf_counter() - start},
    }


def dumps(report):
    """Stable JSON: sorted keys, fixed indentation, no NaN/Infinity literals."""
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def summary_csv(report):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["proposition_id", "evaluated", "applicable", "holds", "failed",
                     "max_abs_slack"])
    for pid, e in report["summary"]["propositions"].items():
        writer.writerow([pid, e["evaluated"], e["applicable"], e["holds"], e["failed"],
                         e["max_abs_slack"]])
    return buf.getvalue()
