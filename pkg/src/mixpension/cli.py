"""Command-line front end.

Examples
--------
  mixpension --mu 0.04 --sigma 0.2 --alpha 1 --deficit 0.1 variant-a
  mixpension --p 0.5 --alpha 10 --deficit-euro 240 optimize
  mixpension --samples 100000 --seed 2024 --format json table 5
  mixpension --fixtures fixtures table 7
  mixpension --config run.cfg --sigma 0.1 variant-b

Exit codes: 0 success, 1 fixture regression failures, 2 invalid arguments or
configuration, 3 numerical non-convergence, 4 output I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Optional, Sequence

from .continuous_withdrawal import (
    CredibilityConstraint,
    credibility_prob,
    entire_loss,
    expected_debt,
    expected_retained,
    normalized_loss,
    optimal_barrier,
    profitability_check,
)
from .credit_variant_b import (
    CreditSchedule,
    alpha_star_expected_full_payback,
    annual_payback_benchmark,
    break_even_alpha,
    expected_fund_value,
    simulate_variant_b,
)
from .fund_model import FundParams
from .lump_sum import (
    BarrierPolicy,
    DeficitStep,
    barrier_expected_debt,
    barrier_expected_retained,
    barrier_payback_prob,
    expected_fund_after_forced_payback,
    expected_net_gain_vs_extra_investment,
    expected_pc_gain,
    expected_state_loss,
    full_payback_prob,
)
from .numerics import BracketError, DomainError, QuadratureError
from .strategy_compare import beta_curve, lump_sum_default_prob, recommend_strategy
from .tables import (
    EvaluationReport,
    TableArtifact,
    compare_table,
    emit,
    fixture_path,
    load_fixture,
    run_table,
)

COMMANDS = ("variant-a", "barrier", "variant-b", "continuous", "compare", "optimize", "table")

EXIT_OK, EXIT_REGRESSION, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass
class RunConfig:
    command: str = ""
    mu: float = 0.04
    sigma: float = 0.2
    alpha: float = 1.0
    b: float = 0.0
    p: float = 0.5
    t: float = 1.0
    c0: float = 1.0
    deficit: float = 0.1
    horizon: int = 10
    samples: int = 10_000
    seed: int = 2024
    format: str = "csv"
    output: Optional[str] = None
    lam: float = 0.85
    deficit_euro: Optional[float] = None
    target_loss: Optional[float] = None
    table_id: Optional[int] = None
    fixtures: Optional[str] = None

    @property
    def fund(self) -> FundParams:
        return FundParams(self.mu, self.sigma)


# key in the config file -> RunConfig attribute
FILE_KEYS = {
    "mu": "mu", "sigma": "sigma", "alpha": "alpha", "b": "b", "p": "p", "t": "t",
    "c0": "c0", "deficit": "deficit", "horizon": "horizon", "samples": "samples",
    "seed": "seed", "format": "format", "output": "output", "lambda": "lam",
    "deficit_euro": "deficit_euro", "target_loss": "target_loss",
}
_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(key: str, attr: str, raw: Any) -> Any:
    kind = _TYPES[attr]
    try:
        if "int" in kind:
            value = int(raw)
        elif "float" in kind:
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError
        else:
            value = str(raw)
    except (TypeError, ValueError):
        raise ConfigError(key, f"cannot interpret {raw!r} as {kind.replace('Optional[', '').rstrip(']')}") from None
    return value


def read_config_file(path: Path) -> dict[str, Any]:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    out: dict[str, Any] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("config", f"line {n} is not key=value")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in FILE_KEYS:
            raise ConfigError(key, "unknown configuration key")
        attr = FILE_KEYS[key]
        out[attr] = _convert(key, attr, raw)
    return out


def validate(cfg: RunConfig) -> RunConfig:
    def need(ok: bool, key: str, msg: str) -> None:
        if not ok:
            raise ConfigError(key, msg)

    need(math.isfinite(cfg.mu), "mu", "must be finite")
    need(cfg.sigma > 0, "sigma", "must be positive")
    need(cfg.alpha > 0, "alpha", "must be positive")
    need(cfg.b >= -1, "b", "must be >= -1")
    need(0 < cfg.p < 1, "p", "must lie strictly between 0 and 1")
    need(cfg.t > 0, "t", "must be positive")
    need(cfg.c0 > 0, "c0", "must be positive")
    need(cfg.deficit > 0, "deficit", "must be positive")
    need(cfg.horizon >= 1, "horizon", "must be at least 1")
    need(cfg.samples >= 1, "samples", "must be at least 1")
    need(0 <= cfg.seed < 2**64, "seed", "must be a 64-bit unsigned integer")
    need(cfg.format in ("csv", "json"), "format", "must be csv or json")
    need(cfg.lam >= 0, "lambda", "must be nonnegative")
    need(cfg.deficit_euro is None or cfg.deficit_euro > 0, "deficit_euro", "must be positive")
    need(cfg.target_loss is None or cfg.target_loss > 0, "target_loss", "must be positive")
    need(cfg.command in COMMANDS, "command", f"must be one of {', '.join(COMMANDS)}")
    if cfg.command == "table":
        need(cfg.table_id is not None and 1 <= cfg.table_id <= 10, "table", "id must be in 1..10")
    if cfg.command in ("continuous",):
        need(cfg.b > -1, "b", "must exceed -1 for continuous withdrawal")
    return cfg


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits 2 as well; keep the message terse
        raise ConfigError("usage", message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="mixpension", description="Evaluate debt-repayment strategies for a mixed pension scheme.")
    ap.add_argument("--config", type=Path, help="flat key=value file; flags override its values")
    ap.add_argument("--mu", type=str)
    ap.add_argument("--sigma", type=str)
    ap.add_argument("--alpha", type=str, help="investment multiplier (liquidity cap for optimize/compare)")
    ap.add_argument("--b", type=str, help="return barrier")
    ap.add_argument("--p", type=str, help="required repayment probability")
    ap.add_argument("--t", type=str, help="horizon in years")
    ap.add_argument("--c0", type=str)
    ap.add_argument("--deficit", type=str, help="C_j - C_0")
    ap.add_argument("--horizon", type=str, help="years of credit (variant-b)")
    ap.add_argument("--samples", type=str)
    ap.add_argument("--seed", type=str)
    ap.add_argument("--lambda", dest="lam", type=str, help="mean-variance weight")
    ap.add_argument("--target-loss", dest="target_loss", type=str, help="break-even search target (variant-b)")
    ap.add_argument("--deficit-euro", dest="deficit_euro", type=str, help="rescale normalized values to Euro")
    ap.add_argument("--format", type=str, choices=("csv", "json"))
    ap.add_argument("--output", "-o", type=str, help="output file (default stdout)")
    ap.add_argument("--fixtures", type=str, help="compare tables against reference fixtures in this directory")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("table_id", nargs="?", help="table id 1..10 for the table command")
    return ap


_FLAG_KEYS = {attr: key for key, attr in FILE_KEYS.items()}


def parse_config(argv: Sequence[str]) -> RunConfig:
    """Merge defaults, an optional config file and command-line flags."""
    ns = build_parser().parse_args(list(argv))
    values: dict[str, Any] = {}
    if ns.config is not None:
        values.update(read_config_file(ns.config))
    for attr in FILE_KEYS.values():
        raw = getattr(ns, attr, None)
        if raw is not None:
            values[attr] = _convert(_FLAG_KEYS[attr], attr, raw)
    cfg = RunConfig(command=ns.command, **values)
    if ns.table_id is not None:
        if ns.command != "table":
            raise ConfigError("table", f"unexpected argument {ns.table_id!r}")
        cfg.table_id = _convert("table", "table_id", ns.table_id)
    cfg.fixtures = ns.fixtures
    return validate(cfg)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _step(cfg: RunConfig) -> DeficitStep:
    return DeficitStep(cfg.c0, cfg.c0 + cfg.deficit)


def cmd_variant_a(cfg: RunConfig) -> EvaluationReport:
    fp, step, a = cfg.fund, _step(cfg), cfg.alpha
    values = {
        "P_full_payback": full_payback_prob(fp, a),
        "E_state_loss": expected_state_loss(fp, a, step),
        "E_pc_gain": expected_pc_gain(fp, a, step),
        "E_fund_forced_payback": expected_fund_after_forced_payback(fp, a, step),
        "E_net_gain_vs_extra": expected_net_gain_vs_extra_investment(fp, a, step),
    }
    return EvaluationReport("variant-a", values, metadata={"mu": cfg.mu, "sigma": cfg.sigma, "alpha": a, "deficit": cfg.deficit})


def cmd_barrier(cfg: RunConfig) -> EvaluationReport:
    fp, step = cfg.fund, _step(cfg)
    policy = BarrierPolicy(cfg.alpha, cfg.b)
    values: dict[str, Any] = {"P_full_repayment": barrier_payback_prob(fp, policy)}
    if cfg.b > -1:
        values["E_debt"] = barrier_expected_debt(fp, policy, step)
        values["E_retained"] = barrier_expected_retained(fp, policy, step)
    return EvaluationReport("barrier", values, metadata={"mu": cfg.mu, "sigma": cfg.sigma, "alpha": cfg.alpha, "b": cfg.b})


def cmd_variant_b(cfg: RunConfig) -> EvaluationReport:
    fp = cfg.fund
    schedule = CreditSchedule.constant(cfg.deficit, cfg.horizon, cfg.c0)
    res = simulate_variant_b(schedule, cfg.alpha, fp, cfg.samples, cfg.seed)
    values: dict[str, Any] = {
        "C_total": schedule.total,
        "alpha_star": alpha_star_expected_full_payback(schedule, fp),
        "E_F_T": expected_fund_value(schedule, cfg.alpha, schedule.horizon, fp),
        "mean_F_T": res.mean_fund,
        "P_shortfall": res.p_shortfall,
        "E_shortfall": res.e_shortfall,
        "E_final_net_fund": res.e_final_net_fund,
    }
    if cfg.target_loss is not None:
        a_b = break_even_alpha(schedule, fp, cfg.target_loss, cfg.samples, cfg.seed)
        values["alpha_break_even"] = a_b
        values["E_final_net_fund_at_break_even"] = simulate_variant_b(schedule, a_b, fp, cfg.samples, cfg.seed).e_final_net_fund
        bench = annual_payback_benchmark(schedule, fp, 0.9)
        values["alpha_annual_90"] = bench.alpha
        values["annual_90_total_expected_loss"] = bench.total_expected_loss
        values["annual_90_prob_any_loss"] = bench.prob_any_loss
    meta = {"mu": cfg.mu, "sigma": cfg.sigma, "alpha": cfg.alpha, "horizon": cfg.horizon, "seed": cfg.seed, "samples": cfg.samples}
    return EvaluationReport("variant-b", values, f"monte-carlo(seed={cfg.seed},samples={cfg.samples})", meta)


def cmd_continuous(cfg: RunConfig) -> EvaluationReport:
    fp, b, a, t = cfg.fund, cfg.b, cfg.alpha, cfg.t
    values = {
        "credibility_prob": credibility_prob(fp, b, a, t),
        "V": expected_retained(b, fp, t),
        "U": expected_debt(b, fp, t),
        "L": normalized_loss(b, a, fp, t),
        "L_e": entire_loss(b, a, fp, t),
        "profitable": profitability_check(b, a, fp, t),
    }
    return EvaluationReport("continuous", values, "quadrature", {"mu": cfg.mu, "sigma": cfg.sigma, "alpha": a, "b": b, "t": t})


def cmd_optimize(cfg: RunConfig) -> EvaluationReport:
    fp, t = cfg.fund, cfg.t
    sol = optimal_barrier(CredibilityConstraint(cfg.p, cfg.alpha, t), fp)
    values: dict[str, Any] = {
        "p_tilde": sol.p_tilde,
        "min_alpha": sol.min_alpha,
        "b_limit": sol.b_limit,
        "feasible": sol.feasible,
        "b_star": sol.b_star,
    }
    if sol.feasible:
        b = sol.b_star
        loss = normalized_loss(b, cfg.alpha, fp, t)
        u = expected_debt(b, fp, t)
        values.update({"L": loss, "L_e": entire_loss(b, cfg.alpha, fp, t), "U": u,
                       "credibility_prob": credibility_prob(fp, b, cfg.alpha, t)})
        if cfg.deficit_euro is not None:
            d = cfg.deficit_euro
            excess = d * (cfg.alpha * u - 1.0)
            values.update({
                "net_payment": d * (1.0 + loss),
                "pc_gain_vs_direct": -d * loss,
                "state_excess_return": excess,
                "total_expected_gain": -d * loss + excess,
            })
    meta = {"mu": cfg.mu, "sigma": cfg.sigma, "p": cfg.p, "alpha_cap": cfg.alpha, "t": t, "deficit_euro": cfg.deficit_euro}
    return EvaluationReport("optimize", values, "quadrature", meta)


def cmd_compare(cfg: RunConfig) -> EvaluationReport:
    fp, t, a = cfg.fund, cfg.t, cfg.alpha
    dec = recommend_strategy(t, a, cfg.p, fp)
    values: dict[str, Any] = {
        "strategy": dec.label.value,
        "L_d": dec.l_d,
        "L_c": dec.l_c,
        "Lambda": dec.lambda_gap,
        "b_star": dec.b_star,
        "default_prob_lump_sum": lump_sum_default_prob(t, a, fp),
        "beta": beta_curve(t, a, fp),
    }
    if dec.b_star is not None:
        values["L_c_with_surplus"] = dec.l_c - a * expected_debt(dec.b_star, fp, t) + 1.0
    if dec.note:
        values["note"] = dec.note
    return EvaluationReport("compare", values, "quadrature", {"mu": cfg.mu, "sigma": cfg.sigma, "alpha": a, "p": cfg.p, "t": t})


HANDLERS = {
    "variant-a": cmd_variant_a,
    "barrier": cmd_barrier,
    "variant-b": cmd_variant_b,
    "continuous": cmd_continuous,
    "optimize": cmd_optimize,
    "compare": cmd_compare,
}


def run(cfg: RunConfig):
    if cfg.command == "table":
        return run_table(cfg.table_id, cfg)
    return HANDLERS[cfg.command](cfg)


def _regression(cfg: RunConfig, out) -> int:
    ids = [cfg.table_id] if cfg.command == "table" else list(range(1, 11))
    failures = 0
    for tid in ids:
        path = fixture_path(Path(cfg.fixtures), tid)
        if not path.exists():
            continue
        checks = compare_table(run_table(tid, cfg), load_fixture(path))
        for c in checks:
            print(c.line(), file=out)
        failures += sum(not c.passed for c in checks)
    print(f"{failures} failing cell(s)", file=out)
    return EXIT_REGRESSION if failures else EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except (ConfigError, DomainError) as exc:
        print(f"mixpension: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if cfg.fixtures is not None:
            return _regression(cfg, sys.stdout)
        result = run(cfg)
        text = emit(result, cfg.format, Path(cfg.output) if cfg.output else None)
    except DomainError as exc:
        print(f"mixpension: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, BracketError) as exc:
        print(f"mixpension: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"mixpension: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    if not cfg.output:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
