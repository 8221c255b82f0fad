"""Command-line front door: runs the experiments end to end and writes the
CSV files the plotting frontend consumes.

Every output file starts with a one-line schema comment
``# experiment=<name> schema=v1 seed=<seed>``; all randomness is derived
from ``--seed``, so repeated runs are byte-identical.

Exit codes: 0 success, 2 usage error, 3 guard violation.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import engine, ergotropy, haar, search
from .engine import IllegalMoveError
from .core import (
    BlockUnitary,
    GuardError,
    Register,
    apply_block_unitary,
    bell_state,
    energy_expectation,
    ghz_state,
    product_plus_state,
    state_preparation_unitary,
)

SCHEMA = "v1"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_GUARD = 3


class UsageError(ValueError):
    pass


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: Path, experiment: str, seed: int, columns, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# experiment={experiment} schema={SCHEMA} seed={seed}"]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def _parse_int_list(text: str) -> list[int]:
    """Accept '4', '2,3,5', or a range '2-8'."""
    values: list[int] = []
    for piece in text.split(","):
        piece = piece.strip()
        if "-" in piece[1:]:
            lo, hi = piece.split("-", 1)
            values.extend(range(int(lo), int(hi) + 1))
        else:
            values.append(int(piece))
    if not values:
        raise UsageError(f"empty integer list: {text!r}")
    return values


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------


def run_fig2a(args) -> int:
    rows = []
    for n_b in _parse_int_list(args.nb):
        for m in range(0, n_b + 1):
            energy = engine.closed_form_min_energy(n_b, m)
            rows.append((n_b, m, m / n_b, energy / (n_b + m)))
    out = write_csv(
        Path(args.out) / "fig2a.csv",
        "fig2a",
        args.seed,
        ("N_B", "M", "M_over_NB", "energy_per_site"),
        rows,
    )
    print(f"fig2a: {len(rows)} rows -> {out}")
    return EXIT_OK


def _searched_rows(args):
    n_values = _parse_int_list(args.n)
    nb_values = _parse_int_list(args.nb) if args.nb else None
    cache = Path(args.out) / "cache"
    return search.fig2bc_min_energies(
        n_values,
        nb_values=nb_values,
        cache_dir=cache,
        restarts=args.restarts,
        seed=args.seed,
    )


def run_fig2b(args) -> int:
    rows = _searched_rows(args)
    out = write_csv(
        Path(args.out) / "fig2b.csv",
        "fig2b",
        args.seed,
        ("N", "N_B", "M", "M_over_NB", "energy_per_site"),
        [
            (r["n"], r["n_b"], r["m"], r["m_over_nb"], r["energy_per_site"])
            for r in rows
        ],
    )
    print(f"fig2b: {len(rows)} rows -> {out}")
    return EXIT_OK


def run_fig2c(args) -> int:
    rows = _searched_rows(args)
    out = write_csv(
        Path(args.out) / "fig2c.csv",
        "fig2c",
        args.seed,
        ("N", "N_B", "M", "M_over_NB", "energy_per_site"),
        [
            (r["n"], r["n_b"], r["m"], r["m_over_nb"], r["energy_per_site"])
            for r in rows
        ],
    )
    print(f"fig2c: {len(rows)} rows -> {out}")
    return EXIT_OK


def run_haar_stats(args) -> int:
    report = haar.haar_entropy_statistics(
        args.samples, seed=args.seed, n_sites=args.n
    )
    rows = [(i, e) for i, e in enumerate(report.per_sample)]
    out = write_csv(
        Path(args.out) / "haar_stats.csv",
        "haar-stats",
        args.seed,
        ("sample_index", "mean_entropy"),
        rows,
    )
    print(
        f"haar-stats: {report.samples} samples, mean={report.mean:.4f} "
        f"std={report.std:.4f} max={report.max:.4f} -> {out}"
    )
    return EXIT_OK


def run_ergotropy_sweep(args) -> int:
    rows = ergotropy.ergotropy_sweep(grid_points=args.grid_points)
    out = write_csv(
        Path(args.out) / "ergotropy_sweep.csv",
        "ergotropy-sweep",
        args.seed,
        ("p_2", "single_site", "oracle_per_site", "closed_form", "branch"),
        [
            (r.p2, r.single_site, r.oracle_per_site, r.closed_form, r.branch)
            for r in rows
        ],
    )
    report_path = Path(args.out) / "ergotropy_reconciliation.txt"
    report_path.write_text(ergotropy.reconciliation_report(rows) + "\n")
    print(f"ergotropy-sweep: {len(rows)} rows -> {out}, report -> {report_path}")
    return EXIT_OK


def run_ame_search(args) -> int:
    rows = []
    cache = Path(args.out) / "cache"
    for n in _parse_int_list(args.n):
        result = search.cached_search(
            cache, n, ansatz=args.ansatz, restarts=args.restarts, seed=args.seed
        )
        rows.append((n, result.ansatz, args.seed, result.mean_entropy, n // 2))
        print(
            f"ame-search: N={n} ansatz={result.ansatz} "
            f"mean_entropy={result.mean_entropy:.6f} (ceiling {n // 2})"
        )
    out = write_csv(
        Path(args.out) / "ame_search.csv",
        "ame-search",
        args.seed,
        ("N", "ansatz", "seed", "mean_entropy", "ceiling"),
        rows,
    )
    print(f"ame-search: cache in {cache}, summary -> {out}")
    return EXIT_OK


def run_appendix_n3(args) -> int:
    reg = Register.qubits(3)
    psi0 = product_plus_state(reg)
    rows = []
    for lam1 in np.linspace(0.5, 1.0, args.points):
        target = np.zeros(8, dtype=complex)
        target[0] = np.sqrt(lam1)
        target[7] = np.sqrt(1.0 - lam1)
        prep = BlockUnitary(
            sites=(1, 2, 3),
            matrix=state_preparation_unitary(psi0.amplitudes, target),
        )
        outcome = engine.play_sequential_game(
            engine.GameConfig(n_sites=3, n_a=3, n_b=2),
            [prep],
            engine.BestResponse(),
        )
        rows.append((float(lam1), outcome.energy, -4.0 * float(lam1) + 1.0))
    out = write_csv(
        Path(args.out) / "appendix_n3.csv",
        "appendix-n3",
        args.seed,
        ("lambda_1", "energy", "closed_form"),
        rows,
    )
    print(f"appendix-n3: {len(rows)} rows -> {out}")
    return EXIT_OK


def run_qudit_defence(args) -> int:
    spec = ergotropy.QuditSpec(p0=0.5, p1=0.25, p2=0.0)
    ascent = ergotropy.entropy_ascent_two_qudits(spec, seed=args.seed)
    defence = ergotropy.perfect_defence_check(trials=args.trials, seed=args.seed)
    rows = [
        ("ascent_entropy_base5", ascent.entropy),
        ("ascent_iterations", ascent.iterations),
        ("defence_trials", defence.trials),
        ("defence_max_abs_energy_change", defence.max_abs_change),
    ]
    out = write_csv(
        Path(args.out) / "qudit_defence.csv",
        "qudit-defence",
        args.seed,
        ("quantity", "value"),
        rows,
    )
    print(
        f"qudit-defence: ascent entropy {ascent.entropy:.6f}, defence max "
        f"change {defence.max_abs_change:.2e} -> {out}"
    )
    return EXIT_OK


def run_classical_demo(args) -> int:
    rows = []
    for n in range(1, args.n + 1):
        if not engine.classical_second_mover_check(n):
            raise AssertionError(f"second-mover extremes not reached at N={n}")
        for order in ("AB", "BA"):
            oc = engine.classical_baseline(n, order)
            rows.append((n, order, oc.second_player, oc.energy))
    out = write_csv(
        Path(args.out) / "classical_demo.csv",
        "classical-demo",
        args.seed,
        ("N", "order", "second_player", "energy"),
        rows,
    )
    print(
        f"classical-demo: second mover reaches +-N for every N <= {args.n} "
        f"-> {out}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# Scripted games
# ---------------------------------------------------------------------------


def _move_unitary(sites: tuple[int, ...], kind: str, rest: list[str]):
    dim = 2 ** len(sites)
    if kind == "identity":
        return np.eye(dim, dtype=complex)
    if kind == "bell":
        if len(sites) != 2:
            raise UsageError("bell acts on exactly 2 sites")
        start = product_plus_state(Register.qubits(2)).amplitudes
        return state_preparation_unitary(start, bell_state().amplitudes)
    if kind == "ghz":
        if len(sites) < 2:
            raise UsageError("ghz needs at least 2 sites")
        start = product_plus_state(Register.qubits(len(sites))).amplitudes
        return state_preparation_unitary(
            start, ghz_state(len(sites)).amplitudes
        )
    if kind.startswith("haar:"):
        sub = int(kind.split(":", 1)[1])
        return haar.sample_haar_unitary(dim, haar.subseed_rng(sub, 0))
    if kind == "matrix":
        if not rest:
            raise UsageError("matrix needs entries: rows ';'-separated")
        entries = [
            [complex(x) for x in row.split(",")]
            for row in " ".join(rest).split(";")
        ]
        return np.array(entries, dtype=complex)
    raise UsageError(f"unknown move constructor {kind!r}")


def parse_move_file(path: Path):
    """One move per line: PLAYER SITES CONSTRUCTOR [ARGS].

    PLAYER is A or B; SITES is comma-separated 1-based indices;
    CONSTRUCTOR is identity | bell | ghz | haar:SEED | matrix R;R;...
    (rows ';'-separated, entries ','-separated complex literals).
    A final line ``PLAYER best`` hands that player's whole move to the
    built-in best-response policy (A maximizes, B minimizes).
    """
    moves = []
    policy = None
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        player = parts[0].upper()
        if player not in ("A", "B"):
            raise UsageError(f"{path}:{lineno}: player must be A or B")
        if len(parts) == 2 and parts[1] == "best":
            policy = player
            continue
        if policy is not None:
            raise UsageError(f"{path}:{lineno}: 'best' must be the last line")
        if len(parts) < 3:
            raise UsageError(f"{path}:{lineno}: need PLAYER SITES CONSTRUCTOR")
        sites = tuple(int(s) for s in parts[1].split(","))
        matrix = _move_unitary(sites, parts[2], parts[3:])
        moves.append((player, BlockUnitary(sites=sites, matrix=matrix)))
    if not moves and policy is None:
        raise UsageError(f"{path}: no moves found")
    return moves, policy


def run_play(args) -> int:
    moves, policy = parse_move_file(Path(args.moves))
    players = [p for p, _ in moves]
    first = players[0] if players else ("A" if policy == "B" else "B")
    if any(
        players[i] == first and players[i - 1] != first
        for i in range(1, len(moves))
    ):
        raise UsageError("each player's move lines must be contiguous")
    if policy is not None and policy == first:
        raise UsageError("the first mover cannot use the best-response policy")
    config = engine.GameConfig(
        n_sites=args.n, n_a=args.na or args.n, n_b=args.nb or args.n
    )
    state = product_plus_state(Register.qubits(args.n))
    rows = []
    for idx, (player, bu) in enumerate(moves):
        engine._validate_move([bu], config.capability(player), args.n, player)
        state = apply_block_unitary(state, bu)
        energy = energy_expectation(state)
        rows.append((idx, player, "+".join(map(str, bu.sites)), energy))
    if policy is not None:
        objective = "max" if policy == "A" else "min"
        solved = engine.best_response_energy(
            state,
            config.capability(policy),
            objective,
            include_unitaries=True,
        )
        for bu in solved.responder_unitaries:
            state = apply_block_unitary(state, bu)
        energy = energy_expectation(state)
        rows.append((len(rows), policy, "best", energy))
    out = write_csv(
        Path(args.out) / "play.csv",
        "play",
        args.seed,
        ("move_index", "player", "sites", "energy_after"),
        rows,
    )
    print(f"play: final energy {rows[-1][3]!r} -> {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qgame",
        description="Zero-sum unitary game experiments",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default="out")

    p = sub.add_parser("fig2a", help="closed-form minimum-energy curves")
    common(p)
    p.add_argument("--nb", default="5,10,15,20")
    p.set_defaults(func=run_fig2a)

    for name, fn in (("fig2b", run_fig2b), ("fig2c", run_fig2c)):
        p = sub.add_parser(name, help="search-based minimum energies")
        common(p)
        p.add_argument("--n", default="2-8")
        p.add_argument("--nb", default=None)
        p.add_argument("--restarts", type=int, default=32)
        p.set_defaults(func=fn)

    p = sub.add_parser("haar-stats", help="random-defence entropy statistics")
    common(p)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--n", type=int, default=4)
    p.set_defaults(func=run_haar_stats)

    p = sub.add_parser("ergotropy-sweep", help="five-level work extraction sweep")
    common(p)
    p.add_argument("--grid-points", type=int, default=25)
    p.set_defaults(func=run_ergotropy_sweep)

    p = sub.add_parser("ame-search", help="max mean-entropy state search")
    common(p)
    p.add_argument("--n", default="4")
    p.add_argument("--ansatz", default=None, choices=("generic", "symmetric4"))
    p.add_argument("--restarts", type=int, default=32)
    p.set_defaults(func=run_ame_search)

    p = sub.add_parser("appendix-n3", help="three-qubit Schmidt-weight sweep")
    common(p)
    p.add_argument("--points", type=int, default=11)
    p.set_defaults(func=run_appendix_n3)

    p = sub.add_parser("play", help="scripted game from a move file")
    common(p)
    p.add_argument("--moves", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--na", type=int, default=None)
    p.add_argument("--nb", type=int, default=None)
    p.set_defaults(func=run_play)

    p = sub.add_parser(
        "qudit-defence", help="five-level pair: entropy ascent and defence"
    )
    common(p)
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=run_qudit_defence)

    p = sub.add_parser("classical-demo", help="classical bit-flip baseline")
    common(p)
    p.add_argument("--n", type=int, default=8)
    p.set_defaults(func=run_classical_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GuardError as exc:
        print(f"guard violation: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (UsageError, IllegalMoveError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
