"""Command-line entry point: ``hyperdist <subcommand> ...``.

Every output starts with metadata (a ``# hyperdist {...}`` line for text and
CSV, a ``meta`` key for JSON) recording the command, its parameters, the seed
and SHA-256 digests of the inputs. Failures print a JSON object on stderr and
exit with 2 (usage), 3 (data) or 4 (numerical).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import analysis, io, metrics, sensitivity, streaming, trajectories
from .errors import HyperdistError
from .geometry import PointSet, embed

STOCHASTIC = {"coreset", "stream-sample", "cluster", "uncertain-sample"}
DEFAULT_SEED = 0


class UsageError(Exception):
    exit_code = 2


class NumericalError(Exception):
    exit_code = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    params: dict
    seed: int | None = None
    inputs: dict = field(default_factory=dict)

    def meta(self) -> dict:
        m = {"command": self.command, "params": self.params, "inputs": self.inputs, "version": __version__}
        if self.seed is not None:
            m["seed"] = self.seed
        return m


def threads() -> int:
    try:
        return max(1, int(os.environ.get("HYPERDIST_THREADS", "1")))
    except ValueError:
        return 1


class _Ctx:
    """Reads inputs while recording their digests."""

    def __init__(self, args):
        self.args = args
        self.inputs: dict[str, str] = {}

    def text(self, path) -> str:
        t = io.read_text(path)
        self.inputs[str(path)] = io.digest(t)
        return t

    def points(self, path, weights=False) -> PointSet:
        return io.points_from_text(self.text(path), weights, str(path))

    def json(self, path):
        t = self.text(path)
        try:
            return json.loads(t)
        except json.JSONDecodeError as exc:
            raise io.DataError(f"{path}: invalid JSON ({exc.msg})", str(path)) from exc

    def hyperplane(self, path, oriented=None):
        obj = self.json(path)
        try:
            return io.hyperplane_from_obj(obj, oriented)
        except (KeyError, TypeError) as exc:
            raise io.DataError(f"{path}: not a hyperplane: {exc}", str(path)) from exc

    def hyperplanes(self, path):
        obj = self.json(path)
        try:
            if isinstance(obj, dict) and "lines" in obj:
                obj = obj["lines"]
            if isinstance(obj, dict) or (obj and not isinstance(obj[0], (list, dict))):
                obj = [obj]
            return [io.hyperplane_from_obj(o) for o in obj]
        except (KeyError, TypeError, IndexError) as exc:
            raise io.DataError(f"{path}: not a hyperplane list: {exc}", str(path)) from exc

    def curve(self, path):
        obj = self.json(path)
        try:
            return io.curve_from_obj(obj)
        except (KeyError, TypeError) as exc:
            raise io.DataError(f"{path}: not a curve: {exc}", str(path)) from exc

    def curves(self, path):
        obj = self.json(path)
        if isinstance(obj, dict) and "curves" in obj:
            obj = obj["curves"]
        try:
            return [io.curve_from_obj(o) for o in obj]
        except (KeyError, TypeError) as exc:
            raise io.DataError(f"{path}: not a curve list: {exc}", str(path)) from exc

    def config(self, params: dict, seed=None) -> RunConfig:
        return RunConfig(self.args.command, params, seed, dict(sorted(self.inputs.items())))


def _emit(text: str, out) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _scalar(cfg: RunConfig, value: float) -> str:
    return io.meta_line(cfg.meta()) + "\n" + io.fmt(value) + "\n"


def _json(cfg: RunConfig, payload: dict) -> str:
    return io.json_dump({"meta": cfg.meta(), **payload})


# -- subcommands ------------------------------------------------------------

def cmd_dist(a, ctx):
    Q = ctx.points(a.points, a.weights)
    oriented = True if a.oriented else None
    h1, h2 = ctx.hyperplane(a.h1, oriented), ctx.hyperplane(a.h2, oriented)
    fn = {"signed": metrics.dist, "unsigned": metrics.dist_unsigned, "frobenius": metrics.dist_frobenius}
    if a.weights and a.variant == "signed":
        value = metrics.dist_weighted(Q, h1, h2)
    else:
        value = fn[a.variant](Q, h1, h2)
    cfg = ctx.config({"variant": a.variant, "weights": a.weights, "metric_status": metrics.metric_status(Q)})
    return _scalar(cfg, value)


def cmd_sensitivity(a, ctx):
    Q = ctx.points(a.points, a.weights)
    sigma = sensitivity.sensitivities(Q)
    cfg = ctx.config({"weights": a.weights, "n": Q.n, "d": Q.d})
    return io.csv_table(["index", "sensitivity"], [(i, float(s)) for i, s in enumerate(sigma)], cfg.meta())


def cmd_coreset(a, ctx):
    Q = ctx.points(a.points, a.weights)
    N = a.n if a.n is not None else sensitivity.sample_size(Q.d, a.eps, a.delta)
    cs = sensitivity.sensitivity_sample(Q, N, a.seed)
    cfg = ctx.config({"N": N, "n": Q.n, "d": Q.d, "weights": a.weights}, a.seed)
    rows = [(int(i), float(w)) for i, w in zip(cs.indices, cs.weights)]
    return io.csv_table(["index", "weight"], rows, cfg.meta())


def cmd_stream_sample(a, ctx):
    seeds = np.random.SeedSequence(a.seed).spawn(a.runs)
    sketches = None
    consumed = []
    header_done = False
    for line in sys.stdin:
        consumed.append(line)
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        fields = [f.strip() for f in s.split(",")]
        try:
            x = np.array([float(f) for f in fields])
        except ValueError:
            if not header_done and sketches is None:
                header_done = True
                continue
            raise io.DataError(f"<stdin>: non-numeric row: {s}", "<stdin>")
        if a.weights:
            x = x[:-1]
        if sketches is None:
            sketches = [streaming.Sketch(len(x), a.eps, a.delta, sq, a.c) for sq in seeds]
        row = np.append(x, 1.0)
        for sk in sketches:
            sk.offer(row)
    if sketches is None:
        raise io.DataError("<stdin>: no data rows", "<stdin>")
    ctx.inputs["<stdin>"] = io.digest("".join(consumed))
    sk0 = sketches[0]
    params = {
        "eps": a.eps, "delta": a.delta, "c": sk0.c, "lam": sk0.lam, "d": sk0.d, "runs": a.runs,
        "n": sk0.seen_count, "accepted": [s.accepted_count for s in sketches],
    }
    cfg = ctx.config(params, a.seed)
    header = ["run"] + [f"a{j}" for j in range(1, sk0.d + 2)]
    rows = [(r, *map(float, row)) for r, sk in enumerate(sketches) for row in sk.rows]
    return io.csv_table(header, rows, cfg.meta())


def _load_sketches(ctx, path):
    text = ctx.text(path)
    meta = io.read_meta(text)
    try:
        p = meta["params"]
        d, runs, n = int(p["d"]), int(p["runs"]), int(p["n"])
        eps, delta, c = float(p["eps"]), float(p["delta"]), float(p["c"])
    except (KeyError, TypeError, ValueError) as exc:
        raise io.DataError(f"{path}: missing sketch metadata", str(path)) from exc
    body = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    M = io.parse_rows("\n".join(body), str(path)) if len(body) > 1 else np.zeros((0, d + 2))
    sketches = []
    for r in range(runs):
        rows = M[M[:, 0] == r, 1:] if M.size else np.zeros((0, d + 1))
        sketches.append(streaming.Sketch.from_rows(d, eps, delta, rows, n, c))
    return sketches, n


def cmd_sketch_dist(a, ctx):
    sketches, n = _load_sketches(ctx, a.sketch)
    h1, h2 = ctx.hyperplane(a.h1), ctx.hyperplane(a.h2)
    per_run = []
    for r, sk in enumerate(sketches):
        lo, hi = sk.bounds(n, h1, h2, a.Delta)
        u = h1.coeffs - h2.coeffs
        per_run.append({"run": r, "sq_norm": float(io.fmt(sk.squared_norm(u))), "lower": float(io.fmt(lo)), "upper": float(io.fmt(hi))})
    med = streaming.median_estimate(sketches, h1, h2)
    cfg = ctx.config({"n": n, "Delta": a.Delta, "runs": len(sketches)})
    payload = {
        "runs": per_run,
        "median_sq_norm": float(io.fmt(med)),
        "median_estimate": float(io.fmt(np.sqrt(med / n))),
    }
    return _json(cfg, payload)


def cmd_traj_dist(a, ctx):
    Q = ctx.points(a.points)
    value = trajectories.dist_curves(Q, ctx.curve(a.c1), ctx.curve(a.c2))
    return _scalar(ctx.config({"metric_status": metrics.metric_status(Q)}), value)


def cmd_traj_embed(a, ctx):
    Q = ctx.points(a.points)
    curves = ctx.curves(a.curves)
    E = [trajectories.curve_embed(Q, c) for c in curves]
    D = E[0].shape[0] if E else 0
    cfg = ctx.config({"n": Q.n, "count": len(curves), "D": D})
    return io.csv_table([f"e{j}" for j in range(D)], [list(map(float, e)) for e in E], cfg.meta())


def cmd_traj_simplify(a, ctx):
    obj = ctx.json(a.polyline)
    if isinstance(obj, dict):
        obj = obj.get("vertices", obj)
    try:
        pts = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise io.DataError(f"{a.polyline}: not a polyline", str(a.polyline)) from exc
    curve = trajectories.simplify_to_k(pts, a.k)
    return _json(ctx.config({"k": a.k}), {"vertices": io.curve_to_obj(curve)})


def cmd_traj_mean(a, ctx):
    Q = ctx.points(a.points)
    curve = trajectories.mean_curve(ctx.curves(a.curves), Q)
    return _json(ctx.config({"n": Q.n}), {"vertices": io.curve_to_obj(curve)})


def cmd_cluster(a, ctx):
    if a.hyperplanes:
        if not a.points:
            raise UsageError("--hyperplanes requires --points")
        Q = ctx.points(a.points)
        H = ctx.hyperplanes(a.hyperplanes)
        X = np.array([embed(Q, h).values for h in H])
    elif a.vectors:
        X = io.parse_rows(ctx.text(a.vectors), str(a.vectors))
    else:
        raise UsageError("give a vectors CSV or --hyperplanes with --points")
    params = {"algo": a.algo, "k": a.k, "count": int(X.shape[0])}
    if a.algo == "kcenter":
        res = analysis.gonzalez_k_center(list(X), analysis.euclidean, a.k)
        cfg = ctx.config(params)
        payload = {
            "centers": [int(c) for c in res.centers],
            "assignment": [int(x) for x in res.assignment],
            "radii": [float(io.fmt(r)) for r in res.radii],
        }
    else:
        res = analysis.lloyds_k_means(X, a.k, a.seed)
        elbow = [analysis.lloyds_k_means(X, j, a.seed).wcss for j in range(1, a.k + 1)]
        cfg = ctx.config(params, a.seed)
        payload = {
            "centers": [[float(io.fmt(v)) for v in c] for c in res.centers],
            "assignment": [int(x) for x in res.assignment],
            "wcss": float(io.fmt(res.wcss)),
            "wcss_history": [float(io.fmt(w)) for w in res.history],
            "wcss_by_k": [float(io.fmt(w)) for w in elbow],
        }
    return _json(cfg, payload)


def cmd_kde(a, ctx):
    Q = ctx.points(a.points)
    H = ctx.hyperplanes(a.hyperplanes)
    queries = ctx.hyperplanes(a.query)
    vals = analysis.kde_many(Q, H, queries)
    cfg = ctx.config({"count": len(H), "Z": 1})
    return io.meta_line(cfg.meta()) + "\n" + "".join(io.fmt(v) + "\n" for v in vals)


def cmd_siegel(a, ctx):
    Q = ctx.points(a.points)
    if Q.d != 2:
        raise io.DataError(f"{a.points}: Siegel fits need 2-D points", str(a.points))
    slope, icpt = analysis.siegel_fit(Q.points)
    h = analysis.slope_intercept_line(slope, icpt)
    payload = {"slope": float(io.fmt(slope)), "intercept": float(io.fmt(icpt)), **io.hyperplane_to_obj(h)}
    return _json(ctx.config({"n": Q.n}), payload)


def cmd_uncertain_sample(a, ctx):
    obj = ctx.json(a.uncertain)
    try:
        P = analysis.UncertainPointSet(obj)
    except (TypeError, ValueError) as exc:
        raise io.DataError(f"{a.uncertain}: not an uncertain point set: {exc}", str(a.uncertain)) from exc
    N = a.n if a.n is not None else analysis.siegel_sample_size(a.eps, a.delta)
    T = analysis.uncertain_siegel_distribution(P, N, a.seed, workers=threads())
    lines = [
        {"slope": float(io.fmt(s)), "intercept": float(io.fmt(b)), **io.hyperplane_to_obj(h)}
        for h, s, b in zip(T.lines, T.slopes, T.intercepts)
    ]
    return _json(ctx.config({"N": N, "n": P.n}, a.seed), {"lines": lines})


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hyperdist", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        sp.add_argument("-o", "--output", help="write here instead of stdout")
        return sp

    sp = add("dist", cmd_dist, "distance between two hyperplanes")
    sp.add_argument("points")
    sp.add_argument("h1")
    sp.add_argument("h2")
    sp.add_argument("--variant", choices=["signed", "unsigned", "frobenius"], default="signed")
    sp.add_argument("--weights", action="store_true", help="last CSV column holds point weights")
    sp.add_argument("--oriented", action="store_true", help="treat both hyperplanes as oriented")

    sp = add("sensitivity", cmd_sensitivity, "per-point sensitivities")
    sp.add_argument("points")
    sp.add_argument("--weights", action="store_true")

    sp = add("coreset", cmd_coreset, "sensitivity-sampling coreset")
    sp.add_argument("points")
    sp.add_argument("--n", type=int, help="coreset size (default from --eps/--delta)")
    sp.add_argument("--eps", type=float, default=0.2)
    sp.add_argument("--delta", type=float, default=0.1)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--weights", action="store_true")

    sp = add("stream-sample", cmd_stream_sample, "online row sampling of points read from stdin")
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--runs", type=int, default=1, help="independent sketches for the median trick")
    sp.add_argument("--c", type=float, default=None, help="override the oversampling constant")
    sp.add_argument("--weights", action="store_true", help="drop a trailing weight column")

    sp = add("sketch-dist", cmd_sketch_dist, "distance bounds from a sketch file")
    sp.add_argument("sketch")
    sp.add_argument("h1")
    sp.add_argument("h2")
    sp.add_argument("--Delta", type=float, default=None, help="bound on hyperplane distance to origin")

    sp = add("traj-dist", cmd_traj_dist, "distance between two curves")
    sp.add_argument("points")
    sp.add_argument("c1")
    sp.add_argument("c2")

    sp = add("traj-embed", cmd_traj_embed, "vector embeddings of curves")
    sp.add_argument("points")
    sp.add_argument("curves")

    sp = add("traj-simplify", cmd_traj_simplify, "simplify a polyline to k segments")
    sp.add_argument("polyline")
    sp.add_argument("--k", type=int, required=True)

    sp = add("traj-mean", cmd_traj_mean, "mean of curves with equal k")
    sp.add_argument("points")
    sp.add_argument("curves")

    sp = add("cluster", cmd_cluster, "k-center or k-means over embeddings")
    sp.add_argument("vectors", nargs="?", help="CSV of embedding vectors")
    sp.add_argument("--algo", choices=["kcenter", "kmeans"], default="kcenter")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--points", help="points CSV, to cluster hyperplanes")
    sp.add_argument("--hyperplanes", help="JSON list of hyperplanes")

    sp = add("kde", cmd_kde, "kernel density of hyperplanes")
    sp.add_argument("points")
    sp.add_argument("hyperplanes")
    sp.add_argument("query")
    sp.add_argument("--bandwidth-free", action="store_true", default=True,
                    help="kernel exp(-d^2) with Z=1 (the only mode)")

    sp = add("siegel", cmd_siegel, "repeated-median line fit")
    sp.add_argument("points")

    sp = add("uncertain-sample", cmd_uncertain_sample, "Siegel fits of random traversals")
    sp.add_argument("uncertain")
    sp.add_argument("--n", type=int, help="number of traversals (default from --eps/--delta)")
    sp.add_argument("--eps", type=float, default=0.05)
    sp.add_argument("--delta", type=float, default=0.05)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    return p


def _error(exc: Exception, code: int) -> int:
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    path = getattr(exc, "path", None) or getattr(exc, "filename", None)
    if path:
        payload["path"] = str(path)
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        ctx = _Ctx(args)
        text = args.func(args, ctx)
        _emit(text, args.output)
    except UsageError as exc:
        return _error(exc, 2)
    except io.DataError as exc:
        return _error(exc, 3)
    except (np.linalg.LinAlgError, FloatingPointError, NumericalError) as exc:
        return _error(exc, 4)
    except HyperdistError as exc:
        return _error(exc, exc.exit_code)
    except OSError as exc:
        return _error(exc, 3)
    return 0


def main() -> None:
    sys.exit(run())
