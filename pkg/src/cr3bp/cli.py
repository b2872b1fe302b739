"""Command-line front end.

Every subcommand prints a JSON report on stdout (``schema_version`` first,
floats with 17 significant digits); tabular data goes to ``--csv`` when
given.  A JSON config file with a ``version`` field may provide defaults
per subcommand (``{"version": 1, "lyapunov": {"eps": 0.01}}``); flags win.

Exit codes: 0 success, 1 computation failure, 2 invalid input.
"""

from __future__ import annotations

import json
import math
import os
import sys
from dataclasses import dataclass

import click
import numpy as np

SCHEMA_VERSION = 1
CONFIG_VERSION = 1


# ---------------------------------------------------------------------------
# serialization

def _fmt(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if any(isinstance(v, dict) for v in seq):
            items = [pad + dumps(v, indent, _level + 1) for v in seq]
            return "[\n" + ",\n".join(items) + "\n" + end + "]"
        return "[" + ", ".join(dumps(v, indent, _level + 1) for v in seq) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps({"re": obj.real, "im": obj.imag}, indent, _level)
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def emit(report: dict) -> None:
    click.echo(dumps({"schema_version": SCHEMA_VERSION, **report}))


def write_csv(path: str, header: list[str], rows) -> None:
    rows = np.atleast_2d(np.asarray(rows, float))
    np.savetxt(path, rows, delimiter=",", header=",".join(header), comments="", fmt="%.17g")


# ---------------------------------------------------------------------------
# configuration

@dataclass
class RunConfig:
    """Validated parameters shared by the subcommands."""

    mu: float | None = None
    eps: float | None = None
    resolution: int | None = None
    theta_resolution: int | None = None
    tol: float | None = None
    seed: int = 0
    threads: int | None = None

    def validate(self) -> "RunConfig":
        if self.mu is not None and not 0.0 < self.mu < 1.0:
            raise click.BadParameter(f"mu must lie in (0, 1), got {self.mu}", param_hint="--mu")
        if self.eps is not None and not self.eps > 0.0:
            raise click.BadParameter(f"eps must be positive, got {self.eps}", param_hint="--eps")
        for name in ("resolution", "theta_resolution"):
            v = getattr(self, name)
            if v is not None and v < 16:
                raise click.BadParameter(f"{name} must be at least 16, got {v}")
        if self.tol is not None and not 0.0 < self.tol <= 1e-2:
            raise click.BadParameter(f"tolerance must lie in (0, 1e-2], got {self.tol}", param_hint="--tol")
        if self.threads is not None and self.threads < 1:
            raise click.BadParameter("threads must be positive", param_hint="--threads")
        return self


def load_config(path: str) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or "version" not in data:
        raise click.BadParameter("config file needs a top-level 'version' field", param_hint="--config")
    if data["version"] != CONFIG_VERSION:
        raise click.BadParameter(f"unsupported config version {data['version']}", param_hint="--config")
    return {k: v for k, v in data.items() if k != "version"}


def _threads(ctx) -> int:
    t = ctx.obj.get("threads")
    if t is None:
        t = int(os.environ.get("CR3BP_THREADS", "0")) or (os.cpu_count() or 1)
    return int(t)


class _Failure(click.ClickException):
    exit_code = 1


def _run(fn):
    """Turn numerical failures into exit code 1 with a short message."""
    try:
        return fn()
    except click.ClickException:
        raise
    except Exception as err:  # noqa: BLE001
        raise _Failure(f"{type(err).__name__}: {err}") from err


# ---------------------------------------------------------------------------
# commands

@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--config", type=click.Path(exists=True, dir_okay=False), help="JSON config with a 'version' field.")
@click.option("--threads", type=int, default=None, help="Parallel grid workers (default: CR3BP_THREADS or all cores).")
@click.pass_context
def main(ctx, config, threads):
    """Numerical toolkit for the planar circular restricted three-body problem."""
    ctx.ensure_object(dict)
    if config:
        ctx.default_map = load_config(config)
    RunConfig(threads=threads).validate()
    ctx.obj["threads"] = threads


@main.command()
@click.option("--mu", type=float, default=0.5, show_default=True)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None)
def lagrange(mu, csv_path):
    """Lagrange points and their critical values."""
    from .core_dynamics import lagrange_values

    RunConfig(mu=mu).validate()
    data = _run(lambda: lagrange_values(mu))
    rows = [[i + 1, *data.positions[i, 2:], data.values[i]] for i in range(5)]
    if csv_path:
        write_csv(csv_path, ["index", "q1", "q2", "L"], rows)
    emit({
        "command": "lagrange", "mu": mu, "r1": data.r1,
        "points": [{"index": int(r[0]), "q1": r[1], "q2": r[2], "L": r[3]} for r in rows],
    })


@main.command()
@click.option("--mu", type=float, default=0.5, show_default=True)
@click.option("--energy", "E", type=float, default=-2.2, show_default=True)
@click.option("--n-samples", type=int, default=60, show_default=True)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None)
def shoot(mu, E, n_samples, csv_path):
    """Shooting curves for the retrograde orbit and the refined crossing."""
    from . import orbits as ob
    from .core_dynamics import L1_value

    RunConfig(mu=mu, resolution=n_samples).validate()
    if not E < L1_value(mu):
        raise click.BadParameter("energy must lie below L1", param_hint="--energy")
    g1, g2 = _run(lambda: ob.gamma_curves(mu, E, n_samples))
    if csv_path:
        rows = [[1, a, t, q] for a, t, q in zip(g1.q1_0, g1.theta, g1.q2)]
        rows += [[2, a, t, q] for a, t, q in zip(g2.q1_0, g2.theta, g2.q2)]
        write_csv(csv_path, ["curve", "q1_start", "theta", "q2"], rows)
    hits = ob.curve_crossings(g1, g2)
    report = {"command": "shoot", "mu": mu, "energy": E, "n_samples": n_samples, "crossings": len(hits)}
    if hits:
        a, b, _ = hits[0]
        orbit = _run(lambda: ob.find_retrograde(mu, E, guess=(a, b), with_monodromy=False))
        report["orbit"] = {
            "initial_state": orbit.initial_state, "period": orbit.period,
            "closure_residual": orbit.closure_residual, "correction_residual": orbit.correction_residual,
            "symmetry_defect": ob.symmetry_defect(orbit),
        }
    emit(report)
    if not hits:
        raise _Failure("sampled curves do not cross")


def _orbit_report(orbit, index_value):
    from .orbits import transverse_multipliers

    return {
        "initial_state": orbit.initial_state, "period": orbit.period, "energy": orbit.energy,
        "closure_residual": orbit.closure_residual, "correction_residual": orbit.correction_residual,
        "index": index_value, "monodromy_eigenvalues": np.linalg.eigvals(orbit.monodromy),
        "transverse_multipliers": transverse_multipliers(orbit),
    }


@main.command()
@click.option("--mu", type=float, default=0.5, show_default=True)
@click.option("--eps", type=float, default=1e-3, show_default=True)
@click.option("--tol", type=float, default=1e-10, show_default=True)
def lyapunov(mu, eps, tol):
    """Planar Lyapunov orbit at energy L1 + eps."""
    from .index import orbit_index
    from .orbits import lyapunov_orbit

    RunConfig(mu=mu, eps=eps, tol=tol).validate()
    orbit = _run(lambda: lyapunov_orbit(mu, eps, tol=tol))
    idx = _run(lambda: orbit_index(orbit, trivialization="cartesian"))
    emit({"command": "lyapunov", "mu": mu, "eps": eps, **_orbit_report(orbit, idx)})


@main.command()
@click.option("--path-file", type=click.Path(exists=True, dir_okay=False), default=None,
              help="CSV with columns t, psi_00, psi_01, ...")
@click.option("--orbit", type=click.Choice(["lyapunov", "retrograde"]), default=None)
@click.option("--mu", type=float, default=0.5, show_default=True)
@click.option("--eps", type=float, default=1e-3, show_default=True)
@click.option("--energy", "E", type=float, default=-2.2, show_default=True)
@click.option("--cover", type=int, default=1, show_default=True)
def index(path_file, orbit, mu, eps, E, cover):
    """Robbin-Salamon index of a sampled path, or Conley-Zehnder index of an orbit."""
    from . import index as ix
    from . import orbits as ob

    if (path_file is None) == (orbit is None):
        raise click.UsageError("give exactly one of --path-file and --orbit")
    if cover < 1:
        raise click.BadParameter("cover must be positive", param_hint="--cover")
    if path_file:
        path = _run(lambda: ix.read_path_csv(path_file))
        mu_rs, xs = _run(lambda: ix.robbin_salamon(path, return_crossings=True))
        emit({"command": "index", "source": path_file, "robbin_salamon": mu_rs,
              "crossings": [{"t": c.t0, "signature": c.signature, "boundary": c.boundary} for c in xs]})
        return
    RunConfig(mu=mu, eps=eps).validate()
    if orbit == "lyapunov":
        o = _run(lambda: ob.lyapunov_orbit(mu, eps))
        idx = _run(lambda: ix.orbit_index(o, cover, "cartesian"))
    else:
        o = _run(lambda: ob.find_retrograde(mu, E))
        idx = _run(lambda: ix.orbit_index(o, cover, "regularized" if cover % 2 == 0 else "cartesian"))
    emit({"command": "index", "orbit": orbit, "cover": cover, **_orbit_report(o, idx)})


@main.command()
@click.option("--h", "h", type=float, default=-2.0, show_default=True)
@click.option("--res", type=int, default=400, show_default=True)
@click.option("--theta-res", type=int, default=64, show_default=True)
@click.option("--collar", type=float, default=1e-3, show_default=True)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def convexity(ctx, h, res, theta_res, collar, csv_path):
    """Scan det U_W over the Copenhagen Hill region."""
    from .convexity import convexity_scan, copenhagen_model

    RunConfig(resolution=res, theta_resolution=theta_res).validate()
    if h > -2.0:
        raise click.BadParameter("the Hill region splits only for h <= -2", param_hint="--h")
    scan = _run(lambda: convexity_scan(copenhagen_model(h), res, res, theta_res, collar, threads=_threads(ctx)))
    if csv_path:
        write_csv(csv_path, ["x1", "x2", "theta_min", "det_min"], scan.rows())
    emit({"command": "convexity", **scan.summary(), "positive": bool(scan.minimum > 0)})


@main.command()
@click.option("--n", type=int, default=2000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def appendixb(n, seed):
    """Grid margins for the positivity claims behind the Copenhagen estimates."""
    from .convexity import appendix_b_suite

    RunConfig(resolution=n, seed=seed).validate()
    emit({"command": "appendixb", **_run(lambda: appendix_b_suite(n, seed))})


@main.command()
@click.option("--mu", type=float, default=0.5, show_default=True)
@click.option("--eps", type=float, default=1e-3, show_default=True)
@click.option("--res", type=int, default=340, show_default=True)
def liouville(mu, eps, res):
    """Transversality of the interpolated Liouville field near L1."""
    from .liouville import interpolation_data, verify_y_eps

    RunConfig(mu=mu, eps=eps, resolution=res).validate()
    data = _run(lambda: interpolation_data(mu, eps))
    rep = _run(lambda: verify_y_eps(mu, eps, n_grid=res, data=data))
    emit({
        "command": "liouville", "mu": mu, **rep.to_dict(),
        "constants": {"d": list(data.d), "vhat1": data.vhat1, "vhat2": data.vhat2,
                      "hat_c": data.hat_c, "check_c": data.check_c, "alpha1": data.alpha1},
    })


@main.command()
@click.option("--mu", type=float, default=0.5, show_default=True)
@click.option("--c0", type=float, default=1.0, show_default=True)
@click.option("--b", type=float, default=0.5, show_default=True)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None)
def shield(mu, c0, b, csv_path):
    """Radius profile of the holomorphic shield over the linear model."""
    from .saddle_center import saddle_center_data, shield_profile

    RunConfig(mu=mu).validate()
    if not c0 > 0:
        raise click.BadParameter("c0 must be positive", param_hint="--c0")
    if not 0 < b < 1:
        raise click.BadParameter("b must lie in (0, 1)", param_hint="--b")
    prof = _run(lambda: shield_profile(saddle_center_data(mu), c0, b))
    if csv_path:
        write_csv(csv_path, ["s", "r", "area"], np.column_stack([prof.s, prof.r, prof.a]))
    emit({"command": "shield", "mu": mu, "c0": c0, "b": b, "r0": prof.r0, "rate": prof.rate,
          "rate_expected": prof.rate_expected, "energy": prof.energy, "energy_expected": prof.energy_expected,
          "n_samples": len(prof.s)})


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
