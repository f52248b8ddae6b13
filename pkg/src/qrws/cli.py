"""Command-line entry point.

Subcommands wire the simulator, sweeps, analysis, and the surrogate into a
reproducible file-producing workflow.  Outputs are CSV/JSON plus PGM
heatmaps; every command is deterministic given its flags and config.

Exit codes: 0 success, 2 usage/validation error, 1 runtime failure.
"""

from __future__ import annotations

import json
import math
import os
import sys
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Optional

import click
import numpy as np

from . import analysis, coins, heatmap, surrogate, sweep, walk

ENV_OUT_DIR = "QRWS_OUT_DIR"


@dataclass
class Config:
    """Tool-wide defaults; a JSON config file may override any field, and
    command-line flags win over both."""

    out_dir: str = "."
    phi_steps: int = 180
    zeta_steps: int = 180
    alpha_steps: int = 250
    seed: int = 20230521
    samples: int = 100_000
    sigma_phi: float = 0.1
    sigma_alpha: float = 0.1
    hidden_layers: int = 4
    hidden_units: int = 128
    epochs: int = 400
    batch_size: int = 256
    learning_rate: float = 1e-3
    train_grid_steps: int = 90


def load_config(path: Optional[str]) -> Config:
    cfg = Config()
    if os.environ.get(ENV_OUT_DIR):
        cfg = replace(cfg, out_dir=os.environ[ENV_OUT_DIR])
    if path:
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise click.UsageError(f"cannot read config {path}: {exc}")
        unknown = set(doc) - set(asdict(cfg))
        if unknown:
            raise click.UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg = replace(cfg, **doc)
    return cfg


def parse_angle(text: str) -> float:
    """Angle flag parser: plain radians, or pi literals like ``pi``,
    ``2pi``, ``0.5pi``, ``pi/4``, ``-pi``."""
    t = text.strip().lower().replace(" ", "").replace("*", "")
    try:
        if "pi" in t:
            head, _, tail = t.partition("pi")
            value = math.pi
            if head in ("", "+"):
                pass
            elif head == "-":
                value = -value
            else:
                value *= float(head)
            if tail:
                if not tail.startswith("/"):
                    raise ValueError
                value /= float(tail[1:])
            return value
        return float(t)
    except ValueError:
        raise click.UsageError(f"cannot parse angle {text!r}")


class AngleParam(click.ParamType):
    name = "angle"

    def convert(self, value, param, ctx):
        if isinstance(value, float):
            return value
        return parse_angle(str(value))


ANGLE = AngleParam()


def parse_m_range(text: str) -> list[int]:
    """Parse ``4..10`` or a single integer into a list of coin sizes."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            lo, hi = int(lo), int(hi)
            if lo > hi:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(text)]
    except ValueError:
        raise click.UsageError(f"cannot parse coin-size range {text!r}")


def relation_from_flags(relation: str, alpha: Optional[float]) -> coins.CurveRelation:
    if relation == "linear":
        return coins.CurveRelation.linear()
    if relation == "constant":
        return coins.CurveRelation.constant()
    if alpha is None:
        alpha = coins.ALPHA_BENCH
    return coins.CurveRelation.sinusoidal(alpha)


def resolve_out(ctx_cfg: Config, out: Optional[str], default_name: str) -> Path:
    if out:
        return Path(out)
    d = Path(ctx_cfg.out_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d / default_name


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="JSON config file with default parameters.")
@click.pass_context
def main(ctx, config_path):
    """Quantum walk search on the hypercube: simulation and analysis."""
    ctx.obj = load_config(config_path)


@main.command("run")
@click.option("--m", type=int, required=True, help="Coin dimension (>= 2).")
@click.option("--phi", type=ANGLE, required=True)
@click.option("--zeta", type=ANGLE, required=True)
@click.option("--iterations", type=int, default=None)
@click.option("--target", type=int, default=0)
def cmd_run(m, phi, zeta, iterations, target):
    """Simulate one search run and print the success probability."""
    try:
        config = walk.RunConfig(m, phi, zeta, target=target, iterations=iterations)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    p = walk.run(config)
    click.echo(f"m={m} k={config.resolved_iterations()} p={p:.6f}")


@main.command("sweep")
@click.option("--m", type=int, required=True)
@click.option("--mode", type=click.Choice(["random", "grid"]), default="grid")
@click.option("--samples", type=int, default=None, help="Random-mode sample count.")
@click.option("--seed", type=int, default=None)
@click.option("--phi-steps", type=int, default=None)
@click.option("--zeta-steps", type=int, default=None)
@click.option("--iterations", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.pass_obj
def cmd_sweep(cfg, m, mode, samples, seed, phi_steps, zeta_steps, iterations, out):
    """Evaluate the p(phi, zeta) landscape and write CSV + meta sidecar."""
    try:
        if mode == "random":
            ds = sweep.sweep_random(m, samples or cfg.samples, seed if seed is not None
                                    else cfg.seed, iterations=iterations)
        else:
            ds = sweep.sweep_grid(m, phi_steps or cfg.phi_steps,
                                  zeta_steps or cfg.zeta_steps, iterations=iterations)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    path = resolve_out(cfg, out, f"sweep_m{m}.csv")
    sweep.save_dataset(ds, path)
    click.echo(f"wrote {path} ({len(ds)} records, max p={ds.p.max():.4f})")


@main.command("curve")
@click.option("--m", type=int, required=True)
@click.option("--relation", type=click.Choice(["linear", "constant", "sinusoidal"]),
              default="sinusoidal")
@click.option("--alpha", type=float, default=None,
              help="Sinusoidal parameter; default -1/(2 pi).")
@click.option("--phi-steps", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.pass_obj
def cmd_curve(cfg, m, relation, alpha, phi_steps, out):
    """Evaluate p(phi) along one zeta(phi) relation."""
    rel = relation_from_flags(relation, alpha)
    try:
        profile = analysis.curve_profile(m, rel, phi_steps or cfg.phi_steps)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    path = resolve_out(cfg, out, f"curve_{relation}_m{m}.csv")
    _save_profile(profile, path)
    click.echo(f"wrote {path} (p_max={profile.p_max:.4f} at phi={profile.phi_max:.4f})")


def _save_profile(profile: analysis.CurveProfile, path: Path) -> None:
    zetas = coins.zeta_of_phi(profile.relation, profile.phis)
    with open(path, "w", newline="") as fh:
        fh.write("phi,zeta,p\n")
        for phi, zeta, p in zip(profile.phis, zetas, profile.ps):
            fh.write(f"{phi:.12g},{zeta:.12g},{p:.12g}\n")


@main.command("width")
@click.option("--m", type=int, required=True)
@click.option("--relation", type=click.Choice(["linear", "constant", "sinusoidal"]),
              default="sinusoidal")
@click.option("--alpha", type=float, default=None)
@click.option("--mode", type=click.Choice(["fraction", "absolute"]), default="fraction")
@click.option("--value", type=float, default=0.9)
@click.option("--phi-steps", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.pass_obj
def cmd_width(cfg, m, relation, alpha, mode, value, phi_steps, out):
    """Stability width eps around the profile maximum."""
    rel = relation_from_flags(relation, alpha)
    try:
        profile = analysis.curve_profile(m, rel, phi_steps or cfg.phi_steps)
        result = analysis.width(profile, mode, value)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    record = analysis.width_record(profile, result)
    path = resolve_out(cfg, out, f"width_{relation}_m{m}.json")
    analysis.save_width_records([record], path)
    click.echo(f"wrote {path} (eps={result.eps:.4f})")


@main.command("fit-alpha")
@click.option("--m", type=int, default=None, help="Simulate a fresh grid for this coin size.")
@click.option("--input", "input_csv", type=click.Path(exists=True), default=None,
              help="Existing grid-mode sweep CSV to fit instead.")
@click.option("--phi-steps", type=int, default=None)
@click.option("--zeta-steps", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.pass_obj
def cmd_fit_alpha(cfg, m, input_csv, phi_steps, zeta_steps, out):
    """Extract the landscape ridge and fit the sinusoidal-relation alpha."""
    if (m is None) == (input_csv is None):
        raise click.UsageError("provide exactly one of --m or --input")
    try:
        if input_csv:
            ds = sweep.load_dataset(input_csv)
        else:
            ds = sweep.sweep_grid(m, phi_steps or cfg.phi_steps,
                                  zeta_steps or cfg.zeta_steps)
        alpha = analysis.fit_alpha(analysis.extract_ridge(ds))
    except ValueError as exc:
        raise click.UsageError(str(exc))
    record = {"m": ds.m, "alpha": alpha,
              "phi_steps": ds.meta.get("phi_steps"), "zeta_steps": ds.meta.get("zeta_steps")}
    path = resolve_out(cfg, out, f"alpha_m{ds.m}.json")
    path.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n")
    click.echo(f"wrote {path} (alpha={alpha:.4f})")


@main.command("robustness")
@click.option("--m", type=int, required=True)
@click.option("--alpha-center", type=float, default=None,
              help="Center of the alpha distance weight; default from the reference table.")
@click.option("--sigma-phi", type=float, default=None)
@click.option("--sigma-alpha", type=float, default=None)
@click.option("--out-prefix", type=str, default=None)
@click.pass_obj
def cmd_robustness(cfg, m, alpha_center, sigma_phi, sigma_alpha, out_prefix):
    """Relative r.m.s. deviation field sigma_p over the (phi, alpha) plane."""
    if alpha_center is None:
        alpha_center = coins.ALPHA_ML.get(m)
        if alpha_center is None:
            raise click.UsageError(f"no reference alpha for m={m}; pass --alpha-center")
    try:
        grid = analysis.sigma_p_grid(m, alpha_center, sigma_phi or cfg.sigma_phi,
                                     sigma_alpha or cfg.sigma_alpha,
                                     cfg.phi_steps, cfg.alpha_steps)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    prefix = out_prefix or str(Path(cfg.out_dir) / f"sigma_p_m{m}")
    Path(prefix).parent.mkdir(parents=True, exist_ok=True)
    analysis.save_matrix_csv(grid, prefix + ".csv")
    heatmap.write_heatmap(grid.values, prefix + ".pgm", scale="log")
    click.echo(f"wrote {prefix}.csv and {prefix}.pgm")


@main.command("ratio")
@click.option("--m", type=int, required=True)
@click.option("--alpha-center", type=float, default=None)
@click.option("--sigma-phi", type=float, default=None)
@click.option("--sigma-alpha", type=float, default=None)
@click.option("--out-prefix", type=str, default=None)
@click.pass_obj
def cmd_ratio(cfg, m, alpha_center, sigma_phi, sigma_alpha, out_prefix):
    """Stability ratio sigma_p / sigma_p' against the uncontrolled-zeta coin."""
    if alpha_center is None:
        alpha_center = coins.ALPHA_ML.get(m)
        if alpha_center is None:
            raise click.UsageError(f"no reference alpha for m={m}; pass --alpha-center")
    try:
        grid = analysis.sigma_p_grid(m, alpha_center, sigma_phi or cfg.sigma_phi,
                                     sigma_alpha or cfg.sigma_alpha,
                                     cfg.phi_steps, cfg.alpha_steps)
        prime = analysis.sigma_p_prime(m, sigma_phi or cfg.sigma_phi, cfg.phi_steps)
        ratio = analysis.ratio_map(grid, prime)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    prefix = out_prefix or str(Path(cfg.out_dir) / f"ratio_m{m}")
    Path(prefix).parent.mkdir(parents=True, exist_ok=True)
    analysis.save_matrix_csv(ratio, prefix + ".csv")
    heatmap.write_heatmap(ratio.values, prefix + ".pgm", scale="log")
    click.echo(f"wrote {prefix}.csv and {prefix}.pgm")


@main.command("surrogate-train")
@click.option("--m-range", type=str, default="2..10")
@click.option("--grid-steps", type=int, default=None,
              help="Training-grid resolution per coin size.")
@click.option("--epochs", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.pass_obj
def cmd_surrogate_train(cfg, m_range, grid_steps, epochs, seed, out):
    """Generate training grids and fit the landscape surrogate."""
    ms = parse_m_range(m_range)
    steps = grid_steps or cfg.train_grid_steps
    datasets = []
    for m in ms:
        click.echo(f"simulating m={m} ({steps}x{steps} grid)...", err=True)
        datasets.append(sweep.sweep_grid(m, steps, steps))
    tc = surrogate.TrainConfig(
        hidden_layers=cfg.hidden_layers, hidden_units=cfg.hidden_units,
        epochs=epochs or cfg.epochs, batch_size=cfg.batch_size,
        learning_rate=cfg.learning_rate,
        seed=seed if seed is not None else cfg.seed,
    )
    model, report = surrogate.train(datasets, tc)
    path = resolve_out(cfg, out, "surrogate.json")
    surrogate.save_model(model, path)
    click.echo(f"wrote {path} (train MSE {report.final_train_loss:.2e}, "
               f"val MSE {report.final_val_loss:.2e})")


@main.command("surrogate-predict")
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--m", type=int, required=True)
@click.option("--phi", type=ANGLE, default=None)
@click.option("--zeta", type=ANGLE, default=None)
@click.option("--alpha", "predict_alpha", is_flag=True,
              help="Predict the optimal sinusoidal-relation alpha instead of one p value.")
@click.pass_obj
def cmd_surrogate_predict(cfg, model_path, m, phi, zeta, predict_alpha):
    """Evaluate a trained surrogate: one p(phi, zeta, m) or the fitted alpha."""
    model = surrogate.load_model(model_path)
    if predict_alpha:
        alpha = surrogate.predict_alpha_ml(model, m, cfg.phi_steps)
        click.echo(f"m={m} alpha={alpha:.4f}")
        return
    if phi is None or zeta is None:
        raise click.UsageError("provide --phi and --zeta, or --alpha")
    p = surrogate.forward(model, phi, zeta, m)
    click.echo(f"m={m} phi={phi:.6f} zeta={zeta:.6f} p={p:.6f}")


@main.command("heatmap")
@click.option("--input", "input_csv", type=click.Path(exists=True), required=True,
              help="Matrix CSV (first row/column are the grid axes).")
@click.option("--out", type=click.Path(), required=True)
@click.option("--scale", type=click.Choice(["linear", "log"]), default="linear")
def cmd_heatmap(input_csv, out, scale):
    """Render a matrix CSV to a PGM image."""
    grid = analysis.load_matrix_csv(input_csv)
    try:
        heatmap.write_heatmap(grid.values, out, scale=scale)
    except OSError as exc:
        click.echo(str(exc), err=True)
        sys.exit(1)
    click.echo(f"wrote {out}")


@main.command("pipeline")
@click.option("--m-range", "m_range", type=str, required=True, help="e.g. 4..10")
@click.option("--phi-steps", type=int, default=None)
@click.option("--zeta-steps", type=int, default=None)
@click.option("--out-dir", type=click.Path(), default=None)
@click.pass_obj
def cmd_pipeline(cfg, m_range, phi_steps, zeta_steps, out_dir):
    """Full per-coin-size workflow: sweep, ridge, alpha fit, curves, widths,
    robustness fields, and heatmaps, plus a manifest of all artifacts."""
    ms = parse_m_range(m_range)
    out = Path(out_dir or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    try:
        manifest = run_pipeline(cfg, ms, phi_steps or cfg.phi_steps,
                                zeta_steps or cfg.zeta_steps, out, written)
    except Exception as exc:  # noqa: BLE001 - mark partial output, then fail
        for path in written:
            if path.exists():
                path.rename(path.with_name(path.name + ".partial"))
        click.echo(f"pipeline failed: {exc}", err=True)
        sys.exit(1)
    click.echo(f"wrote {manifest}")


def run_pipeline(cfg: Config, ms: list[int], phi_steps: int, zeta_steps: int,
                 out: Path, written: list[Path]) -> Path:
    manifest: dict = {
        "parameters": {
            "phi_steps": phi_steps, "zeta_steps": zeta_steps,
            "alpha_steps": cfg.alpha_steps,
            "sigma_phi": cfg.sigma_phi, "sigma_alpha": cfg.sigma_alpha,
        },
        "per_m": {},
    }

    def emit(path: Path, writer) -> str:
        writer(path)
        written.append(path)
        return path.name

    for m in ms:
        arts: dict = {}
        click.echo(f"[m={m}] grid sweep...", err=True)
        ds = sweep.sweep_grid(m, phi_steps, zeta_steps)
        arts["sweep"] = emit(out / f"sweep_m{m}.csv", lambda p: sweep.save_dataset(ds, p))
        written.append(sweep.meta_path(out / f"sweep_m{m}.csv"))
        arts["sweep_meta"] = sweep.meta_path(out / f"sweep_m{m}.csv").name
        arts["heatmap_p"] = emit(out / f"heatmap_p_m{m}.pgm",
                                 lambda p: heatmap.write_heatmap(ds.p_grid(), p))

        ridge = analysis.extract_ridge(ds)
        arts["ridge"] = emit(out / f"ridge_m{m}.csv", lambda p: _save_ridge(ridge, p))
        alpha_fit = analysis.fit_alpha(ridge)
        arts["alpha"] = emit(
            out / f"alpha_m{m}.json",
            lambda p: p.write_text(json.dumps(
                {"m": m, "alpha": alpha_fit, "phi_steps": phi_steps,
                 "zeta_steps": zeta_steps}, indent=2, sort_keys=True) + "\n"),
        )

        click.echo(f"[m={m}] curves and widths...", err=True)
        relations = {
            "linear": coins.CurveRelation.linear(),
            "constant": coins.CurveRelation.constant(),
            "sin_bench": coins.CurveRelation.sinusoidal(coins.ALPHA_BENCH),
            "sin_fit": coins.CurveRelation.sinusoidal(alpha_fit),
        }
        width_records = []
        for name, rel in relations.items():
            profile = analysis.curve_profile(m, rel, phi_steps)
            arts[f"curve_{name}"] = emit(out / f"curve_{name}_m{m}.csv",
                                         lambda p, pr=profile: _save_profile(pr, p))
            for mode, value in (("fraction", 0.9), ("fraction", 0.7),
                                ("absolute", 0.37), ("absolute", 0.31)):
                width_records.append(
                    analysis.width_record(profile, analysis.width(profile, mode, value)))
        arts["widths"] = emit(out / f"widths_m{m}.json",
                              lambda p: analysis.save_width_records(width_records, p))

        click.echo(f"[m={m}] robustness fields...", err=True)
        grid = analysis.sigma_p_grid(m, alpha_fit, cfg.sigma_phi, cfg.sigma_alpha,
                                     phi_steps, cfg.alpha_steps)
        prime = analysis.sigma_p_prime(m, cfg.sigma_phi, phi_steps)
        ratio = analysis.ratio_map(grid, prime)
        arts["sigma_p"] = emit(out / f"sigma_p_m{m}.csv",
                               lambda p: analysis.save_matrix_csv(grid, p))
        arts["sigma_prime"] = emit(out / f"sigma_prime_m{m}.csv",
                                   lambda p: _save_prime(prime, p))
        arts["ratio"] = emit(out / f"ratio_m{m}.csv",
                             lambda p: analysis.save_matrix_csv(ratio, p))
        arts["heatmap_sigma_p"] = emit(out / f"heatmap_sigma_p_m{m}.pgm",
                                       lambda p: heatmap.write_heatmap(grid.values, p, "log"))
        arts["heatmap_ratio"] = emit(out / f"heatmap_ratio_m{m}.pgm",
                                     lambda p: heatmap.write_heatmap(ratio.values, p, "log"))
        manifest["per_m"][str(m)] = arts

    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest_path


def _save_ridge(ridge: np.ndarray, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("phi,zeta\n")
        for phi, zeta in ridge:
            fh.write(f"{phi:.12g},{zeta:.12g}\n")


def _save_prime(prime: analysis.SigmaPrimeProfile, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("phi,sigma_p_prime,p\n")
        for phi, v, p in zip(prime.phis, prime.values, prime.p):
            fh.write(f"{phi:.12g},{v:.12g},{p:.12g}\n")


if __name__ == "__main__":
    main()
