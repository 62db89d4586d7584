"""Command-line front end.

Exit codes: 0 = completed without rejection, 3 = completed with rejection,
1 = usage error, 2 = data error.  Every command is deterministic under
--seed; omitting it draws one from system entropy and records it in the
output.  --threads (or FRFBAND_THREADS) only changes wall time, never
numbers.
"""

from __future__ import annotations

import os
import secrets
import sys

import click
import numpy as np

from ._version import __version__
from .backend import kernel_backend
from .bootstrap import (BootstrapParams, confidence_band_difference, residual,
                        residual_spectrum, zero_line)
from .calibrate import MODES, calibrate
from .errors import FrfBandError, GroupFormatError
from .estimate import pipeline_group, reference_frf, synth_group
from .grids import DEFAULT_FREQS, make_frequency_grid, make_time_grid
from .io import (canonical_json, read_frf_group, sha256_digest,
                 write_frf_group, write_result)
from .transform import Frf, FrfGroup, frf_from_pir, pir_from_frf

_ALPHA = click.FloatRange(0.0, 1.0, min_open=True, max_open=True)
_OVERSAMPLE = click.FloatRange(2.0, min_open=True)


def _auto_seed(seed):
    if seed is not None:
        return int(seed), False
    return secrets.randbits(63), True


def _write_table(path, header, columns):
    cols = [np.asarray(c) for c in columns]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(header) + "\n")
        for i in range(len(cols[0])):
            fh.write("\t".join(f"{c[i]:.17g}" for c in cols) + "\n")


@click.group()
@click.version_option(__version__, message="%(prog)s %(version)s")
def cli():
    """Bootstrap confidence-band test between two groups of FRFs."""


@cli.command("test")
@click.option("--group1", "group1_path", required=True,
              type=click.Path(dir_okay=False), help="First group file.")
@click.option("--group2", "group2_path", required=True,
              type=click.Path(dir_okay=False), help="Second group file.")
@click.option("--alpha", type=_ALPHA, default=0.95, show_default=True,
              help="Simultaneous confidence level (fraction).")
@click.option("--B", "b_outer", type=click.IntRange(min=100), default=10_000,
              show_default=True, help="Outer bootstrap replications.")
@click.option("--Bs", "b_nested", type=click.IntRange(min=2), default=200,
              show_default=True, help="Nested replications per iteration.")
@click.option("--seed", type=int, default=None,
              help="Stream seed (default: system entropy, recorded).")
@click.option("--oversample", type=_OVERSAMPLE, default=10.0,
              show_default=True, help="Sample rate / highest frequency.")
@click.option("--quantile-method", type=click.Choice(["order", "histogram"]),
              default="order", show_default=True,
              help="Critical-constant estimator.")
@click.option("--inclusive-endpoint", is_flag=True,
              help="Append the duplicate t = period sample "
                   "(compatibility grid; breaks exact inversion).")
@click.option("--threads", type=click.IntRange(min=1), default=1,
              envvar="FRFBAND_THREADS", show_default=True,
              help="Worker threads for the outer loop.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False),
              default=".", show_default=True, help="Output directory.")
@click.option("--svg", is_flag=True, help="Also render band_figure.svg.")
def cmd_test(group1_path, group2_path, alpha, b_outer, b_nested, seed,
             oversample, quantile_method, inclusive_endpoint, threads,
             out_dir, svg):
    """Test whether two groups' mean FRFs differ; write result files.

    Writes result.json (canonical result document), band_plot.tsv
    (t, avg, upper, lower, zero) and residual_spectrum.tsv (f, magnitude)
    into --out.  Exit code 3 signals a rejected null, 0 an accepted one.
    """
    group1 = read_frf_group(group1_path)
    group2 = read_frf_group(group2_path)
    if group1.grid != group2.grid:
        raise GroupFormatError(
            "group files disagree on the frequency header; the test needs "
            "both groups on one grid"
        )
    seed, seed_drawn = _auto_seed(seed)
    grid = group1.grid
    tg = make_time_grid(grid, oversample, inclusive_endpoint)
    params = BootstrapParams(alpha=alpha, B=b_outer, Bs=b_nested, seed=seed,
                             quantile_method=quantile_method)
    result = confidence_band_difference(group1, group2, tg, params,
                                        threads=threads)

    digests = {
        "group1": sha256_digest(group1_path),
        "group2": sha256_digest(group2_path),
    }
    payload = write_result(result, {
        "grid": grid,
        "tg": tg,
        "params": params,
        "oversample": oversample,
        "inclusive_endpoint": inclusive_endpoint,
        "digests": digests,
    })
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "result.json"), "wb") as fh:
        fh.write(payload)
    zero = np.zeros(tg.n_samples)
    _write_table(
        os.path.join(out_dir, "band_plot.tsv"),
        ("time_s", "avg", "band_upper", "band_lower", "zero"),
        (tg.times, result.avg.samples, result.band_upper, result.band_lower,
         zero),
    )
    res = residual(zero_line(tg), result)
    _, mags = residual_spectrum(res, tg, grid)
    _write_table(
        os.path.join(out_dir, "residual_spectrum.tsv"),
        ("freq_hz", "magnitude"),
        (np.asarray(grid.freqs), mags),
    )
    if svg:
        figure = _render_svg(tg.times, result.avg.samples, result.band_upper,
                             result.band_lower, grid.freqs, mags)
        with open(os.path.join(out_dir, "band_figure.svg"), "w",
                  encoding="utf-8", newline="\n") as fh:
            fh.write(figure)

    decision = "REJECT" if result.reject else "no rejection"
    suffix = " (seed drawn from system entropy)" if seed_drawn else ""
    click.echo(
        f"{decision}: cc={result.cc:.6g}, {len(result.crossings)} crossing "
        f"interval(s), seed={seed}{suffix}, backend={kernel_backend()}"
    )
    for c in result.crossings:
        click.echo(
            f"  zero outside band over [{c.t_start:.4g}, {c.t_end:.4g}] s "
            f"({c.n_samples} samples)"
        )
    return 3 if result.reject else 0


@cli.command("pir")
@click.option("--group", "group_path", required=True,
              type=click.Path(dir_okay=False), help="Group file.")
@click.option("--oversample", type=_OVERSAMPLE, default=10.0,
              show_default=True)
@click.option("--inclusive-endpoint", is_flag=True)
@click.option("--roundtrip", is_flag=True,
              help="Report max FRF recovery error per subject.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False),
              default=".", show_default=True)
def cmd_pir(group_path, oversample, inclusive_endpoint, roundtrip, out_dir):
    """Render each subject's pseudo-impulse-response; write pir_plot.tsv."""
    if roundtrip and inclusive_endpoint:
        raise click.UsageError(
            "--roundtrip needs a bin-aligned grid; drop --inclusive-endpoint"
        )
    group = read_frf_group(group_path)
    grid = group.grid
    tg = make_time_grid(grid, oversample, inclusive_endpoint)
    pirs = [pir_from_frf(m, grid, tg) for m in group.members]
    labels = group.labels or tuple(
        f"s{i + 1:02d}" for i in range(len(group.members))
    )
    os.makedirs(out_dir, exist_ok=True)
    _write_table(
        os.path.join(out_dir, "pir_plot.tsv"),
        ("time_s",) + labels,
        (tg.times,) + tuple(p.samples for p in pirs),
    )
    click.echo(
        f"{len(pirs)} PIRs, {tg.n_samples} samples at {tg.sample_rate:g} Hz, "
        f"period {grid.period:g} s, base {grid.base_freq:g} Hz"
    )
    if roundtrip:
        for label, member, p in zip(labels, group.members, pirs):
            back = frf_from_pir(p, grid, tg)
            err = float(np.max(np.abs(back.values - member.values)))
            click.echo(f"  {label}: max round-trip error {err:.3e}")
    return 0


@cli.command("synth")
@click.option("--n", "n1", type=click.IntRange(min=2), default=10,
              show_default=True, help="Subjects in group 1.")
@click.option("--n2", type=click.IntRange(min=2), default=None,
              help="Subjects in group 2 (default: same as --n).")
@click.option("--noise", type=click.FloatRange(min=0.0), default=0.1,
              show_default=True, help="Gaussian noise sigma.")
@click.option("--seed", type=int, default=None)
@click.option("--seed2", type=int, default=None,
              help="Separate noise seed for group 2 (default: same as "
                   "--seed, so the groups share noise draws).")
@click.option("--shift-real", type=float, default=0.0, show_default=True,
              help="Added to the real part of every group-2 value.")
@click.option("--pipeline", type=click.Choice(["direct", "full"]),
              default="direct", show_default=True,
              help="direct: base FRF + noise; full: ternary stimulus, "
                   "simulated response, estimated and band-averaged FRFs.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False),
              default=".", show_default=True)
def cmd_synth(n1, n2, noise, seed, seed2, shift_real, pipeline, out_dir):
    """Write synthetic group1.csv and group2.csv for desk experiments."""
    seed, seed_drawn = _auto_seed(seed)
    n2 = n1 if n2 is None else n2
    seed2 = seed if seed2 is None else int(seed2)
    grid = make_frequency_grid(DEFAULT_FREQS)
    if pipeline == "direct":
        base = reference_frf(grid)
        g1 = synth_group(base, grid, noise, n1, seed)
        g2 = synth_group(base, grid, noise, n2, seed2)
    else:
        g1 = pipeline_group(n1, noise, seed, grid=grid)
        g2 = pipeline_group(n2, noise, seed2, grid=grid)
    if shift_real:
        g2 = FrfGroup(
            grid=grid,
            members=tuple(Frf(m.values + float(shift_real)) for m in g2.members),
            labels=g2.labels,
        )
    os.makedirs(out_dir, exist_ok=True)
    path1 = os.path.join(out_dir, "group1.csv")
    path2 = os.path.join(out_dir, "group2.csv")
    write_frf_group(g1, path1)
    write_frf_group(g2, path2)
    suffix = " (seed drawn from system entropy)" if seed_drawn else ""
    click.echo(f"wrote {path1} ({n1} subjects) and {path2} ({n2} subjects), "
               f"seed={seed}{suffix}")
    return 0


@cli.command("calibrate")
@click.option("--mode", type=click.Choice(MODES), default="type1",
              show_default=True)
@click.option("--replicates", type=click.IntRange(min=1), required=True)
@click.option("--shift", type=float, default=1.0, show_default=True,
              help="Real-part shift of group 2 (power mode).")
@click.option("--alpha", type=_ALPHA, default=0.95, show_default=True)
@click.option("--B", "b_outer", type=click.IntRange(min=100), default=2000,
              show_default=True)
@click.option("--Bs", "b_nested", type=click.IntRange(min=2), default=100,
              show_default=True)
@click.option("--n", "n_subjects", type=click.IntRange(min=2), default=10,
              show_default=True)
@click.option("--noise", type=click.FloatRange(min=0.0), default=0.1,
              show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--oversample", type=_OVERSAMPLE, default=10.0,
              show_default=True)
@click.option("--threads", type=click.IntRange(min=1), default=1,
              envvar="FRFBAND_THREADS", show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False),
              default=None, help="Also write the report as JSON.")
def cmd_calibrate(mode, replicates, shift, alpha, b_outer, b_nested,
                  n_subjects, noise, seed, oversample, threads, out_path):
    """Monte Carlo rejection rate on synthetic groups (type-I or power)."""
    seed, seed_drawn = _auto_seed(seed)

    def progress(done, total):
        step = max(total // 10, 1)
        if done % step == 0 or done == total:
            click.echo(f"  replicate {done}/{total}", err=True)

    report = calibrate(
        mode, replicates, seed, alpha=alpha, B=b_outer, Bs=b_nested,
        n1=n_subjects, n2=n_subjects, noise_sigma=noise, shift=shift,
        oversample=oversample, threads=threads, progress=progress,
    )
    suffix = " (seed drawn from system entropy)" if seed_drawn else ""
    click.echo(
        f"{report.mode}: rejected {report.rejections}/{report.replicates} "
        f"(rate {report.rate:.3f}, 95% CI [{report.ci_low:.3f}, "
        f"{report.ci_high:.3f}]), seed={report.seed}{suffix}"
    )
    if out_path is not None:
        with open(out_path, "wb") as fh:
            fh.write(canonical_json(report.as_tree()))
        click.echo(f"wrote {out_path}")
    return 0


def _render_svg(times, avg, upper, lower, freqs, mags) -> str:
    """Two-panel vector figure: band plot left, residual spectrum right."""
    w, h = 980, 420
    lm, rm = (60, 470), (560, 950)  # x pixel ranges of the panels
    top, bot = 40, 380
    t0, t1 = float(times[0]), float(times[-1])
    ylo = min(float(np.min(lower)), 0.0)
    yhi = max(float(np.max(upper)), 0.0)
    pad = 0.05 * (yhi - ylo or 1.0)
    ylo, yhi = ylo - pad, yhi + pad
    f0, f1 = 0.0, float(max(freqs)) * 1.05
    mhi = max(float(np.max(mags)), 1e-12) * 1.1

    def tx(t):
        return lm[0] + (t - t0) / (t1 - t0) * (lm[1] - lm[0])

    def ty(y):
        return bot - (y - ylo) / (yhi - ylo) * (bot - top)

    def fx(f):
        return rm[0] + (f - f0) / (f1 - f0) * (rm[1] - rm[0])

    def my(v):
        return bot - v / mhi * (bot - top)

    band_pts = [f"{tx(t):.2f},{ty(u):.2f}" for t, u in zip(times, upper)]
    band_pts += [f"{tx(t):.2f},{ty(l):.2f}"
                 for t, l in zip(times[::-1], lower[::-1])]
    avg_pts = " ".join(f"{tx(t):.2f},{ty(v):.2f}" for t, v in zip(times, avg))
    stems = "".join(
        f'<line x1="{fx(f):.2f}" y1="{bot}" x2="{fx(f):.2f}" '
        f'y2="{my(v):.2f}" stroke="#b3402a" stroke-width="2"/>'
        for f, v in zip(freqs, mags)
    )
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">'
        f'<rect width="{w}" height="{h}" fill="white"/>'
        f'<text x="{(lm[0] + lm[1]) / 2}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">difference of mean PIRs '
        f'with confidence band</text>'
        f'<text x="{(rm[0] + rm[1]) / 2}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">residual magnitude '
        f'spectrum</text>'
        f'<polygon points="{" ".join(band_pts)}" fill="#9ec5e8" '
        f'fill-opacity="0.6" stroke="none"/>'
        f'<polyline points="{avg_pts}" fill="none" stroke="#1f4e79" '
        f'stroke-width="1.5"/>'
        f'<line x1="{lm[0]}" y1="{ty(0):.2f}" x2="{lm[1]}" y2="{ty(0):.2f}" '
        f'stroke="black" stroke-dasharray="4 3"/>'
        f'<line x1="{lm[0]}" y1="{bot}" x2="{lm[1]}" y2="{bot}" '
        f'stroke="black"/>'
        f'<line x1="{lm[0]}" y1="{top}" x2="{lm[0]}" y2="{bot}" '
        f'stroke="black"/>'
        f'<text x="{lm[0]}" y="{bot + 16}" font-family="sans-serif" '
        f'font-size="11">{t0:g} s</text>'
        f'<text x="{lm[1]}" y="{bot + 16}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11">{t1:.4g} s</text>'
        f'<text x="{lm[0] - 6}" y="{ty(yhi - pad):.2f}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11">{yhi - pad:.3g}</text>'
        f'<text x="{lm[0] - 6}" y="{ty(ylo + pad):.2f}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11">{ylo + pad:.3g}</text>'
        f"{stems}"
        f'<line x1="{rm[0]}" y1="{bot}" x2="{rm[1]}" y2="{bot}" '
        f'stroke="black"/>'
        f'<line x1="{rm[0]}" y1="{top}" x2="{rm[0]}" y2="{bot}" '
        f'stroke="black"/>'
        f'<text x="{rm[0]}" y="{bot + 16}" font-family="sans-serif" '
        f'font-size="11">0 Hz</text>'
        f'<text x="{rm[1]}" y="{bot + 16}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11">{f1:.3g} Hz</text>'
        f'<text x="{rm[0] - 6}" y="{top + 4}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11">{mhi / 1.1:.3g}</text>'
        f"</svg>\n"
    )


def main(argv=None) -> int:
    """Entry point mapping outcomes onto the documented exit codes."""
    try:
        rc = cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except FrfBandError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return rc if isinstance(rc, int) else 0


if __name__ == "__main__":
    sys.exit(main())
