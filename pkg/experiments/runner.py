"""
Experiment pipelines behind the management commands.

A simulation writes a trajectory directory laid out as

    <out>/snapshots/index.csv        index, t, cum_grad_p
    <out>/snapshots/snap_00000.csv   one field snapshot per sample
    <out>/series.csv                 diagnostics series (schemas/series.json)
    <out>/summary.json               slopes, calibrated constants, certificates
"""
import csv
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from django.db import DatabaseError, transaction

from advection.patterns import make_pattern
from advection.selfsimilar import BandOverflow, SelfSimilarSchedule, frozen_base, self_similar_trajectory
from advection.solver import run
from dcommutator.checks import (
    QUANTITY_SQRT_W, QUANTITY_V, RANDOM_TRIPLES, calibrate, dual_exponent_for_sqrt_w, holder_ratio_probe,
)
from dcommutator.trilinear import trilinear_fourier
from functionals.functionals import hs_norm, punctured_l2_squared, v_functional, w_functional
from mixing.certificates import InitialNorms, certify_trajectory, geometric_certificate
from mixing.scales import HypothesisError, geometric_mixing_scale
from spectral.fields import lp_norm
from spectral.grid import make_grid
from spectral.snapshots import read_snapshot, write_snapshot

from .models import ExperimentRun
from .serializers import DecayCertificateSerializer
from .utils import (
    format_table, json_safe, least_squares_slope, series_columns, sobolev_column, write_json,
    write_series, write_table,
)

logger = logging.getLogger(__name__)

SNAPSHOT_DIR = 'snapshots'
INDEX_FILE = 'index.csv'
SERIES_FILE = 'series.csv'
SUMMARY_FILE = 'summary.json'
INDEX_COLUMNS = ['index', 't', 'cum_grad_p']


@dataclass
class DiagnosticsRecord:
    t: float
    l2: float
    v: float | None
    w: float | None
    h_norms: dict = field(default_factory=dict)
    eps_geom: float | None = None
    cum_grad_p: float = 0.0
    dvdt_gap: float | None = None

    def as_row(self):
        row = {
            't': self.t,
            'l2': self.l2,
            'v': self.v,
            'w': self.w,
            'eps_geom': self.eps_geom,
            'cum_grad_p': self.cum_grad_p,
            'dvdt_gap': self.dvdt_gap,
        }
        for s, value in self.h_norms.items():
            row[sobolev_column(s)] = value
        return row


def diagnostics_record(theta, t, cum_grad, diagnostics):
    """Functionals of one snapshot; h_norms is keyed by signed order (s > 0 means H^-s)."""
    h_norms = {float(s): hs_norm(theta, -s) for s in diagnostics.get('s', ())}
    h_norms.update({-float(s): hs_norm(theta, s) for s in diagnostics.get('positive_s', ())})
    eps_geom = None
    kappa = diagnostics.get('kappa')
    if kappa is not None and np.any(theta.values):
        eps_geom = geometric_mixing_scale(theta, kappa).eps
    return DiagnosticsRecord(
        t=float(t),
        l2=float(np.sqrt(theta.l2_squared())),
        v=v_functional(theta) if diagnostics.get('v', True) else None,
        w=w_functional(theta) if diagnostics.get('w', True) else None,
        h_norms=h_norms,
        eps_geom=None if eps_geom is None else float(eps_geom),
        cum_grad_p=float(cum_grad),
    )


def _attach_dvdt_gaps(records, snapshots, flow):
    """|centred difference of V - 2<L theta, -u.grad theta>| at the interior samples."""
    for j in range(1, len(records) - 1):
        before, now, after = records[j - 1], records[j], records[j + 1]
        if None in (before.v, after.v):
            continue
        centred = (after.v - before.v) / (after.t - before.t)
        rate = trilinear_fourier(snapshots[j], snapshots[j], flow.velocity(now.t))
        now.dvdt_gap = float(abs(centred - rate))


def diagnostics_series(times, snapshots, cum_grads, diagnostics, flow=None):
    records = [diagnostics_record(theta, t, cum, diagnostics)
               for t, theta, cum in zip(times, snapshots, cum_grads)]
    if diagnostics.get('dvdt_check') and flow is not None:
        _attach_dvdt_gaps(records, snapshots, flow)
    return records


def columns_for(diagnostics, flow=None):
    return series_columns(
        diagnostics.get('s', ()),
        diagnostics.get('positive_s', ()),
        dvdt_gap=bool(diagnostics.get('dvdt_check')) and flow is not None,
    )


def write_snapshots(directory, trajectory):
    directory = Path(directory) / SNAPSHOT_DIR
    rows = []
    for index, (t, theta, cum) in enumerate(zip(trajectory.times, trajectory.snapshots, trajectory.cum_grad)):
        write_snapshot(directory / f'snap_{index:05d}.csv', theta)
        rows.append({'index': index, 't': t, 'cum_grad_p': cum})
    write_table(directory / INDEX_FILE, INDEX_COLUMNS, rows)
    return directory


def load_snapshots(directory):
    """(times, snapshots, cum_grads) from a trajectory or snapshot directory."""
    directory = Path(directory)
    if (directory / SNAPSHOT_DIR).is_dir():
        directory = directory / SNAPSHOT_DIR
    index_path = directory / INDEX_FILE
    if index_path.exists():
        entries = [(int(float(row['index'])), float(row['t']), float(row['cum_grad_p']))
                   for row in csv.DictReader(io.StringIO(index_path.read_text()))]
    else:
        # bare directories carry no times; number the snapshots instead
        paths = sorted(directory.glob('snap_*.csv'))
        entries = [(int(p.stem.split('_')[1]), float(j), 0.0) for j, p in enumerate(paths)]
    if not entries:
        raise FileNotFoundError(f"No snapshots found in {directory}")
    times, snapshots, cum_grads = [], [], []
    for index, t, cum in entries:
        snapshots.append(read_snapshot(directory / f'snap_{index:05d}.csv'))
        times.append(t)
        cum_grads.append(cum)
    return times, snapshots, cum_grads


def _monitor(calibration, reference, delta, cumulative, horizon):
    """|Delta| <= C * reference * cumulative, plus the least-squares slope against the mean-rate bound."""
    if calibration is None:
        return None
    bound = calibration.C * reference * cumulative
    mean_grad = cumulative / horizon if horizon > 0 else None
    return {
        'C': calibration.C,
        'C_provenance': calibration.provenance,
        'reference': reference,
        'delta': delta,
        'bound': bound,
        'holds': abs(delta) <= bound * (1 + 1e-6) + 1e-12,
        'slope_bound': None if mean_grad is None else calibration.C * reference * mean_grad,
    }


def summarize(config, trajectory, records):
    """slopes of V and sqrt(W) against t, calibrations, monitored inequalities and certificates."""
    diagnostics = config.diagnostics
    times = [r.t for r in records]
    v_values = [r.v for r in records]
    w_values = [r.w for r in records]
    horizon = trajectory.times[-1]
    cumulative = trajectory.cum_grad[-1]
    theta0 = trajectory.initial
    p = trajectory.p

    slopes = {
        'v': least_squares_slope(times, v_values) if None not in v_values else None,
        'sqrt_w': least_squares_slope(times, np.sqrt(w_values)) if None not in w_values else None,
    }
    l2 = np.array([r.l2 for r in records])
    summary = {
        'config': config.as_dict(),
        'grid': trajectory.grid.describe(),
        'flow': trajectory.flow.describe(),
        'samples': len(records),
        'horizon': horizon,
        'cum_grad_p': cumulative,
        'slopes': slopes,
        'l2_drift': float(np.max(np.abs(l2 - l2[0])) / l2[0]) if l2[0] > 0 else 0.0,
        'calibration': {},
        'monitor': {},
        'certificates': [],
    }
    if len(records) < 2:
        summary['notice'] = "single sample; no slopes fitted"

    certificates = []
    if diagnostics.get('certificates'):
        mode = diagnostics['calibration']
        cal_v = calibrate(trajectory, mode=mode, quantity=QUANTITY_V)
        summary['calibration']['V'] = cal_v.as_dict()
        reference_v = InitialNorms.of(theta0, p).holder_product()
        summary['monitor']['V'] = _monitor(
            cal_v, reference_v, v_functional(trajectory.final) - v_functional(theta0), cumulative, horizon)
        if slopes['v'] is not None and summary['monitor']['V']['slope_bound'] is not None:
            summary['monitor']['V']['slope'] = slopes['v']

        if p >= 2:
            cal_w = calibrate(trajectory, mode=mode, quantity=QUANTITY_SQRT_W)
            summary['calibration']['sqrtW'] = cal_w.as_dict()
            reference_w = lp_norm(theta0.centered(), dual_exponent_for_sqrt_w(p))
            summary['monitor']['sqrtW'] = _monitor(
                cal_w, reference_w, np.sqrt(w_functional(trajectory.final)) - np.sqrt(w_functional(theta0)),
                cumulative, horizon)
        else:
            logger.info("Skipping the sqrt(W) calibration: it needs p >= 2, got p=%g", p)

        if punctured_l2_squared(theta0) > 0:
            cert = certify_trajectory(trajectory, diagnostics['certificate_s'], cal_v.C, cal_v.provenance)
            certificates.append(cert)
        if diagnostics.get('kappa') is not None:
            try:
                certificates.append(geometric_certificate(theta0, diagnostics['kappa'], diagnostics.get('B', 10.0)))
            except HypothesisError as exc:
                logger.warning("Geometric certificate skipped: %s", exc)
                summary['geometric_certificate_skipped'] = str(exc)
        summary['certificates'] = [DecayCertificateSerializer(c).data for c in certificates]
    return json_safe(summary), certificates


def record_run(command, parameters, output_dir, seed, summary, certificates=(), status=ExperimentRun.COMPLETED):
    """Store a finished run; returns None when the database is not available."""
    try:
        with transaction.atomic():
            run_record = ExperimentRun.objects.create(
                command=command,
                parameters=json_safe(parameters),
                output_dir=str(output_dir or ''),
                seed=seed,
            )
            for cert in certificates:
                DecayCertificateSerializer(cert).save_for(run_record)
            run_record.finish(status, json_safe(summary))
    except DatabaseError as exc:
        logger.info("Run not recorded (%s); run `manage.py migrate` to keep a history", exc)
        return None
    return run_record


@dataclass
class SimulationResult:
    output_dir: Path
    trajectory: object
    records: list
    summary: dict
    certificates: list
    run: ExperimentRun | None = None

    @property
    def series_path(self):
        return self.output_dir / SERIES_FILE

    @property
    def summary_path(self):
        return self.output_dir / SUMMARY_FILE


def simulate(config, out=None, seed=None, record=True):
    config = config.with_seed(seed)
    grid = config.build_grid()
    flow = config.build_flow(grid)
    theta0 = config.build_initial(grid)
    out_dir = config.output_directory(out)
    logger.info("Simulating %s on %s up to T=%g into %s", flow.name, grid.describe(), config.run['horizon'], out_dir)

    trajectory = run(
        theta0, flow, config.run['horizon'], config.run.get('sample_dt', 0.0),
        dt=config.run.get('dt'), p=config.p,
    )
    records = diagnostics_series(
        trajectory.times, trajectory.snapshots, trajectory.cum_grad, config.diagnostics, flow)

    out_dir.mkdir(parents=True, exist_ok=True)
    if config.output.get('snapshots', True):
        write_snapshots(out_dir, trajectory)
    write_series(out_dir / SERIES_FILE, [r.as_row() for r in records], columns_for(config.diagnostics, flow))
    summary, certificates = summarize(config, trajectory, records)
    write_json(out_dir / SUMMARY_FILE, summary)

    run_record = None
    if record:
        run_record = record_run(ExperimentRun.SIMULATE, config.as_dict(), out_dir, config.seed, summary, certificates)
    return SimulationResult(out_dir, trajectory, records, summary, certificates, run_record)


def recompute_series(directory, diagnostics, out=None):
    """Recompute series.csv from the snapshots of an earlier run."""
    times, snapshots, cum_grads = load_snapshots(directory)
    records = diagnostics_series(times, snapshots, cum_grads, diagnostics)
    target = Path(out) if out else Path(directory)
    if target.suffix != '.csv':
        target = target / SERIES_FILE
    write_series(target, [r.as_row() for r in records], columns_for(diagnostics))
    return target, records


@dataclass
class SharpnessReport:
    m: int
    n_max: int
    pattern: str
    grid: str
    rows: list
    centred_norm2: float
    uncentred_norm2: float
    slope: float | None
    lam: float
    base_mean: float
    notice: str | None = None

    @property
    def expected_slope(self):
        return -np.log(self.lam) * self.centred_norm2

    @property
    def uncentred_slope(self):
        return -np.log(self.lam) * self.uncentred_norm2

    @property
    def slope_error(self):
        if self.slope is None:
            return None
        return abs(self.slope - self.expected_slope)

    @property
    def relative_slope_error(self):
        if self.slope is None or self.expected_slope == 0:
            return None
        return self.slope_error / abs(self.expected_slope)

    def as_dict(self):
        return json_safe({
            'm': self.m,
            'lam': self.lam,
            'base_mean': self.base_mean,
            'n_max': self.n_max,
            'pattern': self.pattern,
            'grid': self.grid,
            'rows': [{'n': n, 'v': v} for n, v in self.rows],
            'slope': self.slope,
            'expected_slope': self.expected_slope,
            'slope_error': self.slope_error,
            'relative_slope_error': self.relative_slope_error,
            'uncentred_slope': self.uncentred_slope,
            'uncentred_slope_error': None if self.slope is None else abs(self.slope - self.uncentred_slope),
            'notice': self.notice,
        })

    def table(self):
        return format_table(['n', 'v'], [{'n': n, 'v': v} for n, v in self.rows])


def sharpness(m, n_max, pattern='cosine', N=1024, d=2, **pattern_params):
    """
    V(theta(n)) for n = 0..n_max along the self-similar trajectory with a
    frozen base, and its least-squares slope in n.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be non-negative, got {n_max}")
    grid = make_grid(d, 'torus', N)
    theta0 = make_pattern(pattern, grid, **pattern_params)
    schedule = SelfSimilarSchedule(m, frozen_base(theta0), periods=n_max)
    limit = schedule.max_periods()
    if limit is not None and n_max > limit:
        raise BandOverflow(f"{m}^{n_max} pushes the active band of {pattern!r} past N/2 on N={N}", limit)

    rows = [(n, v_functional(self_similar_trajectory(schedule, n))) for n in range(n_max + 1)]
    slope = None
    notice = None
    if n_max == 0:
        notice = "single point; no slope fitted"
    else:
        slope = least_squares_slope([n for n, _ in rows], [v for _, v in rows])
    report = SharpnessReport(
        m=schedule.m,
        n_max=n_max,
        pattern=pattern,
        grid=grid.describe(),
        rows=rows,
        centred_norm2=punctured_l2_squared(theta0),
        uncentred_norm2=theta0.l2_squared(),
        slope=slope,
        lam=schedule.lam,
        base_mean=schedule.base_mean,
        notice=notice,
    )
    if slope is not None:
        logger.info("Sharpness slope %.17g against %.17g (m=%d)", slope, report.expected_slope, report.m)
    return report


def write_sharpness(directory, report):
    directory = Path(directory)
    write_table(directory / 'sharpness.csv', ['n', 'v'], [{'n': n, 'v': v} for n, v in report.rows])
    write_json(directory / 'sharpness.json', report.as_dict())
    return directory


PROBE_FILE = 'probe.csv'
PROBE_SUMMARY_FILE = 'probe_summary.json'
PROBE_COLUMNS = ['seed', 'p', 'ratio']
PROBE_NOTICE = 'Empirical maxima over the sampled triples; they do not bound the true constant.'


@dataclass
class ProbeReport:
    grid: object
    family: str
    kmax: int
    statistics: list

    def rows(self):
        return [{'seed': s.seed, 'p': s.p, 'ratio': s.ratio} for stats in self.statistics for s in stats.samples]

    def as_dict(self):
        return {
            'grid': self.grid.describe(),
            'family': self.family,
            'kmax': self.kmax,
            'by_p': [stats.summary() for stats in self.statistics],
            'notice': PROBE_NOTICE,
        }


def holder_probe(p_values, seeds, N=64, kmax=4, family=RANDOM_TRIPLES):
    grid = make_grid(2, 'torus', N)
    statistics = []
    for p in p_values:
        stats = holder_ratio_probe(grid, p, seeds, family=family, kmax=kmax)
        logger.info("Hölder probe p=%g: max ratio %.6g over %d triples", p, stats.summary()['max'], len(seeds))
        statistics.append(stats)
    return ProbeReport(grid, family, kmax, statistics)


def write_probe(directory, report):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_table(directory / PROBE_FILE, PROBE_COLUMNS, report.rows())
    write_json(directory / PROBE_SUMMARY_FILE, report.as_dict())
    return directory
