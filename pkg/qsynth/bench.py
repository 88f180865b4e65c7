"""Parameter sweeps over random instances, written as CSV rows."""

import concurrent.futures
import csv
import logging
import pathlib
import threading
import typing

import attr
import numpy as np
from scipy.stats import unitary_group

from . import attrs_extra, circuit, cqsp, qsp, simulator, timing, unitary, verification

TASKS = ('qsp', 'cqsp', 'unitary')
COLUMNS = ('task', 'n', 'k', 'm', 'method', 'depth', 'size', 'cnot_count',
           'analytic_depth', 'verified', 'lower_bound_ratio', 'seed')

log = logging.getLogger(__name__)


def random_state(rng: np.random.Generator, n: int) -> np.ndarray:
    """Normalized complex Gaussian vector of 2^n amplitudes."""

    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-random 2^n x 2^n unitary."""

    if n == 0:
        return np.eye(1, dtype=complex)
    return unitary_group.rvs(1 << n, random_state=rng)


def random_cqsp_spec(rng: np.random.Generator, k: int, n: int) -> cqsp.CqspSpec:
    return cqsp.CqspSpec(k, n, [random_state(rng, n) for _ in range(1 << k)])


def parse_range(text: str) -> typing.List[int]:
    """'A:B' is the inclusive range A..B, a plain 'A' is [A]."""

    try:
        if ':' in text:
            first, last = (int(part) for part in text.split(':', 1))
        else:
            first = last = int(text)
    except ValueError:
        raise ValueError(f'expected a range A:B or a number, got {text!r}') from None
    if first > last or first < 0:
        raise ValueError(f'empty or negative range {text!r}')
    return list(range(first, last + 1))


def parse_list(text: str) -> typing.List[int]:
    try:
        values = [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise ValueError(f'expected a comma-separated list of numbers, got {text!r}') from None
    if not values or any(value < 0 for value in values):
        raise ValueError(f'ancilla budgets must be non-negative, got {text!r}')
    return values


@attr.s(frozen=True, auto_attribs=True, order=True)
class Instance:
    task: str
    n: int
    k: int
    m: int

    def rng(self, seed: int) -> np.random.Generator:
        """Generator derived from the sweep seed and this instance only."""
        key = (TASKS.index(self.task), self.n, self.k, self.m)
        return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


@attr.s(auto_attribs=True)
class Row:
    instance: Instance
    method: str
    metrics: circuit.Metrics
    analytic_depth: float
    verified: str
    lower_bound_ratio: typing.Optional[float] = None
    seed: typing.Optional[int] = None

    def as_csv(self) -> typing.List[typing.Any]:
        ratio = '' if self.lower_bound_ratio is None else f'{self.lower_bound_ratio:.4f}'
        return [self.instance.task, self.instance.n, self.instance.k, self.instance.m,
                self.method, self.metrics.depth, self.metrics.size, self.metrics.cnot_count,
                f'{self.analytic_depth:.4f}', self.verified, ratio,
                '' if self.seed is None else self.seed]


def _verified(verdict: typing.Optional[verification.Verdict]) -> str:
    if verdict is None:
        return 'skipped'
    return {verification.OK: 'true', verification.FAIL: 'false',
            verification.UNVERIFIABLE: 'unverifiable'}[verdict.status]


@attr.s
class Bench:
    """Runs sweep instances; thread-safe, every instance builds its own data."""

    sim = attr.ib(validator=attr.validators.instance_of(simulator.Simulator))
    seed = attr.ib(default=0, converter=int)
    verify = attr.ib(default=True, converter=bool)
    fidelity_tolerance = attr.ib(default=1e-9, converter=float)
    unitary_tolerance = attr.ib(default=1e-8, converter=float)
    durations = attr.ib(factory=timing.Timing)
    _lock = attr.ib(init=False, factory=threading.Lock, repr=False, eq=False)
    _log = attrs_extra.log('%s.Bench' % __name__)

    def run_instance(self, instance: Instance) -> Row:
        rng = instance.rng(self.seed)
        self._log.debug('running %s', instance)
        local = timing.Timing()
        verdict = None
        ratio = None

        if instance.task == 'qsp':
            v = random_state(rng, instance.n)
            method = qsp.select_method(instance.n, instance.m)
            with local.record_duration(timing.SYNTHESIS):
                c = qsp.build_qsp(v, instance.m, method)
            analytic = qsp.analytic_depth(instance.n, instance.m)
            if self.verify:
                with local.record_duration(timing.VERIFICATION):
                    verdict = verification.check_state_preparation(
                        self.sim, c, v, self.fidelity_tolerance)
        elif instance.task == 'cqsp':
            spec = random_cqsp_spec(rng, instance.k, instance.n)
            method = cqsp.dispatch(instance.k, instance.n, instance.m)
            with local.record_duration(timing.SYNTHESIS):
                c = cqsp.build_cqsp(spec, instance.m, method)
            analytic = cqsp.analytic_depth(instance.k, instance.n, instance.m)
            if self.verify:
                with local.record_duration(timing.VERIFICATION):
                    verdict = verification.check_cqsp(self.sim, c, spec, self.fidelity_tolerance)
        elif instance.task == 'unitary':
            u = random_unitary(rng, instance.n)
            method = 'csd'
            with local.record_duration(timing.SYNTHESIS):
                c = unitary.build_unitary_csd(u, instance.m)
            analytic = unitary.analytic_depth(instance.n, instance.m)
            bound = unitary.cnot_lower_bound(instance.n)
            ratio = c.cnot_count / bound if bound else None
            if self.verify:
                with local.record_duration(timing.VERIFICATION):
                    verdict = verification.check_unitary(self.sim, c, u, self.unitary_tolerance)
        else:
            raise ValueError(f'unknown bench task {instance.task!r}')

        with self._lock:
            self.durations += local
        if verdict is not None and verdict.status == verification.FAIL:
            self._log.warning('%s failed verification: %s', instance, verdict.reason)
        return Row(instance, method, circuit.metrics(c), analytic, _verified(verdict), ratio,
                   seed=self.seed)

    def run(self, instances: typing.Iterable[Instance], jobs: int = 1) -> typing.List[Row]:
        """Rows sorted by (task, n, k, m), whatever order the instances finish in."""

        instances = sorted(set(instances))
        if jobs <= 1:
            rows = [self.run_instance(instance) for instance in instances]
        else:
            with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as executor:
                rows = list(executor.map(self.run_instance, instances))
        return sorted(rows, key=lambda row: row.instance)


def sweep(task: str, ns: typing.Sequence[int], ks: typing.Sequence[int],
          ms: typing.Sequence[int]) -> typing.List[Instance]:
    if task not in TASKS:
        raise ValueError(f'unknown bench task {task!r}')
    if task != 'cqsp':
        ks = [0]
    return [Instance(task, n, k, m) for n in ns for k in ks for m in ms if n >= 1]


def write_csv(path: pathlib.Path, rows: typing.Iterable[Row]) -> None:
    with path.open('w', newline='', encoding='utf8') as outfile:
        writer = csv.writer(outfile)
        writer.writerow(COLUMNS)
        for row in rows:
            writer.writerow(row.as_csv())
    log.info('Wrote %s', path)


def fit_log2_slope(xs: typing.Sequence[float], values: typing.Sequence[float]) -> float:
    """Least-squares slope of log2(values) against xs."""
    slope, _ = np.polyfit(np.asarray(xs, dtype=float), np.log2(np.asarray(values, dtype=float)), 1)
    return float(slope)
