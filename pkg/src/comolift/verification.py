"""Machine checks that a lifted law actually does what it claims.

``verify_model`` audits a (model, law) pair and returns a report of named
checks, each a (statistic, threshold, pass) row.  Deterministic rows:

* law_well_formed: 1 or 2 branches per atom, probabilities in (0, 1]
  summing to 1 (within one or two ulp, since a stored pair fl(lam),
  fl(1 - lam) can miss 1 by an ulp when lam is tiny).
* branch_points_on_curve: worst Chebyshev distance from a branch point to
  the staircase curve.  Laws built by ``lift`` sit at distance exactly 0.
* decompose_reconstruction: worst relative error of lam*e1 + (1-lam)*e2
  against the payoff, freshly decomposed.
* cond_exp_identity: worst relative gap between an atom's law mean and its
  payoff.  This is the conditional-expectation contract on each atom.
* tower_property: the same contract aggregated, sum_a w_a * mean_a against
  sum_a w_a * payoff_a, normalized by max(1, sum w|f|, sum w|g|) because the
  aggregate itself can cancel to zero.
* comonotone_pairwise / comonotone_witness: the pooled branch points must be
  a comonotone set; checked both by the full pairwise product scan and by
  the sort-based witness criterion.
* norm_bound: every branch gauge stays under max(2 * gauge(payoff), 1).

Monte Carlo rows (when mc_samples > 0) replay the sampler and test it at
five standard errors using the law's exact two-point moments: empirical
per-atom means, first-branch frequencies, atom frequencies, and bit-exact
membership of every emitted point in its atom's branch set.

Relative residuals are normalized by max(1, scale): payoffs here range over
many orders of magnitude, and below scale 1 an absolute comparison is the
honest one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .decomposition import decompose
from .errors import InvalidInputError
from .filtration import FiltrationModel
from .geometry import (
    GAUGE_CAP,
    MAX_STAGE,
    Point2,
    curve_segments,
    gauge,
    scale_index,
    segment_distance,
)
from .lifting import LiftedLaw, lifted_norm_bound, sample_lift_arrays
from .rng import raw_words

__all__ = [
    "CheckRow",
    "VerificationReport",
    "check_comonotone_pairwise",
    "check_comonotone_witness",
    "verify_model",
    "PAIRWISE_FULL_SCAN_LIMIT",
]

#: Above this many pooled points the pairwise scan runs on a seeded
#: subsample of this size; the witness check always sees every point.
PAIRWISE_FULL_SCAN_LIMIT = 20_000
_PAIRWISE_SUBSAMPLE = 10_000

#: |sum of branch probabilities - 1| allowed: two rounding errors.
_PROB_SUM_TOL = 2.0 ** -52

_MC_SIGMAS = 5.0


class CheckRow(NamedTuple):
    """One named check: the measured statistic against its threshold."""

    name: str
    statistic: float
    threshold: float
    passed: bool


@dataclass(frozen=True, slots=True)
class VerificationReport:
    """Outcome of :func:`verify_model`.

    The four summary numbers are copies of the matching rows' statistics;
    ``det_checks`` and ``mc_checks`` carry every row.  ``overall_pass`` is
    the conjunction of all rows.
    """

    max_reconstruction_error: float
    cond_exp_max_residual: float
    min_comonotone_product: float
    min_norm_bound_margin: float
    det_checks: tuple[CheckRow, ...]
    mc_checks: tuple[CheckRow, ...]
    overall_pass: bool

    def rows(self) -> tuple[CheckRow, ...]:
        return self.det_checks + self.mc_checks


def _point_arrays(points: Sequence[Point2]) -> tuple[np.ndarray, np.ndarray]:
    xs = np.array([p.x for p in points], dtype=np.float64)
    ys = np.array([p.y for p in points], dtype=np.float64)
    return xs, ys


def _pairwise_min_product(xs: np.ndarray, ys: np.ndarray) -> float:
    m = xs.size
    # ~2.5e6 cells per block keeps the temporaries around 20 MB.
    block = max(1, 2_500_000 // m)
    best = math.inf
    for lo in range(0, m, block):
        hi = min(lo + block, m)
        prod = (xs[lo:hi, None] - xs[None, :]) * (ys[lo:hi, None] - ys[None, :])
        rows = np.arange(hi - lo)
        prod[rows, lo + rows] = math.inf  # self-pairs carry no information
        best = min(best, float(prod.min()))
    return best


def check_comonotone_pairwise(points: Sequence[Point2], tol: float = 0.0) -> tuple[float, bool]:
    """Minimum of (x - x')(y - y') over all distinct pairs, and whether it
    clears -tol.  Fewer than two points pass vacuously with statistic +inf.
    """
    if not isinstance(tol, (int, float)) or not math.isfinite(tol) or tol < 0.0:
        raise InvalidInputError(f"tol must be finite and nonnegative, got {tol!r}")
    if len(points) == 0:
        raise InvalidInputError("need at least one point")
    if len(points) < 2:
        return math.inf, True
    xs, ys = _point_arrays(points)
    worst = _pairwise_min_product(xs, ys)
    return worst, worst >= -tol


def check_comonotone_witness(points: Sequence[Point2], tol: float = 0.0) -> tuple[float, bool]:
    """Sort by x + y (ties by x, then y) and require both coordinates
    nondecreasing.

    For tol = 0 this is equivalent to the pairwise product test: in a
    comonotone set the sum x + y orders both coordinates simultaneously, so
    a single sorted sweep certifies every pair at once.  The y tie-break
    matters when x + y rounds to the same float for points differing only
    in y.  Returns the worst consecutive coordinate step and whether it
    clears -tol.
    """
    if not isinstance(tol, (int, float)) or not math.isfinite(tol) or tol < 0.0:
        raise InvalidInputError(f"tol must be finite and nonnegative, got {tol!r}")
    if len(points) == 0:
        raise InvalidInputError("need at least one point")
    if len(points) < 2:
        return math.inf, True
    xs, ys = _point_arrays(points)
    order = np.lexsort((ys, xs, xs + ys))
    worst = float(min(np.diff(xs[order]).min(), np.diff(ys[order]).min()))
    return worst, worst >= -tol


def _law_shape_deviation(law: LiftedLaw) -> float:
    worst = 0.0
    for atom_id, branch in law.branches.items():
        if len(branch) not in (1, 2):
            return math.inf
        probs = [p for p, _ in branch]
        if any(not 0.0 < p <= 1.0 for p in probs):
            return math.inf
        worst = max(worst, abs(math.fsum(probs) - 1.0))
    return worst


def _branch_curve_distance(law: LiftedLaw) -> float:
    points = law.support_points()
    top = 1
    for pt in points:
        g = gauge(pt)
        # Points beyond the stage cap are off-curve by construction; scanning
        # up to the cap still reports a huge (failing) distance for them.
        top = MAX_STAGE if g > GAUGE_CAP else max(top, scale_index(g) + 1)
    segs = curve_segments(min(top, MAX_STAGE))
    worst = 0.0
    for pt in points:
        worst = max(worst, min(segment_distance(pt, seg) for seg in segs))
    return worst


def _subsample(xs: np.ndarray, ys: np.ndarray, seed: int) -> tuple[np.ndarray, np.ndarray]:
    sel = raw_words(seed, 0, _PAIRWISE_SUBSAMPLE)
    keep = (sel % np.uint64(xs.size)).astype(np.int64)
    return xs[keep], ys[keep]


def verify_model(
    model: FiltrationModel,
    law: LiftedLaw,
    mc_samples: int = 0,
    seed: int = 42,
    tol: float = 1e-9,
) -> VerificationReport:
    """Run every deterministic check, plus Monte Carlo when asked.

    ``tol`` bounds the relative residual rows and (negated) the
    comonotonicity and norm-margin rows; the Monte Carlo rows use five
    standard errors regardless of tol.
    """
    if not isinstance(mc_samples, int) or mc_samples < 0:
        raise InvalidInputError(f"mc_samples must be a nonnegative int, got {mc_samples!r}")
    if not isinstance(tol, (int, float)) or not math.isfinite(tol) or tol <= 0.0:
        raise InvalidInputError(f"tol must be finite and positive, got {tol!r}")
    ids = model.ids()
    law_ids = set(law.branches)
    if set(ids) != law_ids:
        raise InvalidInputError(
            f"law atoms do not match model atoms: missing {sorted(set(ids) - law_ids)!r}, "
            f"extra {sorted(law_ids - set(ids))!r}"
        )

    det: list[CheckRow] = []

    shape_dev = _law_shape_deviation(law)
    det.append(CheckRow("law_well_formed", shape_dev, _PROB_SUM_TOL, shape_dev <= _PROB_SUM_TOL))

    curve_dev = _branch_curve_distance(law)
    det.append(CheckRow("branch_points_on_curve", curve_dev, tol, curve_dev <= tol))

    recon_err = 0.0
    for atom in model.atoms:
        d = decompose(atom.payoff)
        rx = d.lam * d.e1.x + (1.0 - d.lam) * d.e2.x
        ry = d.lam * d.e1.y + (1.0 - d.lam) * d.e2.y
        scale = max(1.0, gauge(atom.payoff))
        err = max(abs(rx - atom.payoff.x), abs(ry - atom.payoff.y)) / scale
        recon_err = max(recon_err, err)
    det.append(CheckRow("decompose_reconstruction", recon_err, tol, recon_err <= tol))

    mean_err = 0.0
    for atom in model.atoms:
        mx, my = law.mean(atom.id)
        scale = max(1.0, gauge(atom.payoff))
        err = max(abs(mx - atom.payoff.x), abs(my - atom.payoff.y)) / scale
        mean_err = max(mean_err, err)
    det.append(CheckRow("cond_exp_identity", mean_err, tol, mean_err <= tol))

    w = model.weights()
    f = np.array([a.payoff.x for a in model.atoms])
    g = np.array([a.payoff.y for a in model.atoms])
    means = np.array([law.mean(a.id) for a in model.atoms])
    lhs_f = math.fsum((w * f).tolist())
    lhs_g = math.fsum((w * g).tolist())
    rhs_f = math.fsum((w * means[:, 0]).tolist())
    rhs_g = math.fsum((w * means[:, 1]).tolist())
    tower_scale = max(
        1.0,
        math.fsum((w * np.abs(f)).tolist()),
        math.fsum((w * np.abs(g)).tolist()),
    )
    tower_err = max(abs(lhs_f - rhs_f), abs(lhs_g - rhs_g)) / tower_scale
    det.append(CheckRow("tower_property", tower_err, tol, tower_err <= tol))

    support = law.support_points()
    xs, ys = _point_arrays(support)
    if xs.size > PAIRWISE_FULL_SCAN_LIMIT:
        sx, sy = _subsample(xs, ys, seed)
        min_prod = _pairwise_min_product(sx, sy) if sx.size >= 2 else math.inf
    else:
        min_prod = _pairwise_min_product(xs, ys) if xs.size >= 2 else math.inf
    det.append(CheckRow("comonotone_pairwise", min_prod, -tol, min_prod >= -tol))

    wit_stat, _ = check_comonotone_witness(support, tol) if len(support) >= 1 else (math.inf, True)
    det.append(CheckRow("comonotone_witness", wit_stat, -tol, wit_stat >= -tol))

    margin = math.inf
    for row in lifted_norm_bound(model, law).values():
        margin = min(margin, row.margin / max(1.0, row.bound))
    det.append(CheckRow("norm_bound", margin, -tol, margin >= -tol))

    mc: list[CheckRow] = []
    if mc_samples > 0:
        mc = _mc_checks(model, law, mc_samples, seed)

    all_rows = det + mc
    report = VerificationReport(
        max_reconstruction_error=recon_err,
        cond_exp_max_residual=max(mean_err, tower_err),
        min_comonotone_product=min_prod,
        min_norm_bound_margin=margin,
        det_checks=tuple(det),
        mc_checks=tuple(mc),
        overall_pass=all(r.passed for r in all_rows),
    )
    return report


def _mc_checks(model: FiltrationModel, law: LiftedLaw, mc_samples: int, seed: int) -> list[CheckRow]:
    ids = model.ids()
    natoms = len(ids)
    idx, _u, xi, eta, first = sample_lift_arrays(model, law, mc_samples, seed)

    # Branch tables aligned with atom order, single-branch atoms duplicated.
    p1 = np.empty((natoms, 2))
    p2 = np.empty((natoms, 2))
    prob1 = np.empty(natoms)
    two_branch = np.zeros(natoms, dtype=bool)
    for i, atom_id in enumerate(ids):
        branch = law.branches[atom_id]
        if len(branch) == 1:
            _, pt = branch[0]
            p1[i] = p2[i] = (pt.x, pt.y)
            prob1[i] = 1.0
        else:
            (pa, pta), (_pb, ptb) = branch
            p1[i] = (pta.x, pta.y)
            p2[i] = (ptb.x, ptb.y)
            prob1[i] = pa
            two_branch[i] = True

    hit = ((xi == p1[idx, 0]) & (eta == p1[idx, 1])) | ((xi == p2[idx, 0]) & (eta == p2[idx, 1]))
    support_bad = 1.0 - float(np.mean(hit))

    counts = np.bincount(idx, minlength=natoms).astype(np.float64)
    sum_x = np.bincount(idx, weights=xi, minlength=natoms)
    sum_y = np.bincount(idx, weights=eta, minlength=natoms)
    firsts = np.bincount(idx, weights=first.astype(np.float64), minlength=natoms)

    z_mean = 0.0
    z_freq = 0.0
    for i, atom_id in enumerate(ids):
        n_a = counts[i]
        if n_a == 0 or not two_branch[i]:
            continue
        mx, my = law.mean(atom_id)
        pa = prob1[i]
        pb = 1.0 - pa
        var_x = pa * pb * (p1[i, 0] - p2[i, 0]) ** 2
        var_y = pa * pb * (p1[i, 1] - p2[i, 1]) ** 2
        emp_x = sum_x[i] / n_a
        emp_y = sum_y[i] / n_a
        if var_x > 0.0:
            z_mean = max(z_mean, abs(emp_x - mx) / math.sqrt(var_x / n_a))
        if var_y > 0.0:
            z_mean = max(z_mean, abs(emp_y - my) / math.sqrt(var_y / n_a))
        z_freq = max(z_freq, abs(firsts[i] / n_a - pa) / math.sqrt(pa * pb / n_a))

    w = model.weights()
    freq = counts / float(mc_samples)
    se = np.sqrt(w * (1.0 - w) / float(mc_samples))
    ok = se > 0.0
    z_atom = float(np.max(np.abs(freq[ok] - w[ok]) / se[ok])) if np.any(ok) else 0.0

    return [
        CheckRow("sampler_support_exact", support_bad, 0.0, support_bad <= 0.0),
        CheckRow("sampler_mean", z_mean, _MC_SIGMAS, z_mean <= _MC_SIGMAS),
        CheckRow("sampler_branch_freq", z_freq, _MC_SIGMAS, z_freq <= _MC_SIGMAS),
        CheckRow("sampler_atom_freq", z_atom, _MC_SIGMAS, z_atom <= _MC_SIGMAS),
    ]
