# Copyright 2022 TerraPower, LLC
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""
Integer-order Bessel functions of the first kind and tables of their positive roots.

:py:func:`besselJ` evaluates :math:`J_k(x)` for ``0 <= k <= MAX_ORDER`` and
``0 <= x <= MAX_ARGUMENT``. Each point is routed to one of three evaluation regimes:

* the ascending power series, where its terms decrease from the start
  (``x <= SERIES_CROSSOVER`` or ``x**2 / 4 < k + 1``);
* Hankel's large-argument expansion, for ``x >= ASYMPTOTIC_CROSSOVER`` and ``k**2 <= x``;
* Miller's downward recurrence normalized with :math:`J_0 + 2\\sum_m J_{2m} = 1` for
  everything else.

The absolute error is below 1e-12 over ``x <= 2000`` and ``k <= 256``.

:py:func:`besselRoots` tabulates :math:`w_{j,k}`, the j-th positive root of :math:`J_k`.
Roots are bracketed by a sign-change scan of all orders at once, started from McMahon's
expansion when it falls inside the bracket, and refined with safeguarded Newton steps.
Tables are cached per ``(maxOrder, rootsPerOrder)`` and are read-only.
"""
import functools

import numpy as np
from scipy import special

from armi import runLog
from armi.utils import codeTiming

from .errors import ValidationError, RootRefinementError

MAX_ORDER = 512
MAX_ARGUMENT = 5000.0

SERIES_CROSSOVER = 4.0
ASYMPTOTIC_CROSSOVER = 50.0

ROOT_RESIDUAL_LIMIT = 1.0e-10
ROOT_MAX_ITERATIONS = 100
SCAN_STEP = 0.5

_EPS = np.finfo(float).eps
_SERIES_TERMS = 120
_ASYMPTOTIC_TERMS = 40
_MILLER_SEED = 1.0e-30
_RESCALE_THRESHOLD = 1.0e200


def besselJ(order, x):
    """
    Evaluate the Bessel function of the first kind of integer order.

    Parameters
    ----------
    order : int or array_like of int
        Order(s) ``k``, ``0 <= k <= MAX_ORDER``.
    x : float or array_like
        Argument(s), finite, ``0 <= x <= MAX_ARGUMENT``. Broadcast against ``order``.

    Returns
    -------
    float or numpy.ndarray
        :math:`J_k(x)`; a Python float when both inputs are scalars.

    Raises
    ------
    ValidationError
        For non-integral or out-of-range orders and for negative, non-finite or too
        large arguments.
    """
    orderArray = np.asarray(order)
    if orderArray.dtype.kind not in "iu":
        if orderArray.dtype.kind != "f" or np.any(orderArray != np.round(orderArray)):
            raise ValidationError(f"Bessel order must be integral, got {order!r}")
    xArray = np.asarray(x, dtype=float)
    orderArray, xArray = np.broadcast_arrays(orderArray.astype(np.int64), xArray)

    if orderArray.size and (orderArray.min() < 0 or orderArray.max() > MAX_ORDER):
        raise ValidationError(
            f"Bessel order must be within [0, {MAX_ORDER}], got range "
            f"[{orderArray.min()}, {orderArray.max()}]"
        )
    if not np.all(np.isfinite(xArray)):
        raise ValidationError("Bessel argument must be finite")
    if xArray.size and (xArray.min() < 0.0 or xArray.max() > MAX_ARGUMENT):
        raise ValidationError(
            f"Bessel argument must be within [0, {MAX_ARGUMENT}], got range "
            f"[{xArray.min()}, {xArray.max()}]"
        )

    values = _evaluate(orderArray.ravel(), xArray.ravel()).reshape(xArray.shape)
    if values.ndim == 0:
        return float(values)
    return values


def _evaluate(order, x):
    """Route flat, validated (order, x) arrays to the evaluation regimes."""
    out = np.empty(x.shape, dtype=float)
    series = (x <= SERIES_CROSSOVER) | (0.25 * x * x < order + 1.0)
    asymptotic = ~series & (x >= ASYMPTOTIC_CROSSOVER) & (order.astype(float) ** 2 <= x)
    miller = ~(series | asymptotic)
    if series.any():
        out[series] = _powerSeries(order[series], x[series])
    if asymptotic.any():
        out[asymptotic] = _hankelExpansion(order[asymptotic], x[asymptotic])
    if miller.any():
        out[miller] = _millerPointwise(order[miller], x[miller])
    return out


def _powerSeries(order, x):
    """Ascending series sum_m (-1)^m (x/2)^(2m+k) / (m! (m+k)!)."""
    half = 0.5 * x
    orderF = order.astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        logLead = orderF * np.log(half) - special.gammaln(orderF + 1.0)
    term = np.where(order == 0, 1.0, np.exp(np.where(order == 0, 0.0, logLead)))
    total = term.copy()
    ratio = -half * half
    for m in range(1, _SERIES_TERMS):
        term = term * ratio / (m * (m + orderF))
        total += term
        if np.all(np.abs(term) <= _EPS * 1.0e-2 * np.maximum(np.abs(total), 1.0e-280)):
            break
    return total


def _hankelExpansion(order, x):
    """Large-argument expansion sqrt(2/(pi x)) (P cos(chi) - Q sin(chi))."""
    mu = 4.0 * order.astype(float) ** 2
    chi = x - (0.5 * order + 0.25) * np.pi
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, _ASYMPTOTIC_TERMS):
        term = term * (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2:
            q += sign * term
        else:
            p += sign * term
        if np.all(np.abs(term) < 0.1 * _EPS):
            break
    return np.sqrt(2.0 / (np.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def _millerStart(largest):
    """Even starting index for the downward recurrence."""
    start = int(np.ceil(largest + 20.0 + 14.0 * np.cbrt(max(largest, 1.0))))
    return start + (start % 2)


def _rescaleInterval(start, smallestX):
    """Number of recurrence steps that cannot overflow past the rescale threshold."""
    growth = np.log10(2.0 * start / smallestX + 2.0)
    return max(1, int(80.0 / growth))


def _millerSweep(largestOrder, x, record, rescale):
    """
    Run one downward recurrence over all of ``x`` and return its normalization.

    ``record(k, values)`` sees the unnormalized sequence at every order from the start
    index down to 0. Whenever entries grow past ``_RESCALE_THRESHOLD`` the sweep divides
    its own state by the threshold and calls ``rescale(mask)`` so the caller can do the
    same to what it has recorded. Dividing the recorded values by the returned array
    gives :math:`J_k(x)`.
    """
    start = _millerStart(max(float(largestOrder), float(x.max())))
    interval = _rescaleInterval(start, float(x.min()))
    twoOverX = 2.0 / x

    upper = np.zeros_like(x)
    current = np.full_like(x, _MILLER_SEED)
    evenSum = np.zeros_like(x)
    for k in range(start, 0, -1):
        record(k, current)
        if k % 2 == 0:
            evenSum += current
        upper, current = current, k * twoOverX * current - upper
        if k % interval == 0:
            big = np.abs(current) > _RESCALE_THRESHOLD
            if big.any():
                for arr in (upper, current, evenSum):
                    arr[big] /= _RESCALE_THRESHOLD
                rescale(big)
    record(0, current)
    return current + 2.0 * evenSum


def _millerPointwise(order, x):
    """
    Downward recurrence for arbitrary (order, x) pairs.

    All points share one sweep from the largest required start index; each point keeps
    the value of its own order on the way down.
    """
    targets = {int(k): np.flatnonzero(order == k) for k in np.unique(order)}
    result = np.zeros_like(x)

    def record(k, values):
        hit = targets.get(k)
        if hit is not None:
            result[hit] = values[hit]

    def rescale(big):
        result[big] /= _RESCALE_THRESHOLD

    return result / _millerSweep(order.max(), x, record, rescale)


def besselTable(maxOrder, x):
    """
    Evaluate all orders ``0..maxOrder`` at each argument with one downward sweep.

    Parameters
    ----------
    maxOrder : int
        Highest order returned.
    x : array_like
        Strictly positive arguments.

    Returns
    -------
    numpy.ndarray
        Array of shape ``(maxOrder + 1, len(x))``.
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0:
        return np.zeros((maxOrder + 1, 0))
    if x.min() <= 0.0:
        raise ValidationError("besselTable requires strictly positive arguments")
    table = np.zeros((maxOrder + 1, x.size))

    def record(k, values):
        if k <= maxOrder:
            table[k] = values

    def rescale(big):
        table[:, big] /= _RESCALE_THRESHOLD

    return table / _millerSweep(maxOrder, x, record, rescale)


class BesselRootTable:
    """
    Positive roots ``w[j, k]`` of :math:`J_k`.

    Roots are stored in an array of shape ``(rootsPerOrder, maxOrder + 1)`` so that
    ``roots[j - 1, k]`` is the j-th positive root of the order-k function. The array is
    read-only; tables can be shared freely between workers.
    """

    def __init__(self, roots):
        roots = np.array(roots, dtype=float, order="C")
        if roots.ndim != 2 or roots.shape[0] < 1 or roots.shape[1] < 1:
            raise ValidationError(f"Root table must be a non-empty 2-D array, got {roots.shape}")
        roots.setflags(write=False)
        self._roots = roots
        self._hash = hash((roots.shape, roots.tobytes()))

    def __repr__(self):
        return f"<BesselRootTable maxOrder={self.maxOrder} rootsPerOrder={self.rootsPerOrder}>"

    def __eq__(self, other):
        if not isinstance(other, BesselRootTable):
            return NotImplemented
        return np.array_equal(self._roots, other._roots)

    def __hash__(self):
        return self._hash

    @property
    def roots(self):
        return self._roots

    @property
    def maxOrder(self):
        return self._roots.shape[1] - 1

    @property
    def rootsPerOrder(self):
        return self._roots.shape[0]

    def root(self, j, k):
        """Return the j-th (1-based) positive root of J_k."""
        if not 1 <= j <= self.rootsPerOrder or not 0 <= k <= self.maxOrder:
            raise ValidationError(f"Root ({j}, {k}) is not in {self}")
        return float(self._roots[j - 1, k])

    def forOrder(self, k, count=None):
        """Return the first ``count`` roots of ``J_|k|`` (all roots if ``count`` is None)."""
        k = abs(int(k))
        count = self.rootsPerOrder if count is None else count
        if not self.covers(k, count):
            raise ValidationError(
                f"{self} does not hold {count} roots of order {k}; build a larger table"
            )
        return self._roots[:count, k]

    def covers(self, maxOrder, rootsPerOrder):
        """Whether the table holds ``rootsPerOrder`` roots for every order up to ``maxOrder``."""
        return maxOrder <= self.maxOrder and rootsPerOrder <= self.rootsPerOrder

    def residual(self):
        """Largest |J_k(w[j,k])| over the table."""
        orders = np.broadcast_to(np.arange(self.maxOrder + 1), self._roots.shape)
        return float(np.abs(_evaluate(orders.ravel(), self._roots.ravel())).max())

    def interlacingViolations(self):
        """
        Count index pairs breaking ``w[j,k] < w[j,k+1] < w[j+1,k]`` or monotonicity in j.
        """
        w = self._roots
        bad = int(np.count_nonzero(w[0] <= 0.0))
        bad += int(np.count_nonzero(np.diff(w, axis=0) <= 0.0))
        if w.shape[1] > 1:
            bad += int(np.count_nonzero(w[:, :-1] >= w[:, 1:]))
            bad += int(np.count_nonzero(w[1:, :-1] <= w[:-1, 1:]))
        return bad


def mcmahonEstimate(j, order):
    """
    McMahon's large-root expansion of the j-th positive root of J_order.

    Accurate for ``j`` much larger than ``order``; used only as a Newton starting value.
    """
    j = np.asarray(j, dtype=float)
    mu = 4.0 * np.asarray(order, dtype=float) ** 2
    beta = (j + 0.5 * np.asarray(order, dtype=float) - 0.25) * np.pi
    eightBeta = 8.0 * beta
    return (
        beta
        - (mu - 1.0) / eightBeta
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * eightBeta**3)
        - 32.0
        * (mu - 1.0)
        * (83.0 * mu**2 - 982.0 * mu + 3779.0)
        / (15.0 * eightBeta**5)
    )


@codeTiming.timed
def besselRoots(maxOrder, rootsPerOrder):
    """
    Tabulate the first ``rootsPerOrder`` positive roots of J_k for ``0 <= k <= maxOrder``.

    Parameters
    ----------
    maxOrder : int
        Highest order, ``0 <= maxOrder < MAX_ORDER``.
    rootsPerOrder : int
        Number of roots per order, at least 1.

    Returns
    -------
    BesselRootTable
        Cached, read-only table. Identical requests return the same object.

    Raises
    ------
    RootRefinementError
        When a root fails to converge or the finished table breaks the residual or
        interlacing checks.
    """
    if int(maxOrder) != maxOrder or not 0 <= maxOrder < MAX_ORDER:
        raise ValidationError(f"maxOrder must be an integer in [0, {MAX_ORDER}), got {maxOrder}")
    if int(rootsPerOrder) != rootsPerOrder or rootsPerOrder < 1:
        raise ValidationError(f"rootsPerOrder must be a positive integer, got {rootsPerOrder}")
    return _cachedRoots(int(maxOrder), int(rootsPerOrder))


@functools.lru_cache(maxsize=8)
def _cachedRoots(maxOrder, rootsPerOrder):
    runLog.extra(f"Building Bessel root table for orders 0..{maxOrder}, {rootsPerOrder} roots each")
    lower, upper = _scanBrackets(maxOrder, rootsPerOrder)
    orders = np.broadcast_to(np.arange(maxOrder + 1), lower.shape)
    js = np.broadcast_to(np.arange(1, rootsPerOrder + 1)[:, None], lower.shape)
    guess = mcmahonEstimate(js, orders)
    guess = np.where((guess > lower) & (guess < upper), guess, 0.5 * (lower + upper))

    roots = _refineRoots(orders.ravel(), lower.ravel(), upper.ravel(), guess.ravel())
    table = BesselRootTable(roots.reshape(lower.shape))

    residual = table.residual()
    if residual > ROOT_RESIDUAL_LIMIT:
        raise RootRefinementError(
            f"Bessel root table residual {residual:.3e} exceeds {ROOT_RESIDUAL_LIMIT:.0e}"
        )
    violations = table.interlacingViolations()
    if violations:
        raise RootRefinementError(f"Bessel root table breaks interlacing at {violations} places")
    runLog.extra(f"Built {table} with residual {residual:.2e}")
    return table


def _scanBrackets(maxOrder, rootsPerOrder):
    """
    Bracket every requested root between consecutive points of a uniform scan grid.

    Consecutive roots of any order are further apart than ``SCAN_STEP``, so each grid
    cell holds at most one root.
    """
    xMax = float(mcmahonEstimate(rootsPerOrder, maxOrder)) + 2.0 * np.pi
    while True:
        grid = SCAN_STEP * np.arange(1, int(np.ceil(xMax / SCAN_STEP)) + 2)
        negative = np.signbit(besselTable(maxOrder, grid))
        changes = negative[:, 1:] != negative[:, :-1]
        counts = changes.sum(axis=1)
        if counts.min() >= rootsPerOrder:
            break
        runLog.debug(f"Root scan up to {xMax:.1f} found too few roots; widening")
        xMax *= 1.25
        if xMax > MAX_ARGUMENT:
            raise RootRefinementError(
                f"Cannot bracket {rootsPerOrder} roots of order {maxOrder} "
                f"below x = {MAX_ARGUMENT}"
            )

    lower = np.empty((rootsPerOrder, maxOrder + 1))
    for k in range(maxOrder + 1):
        cells = np.flatnonzero(changes[k])[:rootsPerOrder]
        lower[:, k] = grid[cells]
    return lower, lower + SCAN_STEP


def _refineRoots(order, lower, upper, guess):
    """Safeguarded Newton iteration on bracketed roots, vectorized over all points."""
    x = guess.astype(float).copy()
    a = lower.astype(float).copy()
    b = upper.astype(float).copy()
    signAtLower = np.signbit(_evaluate(order, a))
    active = np.ones(x.shape, dtype=bool)

    for iteration in range(ROOT_MAX_ITERATIONS):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        k = order[idx]
        xi = x[idx]
        f = _evaluate(k, xi)
        derivative = k / xi * f - _evaluate(k + 1, xi)

        sameSide = np.signbit(f) == signAtLower[idx]
        a[idx] = np.where(sameSide, xi, a[idx])
        b[idx] = np.where(sameSide, b[idx], xi)

        with np.errstate(divide="ignore", invalid="ignore"):
            newton = xi - f / derivative
        inside = np.isfinite(newton) & (newton > a[idx]) & (newton < b[idx])
        step = np.where(inside, newton, 0.5 * (a[idx] + b[idx]))

        exact = f == 0.0
        done = exact | (np.abs(step - xi) <= 4.0 * _EPS * xi)
        x[idx] = np.where(exact, xi, step)
        active[idx[done]] = False
        runLog.debug(f"Root refinement iteration {iteration}: {int(active.sum())} active")

    if active.any():
        worst = np.flatnonzero(active)[0]
        raise RootRefinementError(
            f"{int(active.sum())} Bessel roots did not converge in {ROOT_MAX_ITERATIONS} "
            f"iterations (first: order {order[worst]} near x = {x[worst]:.6f})"
        )
    return x
