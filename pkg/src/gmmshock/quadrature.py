"""Legendre-Gauss-Lobatto quadrature and 1D nodal operators.

Everything downstream (mesh metrics, split-form derivatives, modal
smoothness estimates) is built from the small set of matrices assembled
here, so the rules are computed once per polynomial order and treated as
immutable afterwards.
"""

from dataclasses import dataclass, field

import numpy as np

NEWTON_TOL = 1e-14
NEWTON_MAX_ITERS = 100


class InvalidOrderError(ValueError):
    """Raised for polynomial orders the quadrature cannot represent."""


def legendre_and_derivative(order: int, x):
    """Evaluate P_order and P'_order by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    if order == 0:
        return np.ones_like(x), np.zeros_like(x)
    p_prev = np.ones_like(x)
    p = x.copy()
    for k in range(1, order):
        p, p_prev = ((2 * k + 1) * x * p - k * p_prev) / (k + 1), p
    # (1 - x^2) P'_n = n (P_{n-1} - x P_n); endpoints handled separately
    dp = np.empty_like(x)
    interior = np.abs(x) < 1.0
    dp[interior] = order * (p_prev[interior] - x[interior] * p[interior]) / (1.0 - x[interior] ** 2)
    edge = ~interior
    dp[edge] = np.sign(x[edge]) ** (order + 1) * order * (order + 1) / 2.0
    return p, dp


@dataclass(frozen=True)
class QuadratureRule:
    """Lobatto nodes and weights on [-1, 1] for polynomial order ``order``."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.order + 1


def build_lobatto_rule(order: int) -> QuadratureRule:
    """Gauss-Lobatto rule: endpoints plus the roots of P'_order.

    Interior roots are found with Newton iterations started from
    Chebyshev-Lobatto guesses; the iteration is quadratically convergent
    and reaches machine precision in a handful of steps.
    """
    if order < 1:
        raise InvalidOrderError(f"polynomial order must be >= 1, got {order}")
    nodes = np.empty(order + 1)
    nodes[0], nodes[-1] = -1.0, 1.0
    if order > 1:
        x = -np.cos(np.pi * np.arange(1, order) / order)
        for _ in range(NEWTON_MAX_ITERS):
            p, dp = legendre_and_derivative(order, x)
            # P''_n from the Legendre ODE, valid strictly inside (-1, 1)
            d2p = (2.0 * x * dp - order * (order + 1) * p) / (1.0 - x**2)
            dx = dp / d2p
            x -= dx
            if np.max(np.abs(dx)) < NEWTON_TOL:
                break
        nodes[1:-1] = x
    p_at_nodes, _ = legendre_and_derivative(order, nodes)
    weights = 2.0 / (order * (order + 1) * p_at_nodes**2)
    nodes[np.abs(nodes) < NEWTON_TOL] = 0.0
    return QuadratureRule(order=order, nodes=nodes, weights=weights)


def barycentric_weights(nodes: np.ndarray) -> np.ndarray:
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / diff.prod(axis=1)


def lagrange_values(nodes: np.ndarray, x: float) -> np.ndarray:
    """Values of the Lagrange cardinal functions at a point ``x``."""
    w = barycentric_weights(nodes)
    dx = x - nodes
    hit = np.isclose(dx, 0.0, atol=1e-14)
    if hit.any():
        out = np.zeros_like(nodes)
        out[hit] = 1.0
        return out
    terms = w / dx
    return terms / terms.sum()


@dataclass(frozen=True)
class OperatorSet:
    """Nodal differentiation, boundary interpolation and modal transforms.

    ``diff_matrix`` differentiates nodal samples exactly for polynomials up
    to the rule's order; ``to_legendre``/``from_legendre`` convert between
    nodal values and Legendre coefficients and are exact inverses.
    """

    rule: QuadratureRule
    diff_matrix: np.ndarray
    boundary_left: np.ndarray
    boundary_right: np.ndarray
    to_legendre: np.ndarray
    from_legendre: np.ndarray
    subcell_weights: np.ndarray = field(repr=False, default=None)
    legendre_gram: np.ndarray = field(repr=False, default=None)

    @property
    def order(self) -> int:
        return self.rule.order


def build_operator_set(rule: QuadratureRule) -> OperatorSet:
    nodes, n = rule.nodes, rule.n_nodes
    w = barycentric_weights(nodes)
    d = w[None, :] / w[:, None] / (nodes[:, None] - nodes[None, :] + np.eye(n))
    np.fill_diagonal(d, 0.0)
    np.fill_diagonal(d, -d.sum(axis=1))  # exact zero row sums

    vander = np.column_stack(
        [legendre_and_derivative(k, nodes)[0] for k in range(n)]
    )
    to_legendre = np.linalg.inv(vander)

    # P + 1 contiguous nodes -> P interior sub-cell interfaces; the tensor
    # maps the two-point flux matrix of one line onto those interface fluxes
    # (boundary interfaces are the pointwise fluxes and are handled apart).
    subcell = np.zeros((n - 1, n, n))
    for ifc in range(n - 1):
        for l in range(ifc + 1):
            for k in range(ifc + 1, n):
                subcell[ifc, l, k] = 2.0 * rule.weights[l] * d[l, k]

    return OperatorSet(
        rule=rule,
        diff_matrix=d,
        boundary_left=lagrange_values(nodes, -1.0),
        boundary_right=lagrange_values(nodes, 1.0),
        to_legendre=to_legendre,
        from_legendre=vander,
        subcell_weights=subcell,
        legendre_gram=vander.T @ (rule.weights[:, None] * vander),
    )
