"""The nilpotent group exp(g (x) m_R), stored through logarithms.

A group element acts on Q[M] by ``Ad_{exp H} = exp(ad H)``.  Products are
computed by composing adjoint actions on two probe monomials ``z^(1,0)`` and
``z^(0,1)`` and recovering the logarithm order by order: if the residual
``exp(-H) g`` is the identity below degree k, its degree-k deviation on the
probes is ``[delta, probe]`` and determines ``delta`` exactly.  Since the
bracket is faithful on nonzero exponents, two probes suffice.

Ordering convention: ``path_ordered_product([g1, g2, ..., gn])`` is
``gn ... g2 g1``, i.e. the first element listed acts first.  With rays listed
anticlockwise this reproduces ``exp(-H2) exp(-H1) exp(H2) exp(H1) =
exp(-[H1, H2])`` for elementary scattering.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Sequence, Tuple

from .algebra import (ContractError, GradedSeries, Key, Terms, Vec, add_terms,
                      degree, exp_ad_terms, primitive, zero, zero_order_like)

PROBES: Tuple[Vec, Vec] = ((1, 0), (0, 1))


@dataclass(frozen=True)
class GroupElement:
    log: GradedSeries

    @property
    def truncation(self) -> int:
        return self.log.truncation

    def is_identity(self) -> bool:
        return not self.log

    def act(self, f: Terms, form: int = 1) -> Terms:
        """Adjoint action on a raw term dict (orders of degree 0 allowed)."""
        return exp_ad_terms(self.log.terms, f, self.truncation, form)


def identity(truncation: int) -> GroupElement:
    return GroupElement(zero(truncation))


def exp(h: GradedSeries) -> GroupElement:
    return GroupElement(h)


def inverse(g: GroupElement) -> GroupElement:
    return GroupElement(-g.log)


def _order_kind(series: Sequence[GradedSeries]):
    for s in series:
        for _, o in s.terms:
            return zero_order_like(o)
    return None


def _probe_terms(o0) -> List[Terms]:
    return [{(p, o0): Fraction(1)} for p in PROBES]


def _extract(dev: List[Terms], k: int, probe_order, truncation: int, form: int) -> Terms:
    """Recover delta (degree k) from [delta, probe] = dev restricted to degree k."""
    out: Dict[Key, Fraction] = {}
    (ea, eb) = PROBES
    # probe z^(1,0): det(m, (1,0)) = -m_b ; probe z^(0,1): det(m, (0,1)) = m_a
    for (p, o), c in dev[0].items():
        if degree(o) != k:
            continue
        m = (p[0] - ea[0], p[1] - ea[1])
        if m[1] != 0:
            out[(m, o)] = c / (-m[1] * form)
    for (p, o), c in dev[1].items():
        if degree(o) != k:
            continue
        m = (p[0] - eb[0], p[1] - eb[1])
        if m[1] == 0 and m[0] != 0:
            out[(m, o)] = c / (m[0] * form)
    return out


def _deviation(images: List[Terms], probes: List[Terms]) -> List[Terms]:
    return [add_terms(img, pr, -1) for img, pr in zip(images, probes)]


def _min_deg(dev: List[Terms]) -> int:
    return min((degree(o) for d in dev for _, o in d), default=None) if any(dev) else None


def log_of_action(action: Callable[[Terms], Terms], truncation: int, order_zero,
                  form: int = 1) -> GradedSeries:
    """Logarithm of the group element whose adjoint action is ``action``."""
    probes = _probe_terms(order_zero)
    images = [action(p) for p in probes]
    h = zero(truncation)
    while True:
        back = GroupElement(-h)
        residual = [back.act(img, form) for img in images]
        dev = _deviation(residual, probes)
        k = _min_deg(dev)
        if k is None:
            return h
        delta = _extract(dev, k, order_zero, truncation, form)
        if not delta:
            raise ContractError("log extraction stalled; action is not an inner automorphism")
        h = h + GradedSeries._from_clean(delta, truncation)


def _check_same(series: Sequence[GradedSeries]) -> int:
    truncs = {s.truncation for s in series}
    if len(truncs) > 1:
        raise ContractError(f"truncation mismatch: {sorted(truncs)}")
    return truncs.pop()


def compose(g1: GroupElement, g2: GroupElement, form: int = 1) -> GroupElement:
    """The product g1 g2 (g2 acts first)."""
    n = _check_same([g1.log, g2.log])
    if g1.is_identity():
        return g2
    if g2.is_identity():
        return g1
    o0 = _order_kind([g1.log, g2.log])
    h = log_of_action(lambda f: g1.act(g2.act(f, form), form), n, o0, form)
    return GroupElement(h)


def path_ordered_product(rays: Sequence[Tuple[GradedSeries, int]], truncation: int = None,
                         form: int = 1) -> GroupElement:
    """Product of exp(H)^eps over ``rays``; the first listed acts first."""
    series = [h for h, _ in rays]
    if truncation is None:
        if not series:
            raise ContractError("truncation required for an empty product")
        truncation = _check_same(series)
    elif series:
        if _check_same(series) != truncation:
            raise ContractError("truncation mismatch")
    o0 = _order_kind(series)
    if o0 is None:
        return identity(truncation)
    gs = [GroupElement(h if eps > 0 else -h) for h, eps in rays]

    def action(f):
        for g in gs:
            f = g.act(f, form)
        return f

    return GroupElement(log_of_action(action, truncation, o0, form))


def ordered_defect(rays: Sequence[Tuple[GradedSeries, int]], k: int, form: int = 1) -> GradedSeries:
    """Degree-k part of log(path_ordered_product(rays)), assuming lower degrees vanish.

    All series are evaluated at truncation ``k``.  Raises ContractError if the
    product is not the identity below degree k.
    """
    series = [h for h, _ in rays]
    o0 = _order_kind(series)
    if o0 is None:
        return zero(k)
    gs = [(h.terms, eps) for h, eps in rays if h and h.min_degree() <= k]
    probes = _probe_terms(o0)
    images = []
    for p in probes:
        f = p
        for terms, eps in gs:
            if eps < 0:
                terms = {key: -c for key, c in terms.items()}
            f = exp_ad_terms(terms, f, k, form)
        images.append(f)
    dev = _deviation(images, probes)
    low = _min_deg(dev)
    if low is None:
        return zero(k)
    if low < k:
        raise ContractError(f"product is not the identity below degree {k} (found degree {low})")
    return GradedSeries._from_clean(_extract(dev, k, o0, k, form), k)


def graded_decompose(g: GroupElement) -> List[Tuple[Vec, GradedSeries]]:
    """Split log(g) by primitive exponent direction, in deterministic order."""
    buckets: Dict[Vec, Dict] = defaultdict(dict)
    for (m, o), c in g.log.terms.items():
        buckets[primitive(m)][(m, o)] = c
    return [(m0, GradedSeries._from_clean(buckets[m0], g.truncation))
            for m0 in sorted(buckets)]
