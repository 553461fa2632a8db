"""Chow groups from K_0-level localization data.

Two routes are offered. Given the three-term piece

    Z_p --iota--> K_0(middle) --pi--> Z_{p+1}

which is exact in the middle, the Chow group is the image of ``iota``.
Given instead the boundary map ``K_1(top) -> Z_p`` of the long exact
localization sequence, it is the cokernel of that boundary.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

from .abgroup import (
    AbMap,
    FgAbGroup,
    ValidationError,
    cokernel,
    hstack,
    image,
    in_column_span,
    is_surjective,
    kernel,
    preimage_lattice,
)
from .traces import Derivation


class NotExactError(ValueError):
    """``im(iota) != ker(pi)``; ``witness`` lies in ker(pi) but not in im(iota)."""

    def __init__(self, witness):
        self.witness = tuple(witness)
        super().__init__(f"sequence not exact in middle: {self.witness} is in ker(pi) but not in im(iota)")


class SurjectivityMismatch(UserWarning):
    pass


@dataclass(frozen=True)
class MiddleBracket:
    iota: AbMap
    pi: AbMap
    idempotent_complete: bool | None = None

    def __post_init__(self):
        if self.iota.codomain != self.pi.domain:
            raise ValidationError("iota codomain and pi domain are different presentations")
        top = self.pi.codomain
        composite = self.pi.matrix @ self.iota.matrix
        for j, col in enumerate(composite.columns()):
            if not top.is_zero_element(col):
                raise ValidationError(f"pi o iota is nonzero on generator {j}: im(iota) not inside ker(pi)")


@dataclass(frozen=True)
class BoundaryData:
    k1_boundary: AbMap


def exactness_witness(b: MiddleBracket) -> tuple[int, ...] | None:
    """An element of ker(pi) outside im(iota), or ``None`` when exact."""
    middle = b.iota.codomain
    span = hstack(b.iota.matrix, middle.relations, rows=middle.generators)
    for col in preimage_lattice(b.pi).columns():
        if not in_column_span(span, col):
            return col
    return None


def is_exact(b: MiddleBracket) -> bool:
    return exactness_witness(b) is None


def derive_chow_from_bracket(b: MiddleBracket, verify: bool = False) -> Derivation:
    rules = ["exactseq.image", "snf"]
    if verify:
        witness = exactness_witness(b)
        if witness is not None:
            raise NotExactError(witness)
        rules.append("exactseq.exact")
    return Derivation(image(b.iota), tuple(rules))


def chow_from_bracket(b: MiddleBracket, verify: bool = False) -> FgAbGroup:
    """CH_p as ``im(iota)``; with ``verify`` also check ``im(iota) == ker(pi)``."""
    return derive_chow_from_bracket(b, verify).value


def chow_from_cokernel(d: BoundaryData) -> FgAbGroup:
    return cokernel(d.k1_boundary)


def derive_chow_from_cokernel(d: BoundaryData) -> Derivation:
    return Derivation(cokernel(d.k1_boundary), ("exactseq.cokernel", "snf"))


def check_split_surjective(b: MiddleBracket) -> bool:
    """Whether ``pi`` is onto.

    Surjectivity corresponds to idempotent completeness of the top quotient,
    which cannot be read off K_0 data; if the caller asserted it, a
    disagreement is reported as a :class:`SurjectivityMismatch` warning.
    """
    surjective = is_surjective(b.pi)
    if b.idempotent_complete is not None and b.idempotent_complete != surjective:
        warnings.warn(
            f"idempotent_complete={b.idempotent_complete} but pi is "
            f"{'' if surjective else 'not '}surjective",
            SurjectivityMismatch,
            stacklevel=2,
        )
    return surjective


def split_short_exact(a: FgAbGroup, c: FgAbGroup) -> FgAbGroup:
    """Middle term of ``0 -> a -> ? -> c -> 0`` when ``c`` is free, so the sequence splits."""
    if not c.is_free():
        raise ValidationError("quotient not free: the extension need not split")
    return a + c


def kernel_of_pi(b: MiddleBracket) -> FgAbGroup:
    return kernel(b.pi)
