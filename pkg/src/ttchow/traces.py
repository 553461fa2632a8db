"""Registry of the structure theorems a computation can rest on.

Reports refer to rules by id; the citation text lives only here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

RULES: dict[str, str] = {
    "snf": "Smith normal form over Z: unimodular row and column reduction",
    "abgroup.cokernel": "cokernel of a map of finitely generated abelian groups via Smith normal form",
    "exactseq.image": "Chow group as the image of Z_p -> K_0 of the middle subquotient (exact in the middle)",
    "exactseq.exact": "exactness in the middle verified by lattice containment im(iota) = ker(pi)",
    "exactseq.cokernel": "Chow group as the cokernel of the K_1 boundary in the localization sequence",
    "exactseq.surjective": "pi is surjective iff the top Verdier quotient is idempotent complete",
    "exactseq.split": "the sequence splits because the quotient is free abelian",
    "cycles.simples": "Z_i = sum over points x of dimension i of Z^(r_x), r_x = number of simple right A_x-modules",
    "cycles.top": "top-dimensional cycle group of an order is Z (unique simple module of a central simple algebra)",
    "cycles.vanishing": "cycle and Chow groups vanish above the dimension of the support",
    "cycles.dvr_type": "Z_0 of an hereditary order over a complete DVR is Z^r with r the type (devissage)",
    "orders.type": "type of an hereditary order = number of blocks in its local block decomposition",
    "orders.chain_length": "maximal length of a chain of overorders = sum over points of (r_p - 1)",
    "orders.k0_decomposition": "K_0(A) = K_0(Abar) + Z^rho for an hereditary order inside a maximal order Abar",
    "orders.k0_matrix": "K_0(Abar) = K_0(O_C) = Pic(C) + Z for maximal orders in a matrix algebra (Morita)",
    "orders.chow_top": "CH_1 of an hereditary order on a curve is Z",
    "orders.chow_curve": "CH_0 of an hereditary order on a curve = Cl(Abar) + Z^rho",
    "orders.chow_matrix": "CH_0 = Pic(C) + Z^rho when the generic fibre is a matrix algebra (Tsen / Morita)",
    "orders.chow_azumaya": "CH_0 tensor Z[1/n] = (Pic(C) + Z^rho) tensor Z[1/n] for unramified algebras of degree n",
    "orders.chow_dedekind": "CH_0 of an hereditary order over a Dedekind domain = K~_0 = Cl(Lambda') + Z^rho",
    "orders.local_maximal_cl": "ideal class groups of maximal orders over a complete DVR vanish",
    "orders.cl_maximal": "Cl of a maximal order equals its reduced projective class group",
    "classgroups.forms": "class group of an imaginary quadratic order via reduced forms and Gauss composition",
    "classgroups.cyclotomic": "class group of Z[zeta_p] from the table of cyclotomic class numbers",
    "classgroups.morita": "class groups are Morita invariant for full matrix orders",
    "grouprings.wedderburn": "CH_1(R, RG) = Z^t, t = number of simple Artin-Wedderburn factors of KG",
    "grouprings.cyclic_subgroups": "over Q, t = number of conjugacy classes of cyclic subgroups of G",
    "grouprings.cyclotomic_split": "over Q(zeta_p) the group algebra of a cyclic group splits along cyclotomic factors",
    "grouprings.swan": "CH_0(R, RG) = K~_0(RG) = Cl(RG)",
    "grouprings.cyclic_prime": "Cl(Z Cyc_p) = Cl(Z[zeta_p]) via the maximal order Z x Z[zeta_p]",
    "grouprings.vanishing": "Cl(ZG) = 0 exactly for G cyclic of order <= 11, 13, 14, 17, 19 or the Klein four group",
    "grouprings.trivial_group": "RG = R for the trivial group",
    "grouprings.d_sequence": "0 -> D(RG) -> Cl(RG) -> Cl(Lambda') -> 0 for any maximal order Lambda'",
    "algebra.radical": "Jacobson radical by exhaustive quasi-regularity over a prime field",
    "algebra.simples": "simple modules = simple factors of A/J(A) = Frobenius-fixed part of its centre",
    "algebra.devissage": "K_0 of finite-length modules = K_0(A/rad A) = Z^(number of simples)",
    "algebra.wedderburn_cyclic": "QCyc_n = product over d | n of Q(zeta_d)",
}


def cite(rule: str) -> str:
    return RULES[rule]


@dataclass(frozen=True)
class Derivation:
    """A computed value together with the rules used and any caveats."""

    value: Any
    rules: tuple[str, ...] = ()
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self):
        for r in self.rules:
            if r not in RULES:
                raise KeyError(f"unregistered rule {r!r}")

    @property
    def trace(self) -> list[str]:
        return [RULES[r] for r in self.rules]
