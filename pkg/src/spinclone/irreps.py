"""Invariant subspaces of R (x) R (x) R* and the block structure of Choi operators.

Clones 1 and 2 are coupled first, so every subspace inherits a definite
exchange symmetry from the intermediate spin ``j12``: for two spin-j factors
the coupled state has parity ``(-1)^(2j - j12)`` under SWAP_12.  The third
(conjugate) factor is brought into standard form with the substitution
``|n> -> (-1)^n |d-n-1>`` and coupled last.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, sqrt

import numpy as np

from spinclone.channels import check_dense
from spinclone.spin_states import check_dim


def _twice(x, name):
    two = Fraction(x) * 2 if not isinstance(x, float) else Fraction(x).limit_denominator(4) * 2
    if two.denominator != 1:
        raise ValueError(f"{name}={x} is not a half-integer")
    return int(two)


def clebsch_gordan(j1, j2, j, m1, m2, m):
    """``<j1 m1; j2 m2 | j m>`` in the Condon-Shortley convention (Racah formula).

    Arguments may be ints, floats or Fractions but must be half-integers.
    Returns 0.0 whenever a selection rule fails.
    """
    tj1, tj2, tj = _twice(j1, "j1"), _twice(j2, "j2"), _twice(j, "j")
    tm1, tm2, tm = _twice(m1, "m1"), _twice(m2, "m2"), _twice(m, "m")
    if min(tj1, tj2, tj) < 0:
        raise ValueError("angular momenta must be non-negative")
    if tm != tm1 + tm2:
        return 0.0
    if not abs(tj1 - tj2) <= tj <= tj1 + tj2 or (tj1 + tj2 + tj) % 2:
        return 0.0
    for tjj, tmm in ((tj1, tm1), (tj2, tm2), (tj, tm)):
        if abs(tmm) > tjj or (tjj + tmm) % 2:
            return 0.0

    def f(twice_val):
        return factorial(twice_val // 2)

    pref = Fraction(
        (tj + 1) * f(tj + tj1 - tj2) * f(tj - tj1 + tj2) * f(tj1 + tj2 - tj),
        f(tj1 + tj2 + tj + 2),
    )
    pref *= f(tj + tm) * f(tj - tm) * f(tj1 - tm1) * f(tj1 + tm1) * f(tj2 - tm2) * f(tj2 + tm2)
    total = Fraction(0)
    for k in range((tj1 + tj2 + tj) // 2 + 1):
        args = (
            2 * k,
            tj1 + tj2 - tj - 2 * k,
            tj1 - tm1 - 2 * k,
            tj2 + tm2 - 2 * k,
            tj - tj2 + tm1 + 2 * k,
            tj - tj1 - tm2 + 2 * k,
        )
        if min(args) < 0:
            continue
        denom = 1
        for a in args:
            denom *= f(a)
        total += Fraction((-1) ** k, denom)
    value = total * total * pref
    return float(np.sign(total)) * sqrt(value)


def conjugate_basis_map(d):
    """Matrix ``T`` with ``T|n> = (-1)^n |d-1-n>``; ``T^dagger R* T = R``."""
    d = check_dim(d)
    t = np.zeros((d, d))
    for n in range(d):
        t[d - 1 - n, n] = (-1) ** n
    return t


def couple(d1, d2, big_j):
    """CG matrix for coupling spins (d1-1)/2 and (d2-1)/2 to total ``big_j``.

    Returns shape (2J+1, d1*d2): row ``M + J`` is the coupled state in the
    product basis of the two factors (indices ``n = j + m``).
    """
    j1, j2 = Fraction(d1 - 1, 2), Fraction(d2 - 1, 2)
    big_j = Fraction(big_j)
    rows = int(2 * big_j) + 1
    out = np.zeros((rows, d1 * d2))
    for r in range(rows):
        mm = r - big_j
        for n1 in range(d1):
            m1 = n1 - j1
            m2 = mm - m1
            n2 = m2 + j2
            if n2.denominator == 1 and 0 <= n2 < d2:
                out[r, n1 * d2 + int(n2)] = clebsch_gordan(j1, j2, big_j, m1, m2, mm)
    return out


@dataclass(frozen=True)
class Subspace:
    label: str
    spin: Fraction
    j12: int
    symmetry: str  # "S" or "A" under exchange of the clones
    basis: np.ndarray = field(repr=False)  # (2*spin+1, d^3), rows ordered by ascending M

    @property
    def dimension(self):
        return self.basis.shape[0]

    def projector(self):
        return self.basis.T.conj() @ self.basis


@dataclass(frozen=True)
class IrrepDecomposition:
    dim_single: int
    subspaces: tuple

    @property
    def dimensions(self):
        return [s.dimension for s in self.subspaces]

    @property
    def symmetries(self):
        return [s.symmetry for s in self.subspaces]

    def __getitem__(self, label):
        for s in self.subspaces:
            if s.label == label:
                return s
        raise KeyError(label)

    def unitary(self):
        """All basis vectors stacked as rows; a d^3 x d^3 unitary."""
        return np.vstack([s.basis for s in self.subspaces])

    def to_dict(self, amplitudes=False, tol=1e-12):
        d = self.dim_single
        rows = []
        for s in self.subspaces:
            row = {
                "space": s.label,
                "dimension": s.dimension,
                "spin": str(s.spin),
                "j12": s.j12,
                "symmetry": s.symmetry,
            }
            if amplitudes:
                row["basis"] = [
                    {
                        _ket(idx, d): float(vec[idx])
                        for idx in np.flatnonzero(np.abs(vec) > tol)
                    }
                    for vec in s.basis
                ]
            rows.append(row)
        return {"d": d, "subspaces": rows}

    def to_json(self, amplitudes=False, **kwargs):
        return json.dumps(self.to_dict(amplitudes), **kwargs)

    def to_text(self, amplitudes=False, tol=1e-12):
        d = self.dim_single
        lines = [f"{'space':<6} {'dim':>4} {'spin':>5} {'j12':>4}  S2"]
        for s in self.subspaces:
            lines.append(f"{s.label:<6} {s.dimension:>4} {str(s.spin):>5} {s.j12:>4}  {s.symmetry}")
            if amplitudes:
                for vec in s.basis:
                    terms = [
                        f"{vec[i]:+.6f}{_ket(i, d)}" for i in np.flatnonzero(np.abs(vec) > tol)
                    ]
                    lines.append("        " + " ".join(terms))
        return "\n".join(lines)


def _ket(idx, d):
    a, rem = divmod(int(idx), d * d)
    b, c = divmod(rem, d)
    return f"|{a},{b},{c}>"


def decompose_triple(d):
    """Decompose H (x) H (x) H* into SU(2)-invariant subspaces.

    Subspaces are ordered by total spin, antisymmetric before symmetric, then
    by ``j12``, which reproduces the labelling M1, M2, ... used for d = 2, 3.
    """
    d = check_dim(d)
    check_dense(d)
    j = Fraction(d - 1, 2)
    conj = conjugate_basis_map(d)
    found = []
    for j12 in range(0, d):
        pair = couple(d, d, j12)  # (2 j12 + 1, d^2)
        sym = "S" if (2 * j - j12) % 2 == 0 else "A"
        big_j = abs(j12 - j)
        while big_j <= j12 + j:
            cg = couple(2 * j12 + 1, d, big_j)  # rows over |j12 M12> (x) |j m3>
            # |j12 M12> -> pair rows; |j m3> -> conj column n3
            vecs = np.einsum("rab,ax,yb->rxy", cg.reshape(-1, 2 * j12 + 1, d), pair, conj)
            found.append((big_j, sym, j12, vecs.reshape(vecs.shape[0], -1)))
            big_j += 1
    found.sort(key=lambda item: (item[0], item[1] != "A", item[2]))
    subspaces = tuple(
        Subspace(f"M{i + 1}", big_j, j12, sym, basis)
        for i, (big_j, sym, j12, basis) in enumerate(found)
    )
    return IrrepDecomposition(d, subspaces)


@dataclass
class BlockReport:
    """Choi operator expressed in the invariant-subspace picture.

    ``coefficients[(Mi, Mj)]`` is ``c_ij`` for every pair of equivalent irreps
    with matching exchange symmetry; ``allowed_residual`` is the largest
    deviation of such a block from ``c_ij * I``, and ``leakage`` the largest
    norm of a block that covariance and clone symmetry force to vanish.
    """

    coefficients: dict
    allowed_residual: float
    leakage: float
    support: list

    def block(self, labels):
        """The ``c_ij`` matrix restricted to ``labels`` (one multiplicity space)."""
        return np.array([[self.coefficients.get((a, b), 0.0) for b in labels] for a in labels])

    def to_dict(self):
        return {
            "coefficients": [
                {"i": a, "j": b, "c": complex(c).real if abs(complex(c).imag) < 1e-15 else str(c)}
                for (a, b), c in self.coefficients.items()
            ],
            "allowed_residual": self.allowed_residual,
            "leakage": self.leakage,
            "support": self.support,
        }


def block_structure(choi, dec, support_tol=1e-8):
    d = dec.dim_single
    if choi.dim_single != d or choi.matrix.shape != (d**3, d**3):
        raise ValueError(
            f"decomposition is for d={d} but the Choi operator is {choi.matrix.shape}"
        )
    p = choi.matrix
    coeffs = {}
    allowed = leak = 0.0
    for si in dec.subspaces:
        left = si.basis.conj() @ p
        for sj in dec.subspaces:
            blk = left @ sj.basis.T
            if si.spin == sj.spin and si.symmetry == sj.symmetry:
                c = np.trace(blk) / si.dimension
                if abs(c.imag) < 1e-14:
                    c = float(c.real)
                coeffs[(si.label, sj.label)] = c
                allowed = max(allowed, float(np.linalg.norm(blk - c * np.eye(si.dimension))))
            else:
                leak = max(leak, float(np.linalg.norm(blk)))
    support = [s.label for s in dec.subspaces if abs(coeffs[(s.label, s.label)]) > support_tol]
    return BlockReport(coeffs, allowed, leak, support)


def multiplicity_coefficients(report, labels):
    """Top eigenvalue and unit eigenvector of the ``c_ij`` block over ``labels``.

    For a rank-one block with eigenvalue 1 the eigenvector ``(a, b, ...)`` gives
    the Choi eigenvectors ``a|phi^i_k> + b|phi^j_k> + ...``; the overall sign is
    fixed so the largest component is positive.
    """
    w, v = np.linalg.eigh(report.block(labels))
    vec = v[:, -1]
    vec = vec * np.sign(vec[np.argmax(np.abs(vec))])
    return float(w[-1]), vec
