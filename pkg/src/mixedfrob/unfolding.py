"""Order-by-order unfolding of mixed trTLEP-structures.

The induction adds one unfolding variable at a time: at each order n in the
new variable, the new Higgs component is solved from the potential equation
through a fixed monomial frame of the commutative algebra generated by the
Higgs components and U, then the remaining matrices are lifted by
integration.  All jets live in a single-group ring truncated at total
degree D (the region the induction determines exactly), so every residual
below is an exact zero/nonzero statement.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg, trtlep
from .certificates import Certificate
from .jets import Jet, JetMatrix, JetRing, solve_linear
from .linalg import frac
from .trtlep import (FrobTypeStructure, GradedPairingSet, MixedTrTLEPData,
                     SaitoMFSData, induced_graded_matrix, graded_data,
                     section_conditions)


class NotIntegrable(ValueError):
    pass


class GCFails(ValueError):
    pass


class ICFails(ValueError):
    pass


class FlatnessViolation(ValueError):
    pass


# ---------------------------------------------------------------------------
# potential
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Potential:
    """Vector psi with psi(0) = 0 and d psi/dx_i = C_i zeta."""

    components: tuple[Jet, ...]


def potential(f: FrobTypeStructure, zeta0: Sequence) -> Potential:
    """Unique potential of the flat section extending zeta0, built degree by
    degree from the Euler identity; raises NotIntegrable when the mixed
    partials of C_. zeta disagree (invalid input)."""
    ring = f.ring
    n = ring.nvars
    z = [ring.const(frac(x)) for x in zeta0]
    cz = [c.apply(z) for c in f.higgs]
    order = ring.base_order + ring.unfold_order
    comps = []
    for comp in range(f.rank):
        rad = ring.zero()
        for a in range(n):
            rad = rad + ring.var(a) * cz[a][comp]
        psi = ring.zero()
        for deg in range(1, order + 1):
            part = Jet(ring, {e: c / deg for e, c in rad.coeffs.items()
                              if sum(e) == deg})
            psi = psi + part
        comps.append(psi)
    pot = Potential(tuple(comps))
    for a in range(n):
        db = ring.base_order - (1 if a < ring.base_vars else 0)
        du = ring.unfold_order - (1 if a >= ring.base_vars else 0)
        for comp in range(f.rank):
            res = (pot.components[comp].diff(a) - cz[a][comp]).truncate(
                max(db, 0), max(du, 0))
            if not res.is_zero():
                raise NotIntegrable(
                    f"d psi/dx_{a} differs from C_{a} zeta in component {comp}")
    return pot


# ---------------------------------------------------------------------------
# monomial frame
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonomialFrame:
    """Words in the generators (C_1..C_n, U) whose order-0 values on zeta0
    form a basis; a word is a tuple of generator indices (U is index n)."""

    ngens: int
    words: tuple[tuple[int, ...], ...]


def monomial_frame(f: FrobTypeStructure, zeta0: Sequence) -> MonomialFrame:
    """Greedy breadth-first frame selection at the closed point."""
    r = f.rank
    gens = [c.at0() for c in f.higgs] + [f.u.at0()]
    z = [frac(x) for x in zeta0]
    chosen: list[tuple[int, ...]] = []
    span_rows: list[list[Fraction]] = []

    def try_word(word):
        nonlocal span_rows
        vec = list(z)
        for g in word:
            vec = linalg.mat_vec(gens[g], vec)
        if linalg.rank(span_rows + [vec]) > len(span_rows):
            chosen.append(word)
            span_rows = linalg.rref(span_rows + [vec])[0]

    for length in range(0, r):
        if len(chosen) == r:
            break
        for word in itertools.combinations_with_replacement(range(len(gens)), length):
            try_word(word)
            if len(chosen) == r:
                break
    if len(chosen) < r:
        raise GCFails(f"algebra orbit of zeta0 spans only {len(chosen)} of {r}")
    return MonomialFrame(len(gens), tuple(chosen))


def _word_matrix(word: tuple[int, ...], higgs: Sequence[JetMatrix],
                 u: JetMatrix) -> JetMatrix:
    ring = u.ring
    out = JetMatrix.identity(ring, u.nrows)
    for g in word:
        out = out @ (u if g == len(higgs) else higgs[g])
    return out


# ---------------------------------------------------------------------------
# the recursion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UnfoldingResult:
    """Extended structure over (t, y) together with the data of the run."""

    structure: FrobTypeStructure
    base_dirs: int                    # number of original directions
    new_dirs: int
    zeta0: tuple[Fraction, ...]
    psi: Potential                    # potential of the extended structure
    input_structure: FrobTypeStructure
    weights: linalg.Flag
    log: tuple[str, ...]


def _require_total_ring(ring: JetRing) -> None:
    if ring.unfold_vars:
        raise ValueError("unfolding expects a single-group (total degree) ring")


def _unfold_one_direction(higgs: list[JetMatrix], u: JetMatrix, v: JetMatrix,
                          zeta0, psi: list[Jet], frame: MonomialFrame,
                          log: list[str]) -> tuple[list[JetMatrix], JetMatrix, JetMatrix]:
    """Add the last ring variable as an unfolding direction.

    On entry higgs has one matrix per previous direction and every input is
    independent of the new variable; the potential psi already includes the
    new direction's term.  Returns (extended higgs incl. C_y, U, V).
    """
    ring = u.ring
    y = ring.nvars - 1
    order = ring.base_order
    base_higgs = [c for c in higgs]
    base_u = u
    zvec = [ring.const(frac(x)) for x in zeta0]
    dpsi = [p.diff(y) for p in psi]
    cur_higgs = list(base_higgs)
    cur_u = base_u
    cy = JetMatrix.zeros(ring, u.nrows)
    for n in range(order + 1):
        words = [_word_matrix(w, cur_higgs, cur_u) for w in frame.words]
        cols = [m.apply(zvec) for m in words]
        amat = JetMatrix(ring, [[cols[j][i].truncate_var(y, n)
                                 for j in range(len(cols))]
                                for i in range(u.nrows)])
        b = [dp.truncate_var(y, n) for dp in dpsi]
        coeffs, _ = solve_linear(amat, b)
        cy = JetMatrix.zeros(ring, u.nrows)
        for g, m in zip(coeffs, words):
            cy = cy + m.map(lambda a, g=g: a * g)
        cy = cy.truncate_var(y, n)
        if n == order:
            break
        # lift the previous directions and U by one order in y
        cur_higgs = [base_higgs[i] + cy.diff(i).integrate(y)
                     for i in range(len(base_higgs))]
        cur_u = base_u + (cy.comm(v) - cy).integrate(y)
    log.append(f"direction x_{y}: solved C_y to order {order} "
               f"with frame of {len(frame.words)} words")
    return cur_higgs + [cy], cur_u, v


def unfold(t: MixedTrTLEPData, zeta0: Sequence, psi_ext: Sequence[Jet],
           order: int | None = None) -> UnfoldingResult:
    """Unfold along the extra variables of the ring of psi_ext.

    psi_ext must restrict to the potential of t at the new variables = 0;
    the recursion then determines the extension uniquely.  Requires (GC).
    """
    _require_total_ring(t.ring)
    ring0 = t.ring
    target = psi_ext[0].ring
    _require_total_ring(target)
    if order is not None and order != ring0.base_order:
        raise ValueError("truncation order is fixed by the ring of t "
                         f"({ring0.base_order}); got {order}")
    lnew = target.nvars - ring0.nvars
    if lnew < 0 or target.base_order != ring0.base_order:
        raise ValueError("psi_ext ring must extend the ring of t")
    cond = section_conditions(t.structure, zeta0, 0)
    if not cond.generation:
        raise GCFails("zeta0 does not generate at the closed point")
    base_pot = potential(t.structure, zeta0)
    for comp, p in enumerate(base_pot.components):
        ext = psi_ext[comp].set_vars_zero(range(ring0.nvars, target.nvars))
        if Jet.build(ring0, [(e[:ring0.nvars], c) for e, c in ext.coeffs.items()]) != p:
            raise ValueError("psi_ext does not restrict to the potential of t")
    log: list[str] = []
    higgs = [c for c in t.structure.higgs]
    u, v = t.structure.u, t.structure.v
    zeta = [frac(x) for x in zeta0]
    for step in range(lnew):
        cur_ring = JetRing(ring0.nvars + step + 1, ring0.base_order)
        higgs = [c.in_ring(cur_ring) for c in higgs]
        u = u.in_ring(cur_ring)
        v = v.in_ring(cur_ring)
        psi_step = [Jet.build(cur_ring,
                              [(e[:cur_ring.nvars], c)
                               for e, c in psi_ext[comp].coeffs.items()
                               if all(x == 0 for x in e[cur_ring.nvars:])])
                    for comp in range(t.rank)]
        frame = monomial_frame(
            FrobTypeStructure(cur_ring, tuple(higgs) + (JetMatrix.zeros(cur_ring, t.rank),),
                              u, v), zeta0)
        # frame words index generators (C_0..C_{prev}, C_y placeholder, U);
        # rebuild without the placeholder so U keeps the last index
        frame = _frame_without_placeholder(frame, len(higgs))
        higgs, u, v = _unfold_one_direction(higgs, u, v, zeta, psi_step, frame, log)
    final_ring = u.ring
    structure = FrobTypeStructure(final_ring, tuple(higgs), u, v)
    psi_final = Potential(tuple(psi_ext[comp].in_ring(final_ring)
                                if psi_ext[comp].ring != final_ring else psi_ext[comp]
                                for comp in range(t.rank)))
    return UnfoldingResult(structure, ring0.nvars, lnew, tuple(zeta),
                           psi_final, t.structure, t.weights, tuple(log))


def _frame_without_placeholder(frame: MonomialFrame, placeholder: int) -> MonomialFrame:
    """Drop the not-yet-solved direction from the generator alphabet: words
    using it would be invalid (it is zero at this stage anyway)."""
    words = []
    for w in frame.words:
        if placeholder in w:
            raise AssertionError("frame selected the unsolved direction")
        words.append(tuple(g if g < placeholder else g - 1 for g in w))
    return MonomialFrame(frame.ngens - 1, tuple(words))


def universal_unfold(t: MixedTrTLEPData, zeta0: Sequence) -> tuple[UnfoldingResult, Certificate]:
    """Universal unfolding: extend by a complement basis of the order-0
    image of d psi, run the recursion, and certify (IdC) afterwards."""
    _require_total_ring(t.ring)
    cond = section_conditions(t.structure, zeta0, 0)
    if not cond.generation:
        raise GCFails("zeta0 fails (GC) at the closed point")
    if not cond.injectivity:
        raise ICFails("zeta0 fails (IC) at the closed point")
    r = t.rank
    ring0 = t.ring
    z = [frac(x) for x in zeta0]
    image_rows = [linalg.mat_vec(c.at0(), z) for c in t.structure.higgs]
    comp: list[list[Fraction]] = []
    for s in range(r):
        e = [Fraction(0)] * r
        e[s] = Fraction(1)
        if linalg.rank(image_rows + comp + [e]) > linalg.rank(image_rows + comp):
            comp.append(e)
    lnew = len(comp)
    target = JetRing(ring0.nvars + lnew, ring0.base_order)
    base_pot = potential(t.structure, zeta0)
    psi_ext = []
    for c in range(r):
        p = base_pot.components[c].in_ring(target)
        for j, b in enumerate(comp):
            p = p + target.var(ring0.nvars + j) * b[c]
        psi_ext.append(p)
    result = unfold(t, zeta0, psi_ext)
    cert = verify_unfolding(result)
    after = section_conditions(result.structure, zeta0, 0)
    cert.add("IdC-after-unfolding", after.identity,
             f"rank {after.generated_dim}")
    return result, cert


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

def verify_unfolding(res: UnfoldingResult) -> Certificate:
    """Exact residuals of the six recursion equation families plus flag
    preservation; restriction to the new variables = 0 must equal the input
    coefficientwise."""
    cert = Certificate("unfolding")
    s = res.structure
    ring = s.ring
    d = ring.base_order
    m = res.base_dirs
    n = ring.nvars
    new = range(m, n)

    # (n=0): bit-for-bit restriction
    ring0 = res.input_structure.ring
    def restrict(mat: JetMatrix) -> JetMatrix:
        return JetMatrix(ring0, [[Jet.build(ring0,
                                            [(e[:ring0.nvars], c)
                                             for e, c in a.set_vars_zero(new).coeffs.items()])
                                  for a in row] for row in mat.rows])
    ok = all(restrict(s.higgs[i]) == res.input_structure.higgs[i] for i in range(m))
    ok = ok and restrict(s.u) == res.input_structure.u
    ok = ok and restrict(s.v) == res.input_structure.v
    cert.add("(n=0)-restriction-equals-input", ok)

    def zero_at(mat: JetMatrix, order: int, name: str):
        cert.add(name, mat.truncate(order).is_zero())

    # (t1): base-direction relations
    for i in range(m):
        for j in range(i + 1, m):
            zero_at(s.higgs[i].comm(s.higgs[j]), d, f"(t1):[C_{i},C_{j}]")
            zero_at(s.higgs[i].diff(j) - s.higgs[j].diff(i), d - 1,
                    f"(t1):dC_{i}/dt_{j}-dC_{j}/dt_{i}")
        zero_at(s.higgs[i].comm(s.u), d, f"(t1):[C_{i},U]")
        zero_at(s.v.diff(i), d - 1, f"(t1):dV/dt_{i}")
        zero_at(s.u.diff(i) - s.higgs[i].comm(s.v) + s.higgs[i], d - 1,
                f"(t2):dU/dt_{i}")
    # (y1), (y2): relations involving the new directions
    for a in new:
        for i in range(n):
            if i >= a:
                continue
            zero_at(s.higgs[i].comm(s.higgs[a]), d, f"(y1):[C_{i},C_y{a}]")
            zero_at(s.higgs[i].diff(a) - s.higgs[a].diff(i), d - 1,
                    f"(y1):dC_{i}/dy{a}-dC_y{a}/dx_{i}")
        zero_at(s.higgs[a].comm(s.u), d, f"(y1):[C_y{a},U]")
        zero_at(s.v.diff(a), d - 1, f"(y1):dV/dy{a}")
        zero_at(s.u.diff(a) - s.higgs[a].comm(s.v) + s.higgs[a], d - 1,
                f"(y2):dU/dy{a}")
    # (potential)
    zvec = [ring.const(x) for x in res.zeta0]
    for a in range(n):
        czeta = s.higgs[a].apply(zvec)
        for compn in range(s.rank):
            resid = (res.psi.components[compn].diff(a) - czeta[compn]).truncate(d - 1)
            if not resid.is_zero():
                cert.add(f"(potential):dpsi/dx_{a}", False,
                         f"component {compn}")
                break
        else:
            cert.add(f"(potential):dpsi/dx_{a}", True)
    # weight-flag preservation by every matrix at every jet order
    mats = {f"C_{i}": s.higgs[i] for i in range(n)}
    mats["U"] = s.u
    mats["V"] = s.v
    for name, mtx in mats.items():
        ok, why = trtlep._preserves_flag(mtx, res.weights)
        cert.add(f"W-preserved-by-{name}", ok, why)
    return cert


# ---------------------------------------------------------------------------
# pairing extension and structure extraction
# ---------------------------------------------------------------------------

def extend_pairings(res: UnfoldingResult, pairings: GradedPairingSet
                    ) -> tuple[GradedPairingSet, Certificate]:
    """The extended graded pairing is the same constant g_k; the substantive
    content is self-adjointness of every induced graded matrix (including
    the new Higgs directions) at all jet orders."""
    cert = Certificate("pairing_extension")
    ring = res.structure.ring
    quots = graded_data(res.weights)
    for k in sorted(quots):
        q = quots[k]
        g = pairings.matrix(k)
        gj = JetMatrix.from_rational(ring, g)
        for a in range(ring.nvars):
            bar = induced_graded_matrix(res.structure.higgs[a], q)
            resid = gj @ bar - bar.transpose() @ gj
            tag = "new" if a >= res.base_dirs else "base"
            cert.add(f"g_{k}-selfadjoint-C_{a}({tag})", resid.is_zero())
        bar = induced_graded_matrix(res.structure.u, q)
        cert.add(f"g_{k}-selfadjoint-U", (gj @ bar - bar.transpose() @ gj).is_zero())
    return pairings, cert


def extract_mfs(res: UnfoldingResult, zeta0: Sequence, d,
                pairings: GradedPairingSet) -> tuple[SaitoMFSData, Certificate]:
    """Mixed Frobenius structure of charge d from an unfolding satisfying
    (IdC) and (EC)_d, via the flat-coordinate transport."""
    t_ext = MixedTrTLEPData(res.structure, res.weights, pairings)
    mfs, cert = trtlep.roundtrip_saito(t_ext, zeta0, d)
    mfs_cert = trtlep.check_mfs(mfs)
    cert.extend(mfs_cert, prefix="mfs:")
    return mfs, cert
