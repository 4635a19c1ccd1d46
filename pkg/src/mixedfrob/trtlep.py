"""Frobenius-type structures and mixed trTLEP-structures in the flat frame.

Everything is stored with the residual connection already normalized to d,
so flat subbundles are constant subspaces and all axioms become exact
matrix identities on jets.  The lambda-direction data of the connection
    d + (1/lambda) sum C_i dx_i + ((1/lambda) U - V) dlambda/lambda
is carried by the endomorphisms U and V; a weight flag and constant graded
pairing matrices g_k (the lambda^{-k} coefficient of the graded pairing)
complete the mixed structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

from . import jets, linalg
from .certificates import Certificate
from .jets import Jet, JetMatrix, JetRing
from .linalg import Flag, QSubspace, frac


class ZeroVector(ValueError):
    pass


class ConditionsNotMet(ValueError):
    pass


class SplittingFails(ValueError):
    pass


class TransversalityFails(ValueError):
    pass


# ---------------------------------------------------------------------------
# data model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FrobTypeStructure:
    """Rank-r Frobenius-type data in the flat frame: Higgs components C_i
    (one per jet variable), endomorphisms U, V, all jet matrices."""

    ring: JetRing
    higgs: tuple[JetMatrix, ...]
    u: JetMatrix
    v: JetMatrix

    def __post_init__(self):
        if len(self.higgs) != self.ring.nvars:
            raise ValueError("need one Higgs matrix per jet variable")

    @property
    def rank(self) -> int:
        return self.u.nrows

    def higgs_at0(self) -> list[list[list[Fraction]]]:
        return [c.at0() for c in self.higgs]


@dataclass(frozen=True)
class GradedPairingSet:
    """Constant matrices g_k on the nonzero weight-graded pieces; the full
    pairing on Gr_k is lambda^{-k} g_k in the chosen graded basis."""

    matrices: dict[int, tuple[tuple[Fraction, ...], ...]]

    @staticmethod
    def build(data: dict[int, Sequence[Sequence]]) -> "GradedPairingSet":
        return GradedPairingSet({
            k: tuple(tuple(frac(x) for x in row) for row in m)
            for k, m in data.items()
        })

    def matrix(self, k: int) -> list[list[Fraction]]:
        return [list(r) for r in self.matrices[k]]

    @property
    def weights(self) -> list[int]:
        return sorted(self.matrices)


@dataclass(frozen=True)
class MixedTrTLEPData:
    """Frobenius-type structure + constant weight flag + graded pairings."""

    structure: FrobTypeStructure
    weights: Flag
    pairings: GradedPairingSet

    @property
    def rank(self) -> int:
        return self.structure.rank

    @property
    def ring(self) -> JetRing:
        return self.structure.ring


def trtlep_from_single_weight(structure: FrobTypeStructure, pairing,
                              weight: int = 0) -> MixedTrTLEPData:
    """A trTLEP(-weight)-structure viewed as a mixed one: full flag at the
    given weight with the pairing matrix on the only graded piece."""
    r = structure.rank
    flag = Flag.from_steps(r, [(weight, QSubspace.full(r))])
    return MixedTrTLEPData(structure, flag,
                           GradedPairingSet.build({weight: pairing}))


# ---------------------------------------------------------------------------
# graded pieces
# ---------------------------------------------------------------------------

def graded_data(flag: Flag) -> dict[int, linalg.QuotientData]:
    """Quotient data of each nonzero graded piece of the flag."""
    out = {}
    for k in flag.graded_dims():
        out[k] = flag.graded_quotient(k)
    return out


def induced_graded_matrix(m: JetMatrix, quot: linalg.QuotientData) -> JetMatrix:
    """Matrix induced on a graded piece by a flag-preserving endomorphism."""
    ring = m.ring
    proj = [list(r) for r in quot.projection]
    cols = []
    for rep in quot.reps:
        vec = [ring.const(x) for x in rep]
        img = m.apply(vec)
        cols.append([sum((ring.const(proj[i][a]) * img[a]
                          for a in range(len(img))), ring.zero())
                     for i in range(quot.dim)])
    return JetMatrix(ring, [[cols[j][i] for j in range(len(cols))]
                            for i in range(quot.dim)])


def _preserves_flag(m: JetMatrix, flag: Flag) -> tuple[bool, str]:
    """Check W_k-invariance of every jet coefficient of m."""
    for k, space in flag.steps:
        if space.dim in (0, flag.ambient):
            continue
        for r in space.basis:
            img = m.apply([m.ring.const(x) for x in r])
            # collect per-exponent coefficient vectors
            exps = set()
            for entry in img:
                exps.update(entry.coeffs)
            for e in exps:
                vec = [entry.coeffs.get(e, Fraction(0)) for entry in img]
                if not space.contains(vec):
                    return False, f"W_{k} not preserved at jet exponent {e}"
    return True, ""


# ---------------------------------------------------------------------------
# axiom checkers
# ---------------------------------------------------------------------------

def check_frob_type(f: FrobTypeStructure) -> Certificate:
    """Exact residuals of the two Frobenius-type compatibility relations:
    (A) pairwise commuting Higgs with symmetric derivative, [C_i, U] = 0,
    dV = 0; (B) dU/dx_i = [V, C_i] - C_i."""
    cert = Certificate("frobenius_type")
    ring = f.ring
    n = ring.nvars
    m = ring.base_vars

    def orders(i, j=None):
        db = ring.base_order - (1 if i < m or (j is not None and j < m) else 0)
        du = ring.unfold_order - (1 if i >= m or (j is not None and j >= m) else 0)
        return max(db, 0), max(du, 0)

    for i in range(n):
        for j in range(i + 1, n):
            comm = f.higgs[i].comm(f.higgs[j])
            cert.add(f"A:[C_{i},C_{j}]=0", comm.is_zero())
            db, du = orders(i, j)
            dsym = (f.higgs[i].diff(j) - f.higgs[j].diff(i)).truncate(db, du)
            cert.add(f"A:dC_{i}/dx_{j}-dC_{j}/dx_{i}=0", dsym.is_zero())
    for i in range(n):
        cert.add(f"A:[C_{i},U]=0", f.higgs[i].comm(f.u).is_zero())
        db, du = orders(i)
        cert.add(f"A:dV/dx_{i}=0", f.v.diff(i).truncate(db, du).is_zero())
        # flatness of the lambda-connection pins the bracket order here
        resb = (f.u.diff(i) - f.higgs[i].comm(f.v) + f.higgs[i]).truncate(db, du)
        cert.add(f"B:dU/dx_{i}=[C_{i},V]-C_{i}", resb.is_zero())
    return cert


def lambda_connection_curvature(f: FrobTypeStructure) -> dict[int, list]:
    """Independent cross-check: curvature of the assembled lambda-connection
    d + (1/lambda) sum C_i dx_i + ((1/lambda)U - V) dlambda/lambda, collected
    by lambda power.  Returns {power: [nonzero residual matrices]}."""
    ring = f.ring
    m = ring.base_vars
    n = ring.nvars
    bad: dict[int, list] = {}

    def register(power, mat, db, du):
        t = mat.truncate(db, du)
        if not t.is_zero():
            bad.setdefault(power, []).append(t)

    for i in range(n):
        for j in range(i + 1, n):
            db = ring.base_order - (1 if (i < m or j < m) else 0)
            du = ring.unfold_order - (1 if (i >= m or j >= m) else 0)
            register(-1, f.higgs[i].diff(j) - f.higgs[j].diff(i), max(db, 0), max(du, 0))
            register(-2, f.higgs[i].comm(f.higgs[j]), ring.base_order, ring.unfold_order)
    for i in range(n):
        db = ring.base_order - (1 if i < m else 0)
        du = ring.unfold_order - (1 if i >= m else 0)
        register(-2, f.u.diff(i) + f.higgs[i] - f.higgs[i].comm(f.v), max(db, 0), max(du, 0))
        register(-1, -f.v.diff(i), max(db, 0), max(du, 0))
        register(-3, f.higgs[i].comm(f.u), ring.base_order, ring.unfold_order)
    return bad


def check_mixed_trtlep(t: MixedTrTLEPData) -> Certificate:
    """Full mixed trTLEP verification: Frobenius-type relations, flag
    preservation at all jet orders, and for every nonzero graded piece the
    pairing identities (symmetry, nondegeneracy, constancy in the correct
    in-frame sense, C/U self-adjointness, the V weight identity)."""
    cert = Certificate("mixed_trtlep")
    cert.extend(check_frob_type(t.structure))
    ring = t.ring
    mats = {"C_%d" % i: c for i, c in enumerate(t.structure.higgs)}
    mats["U"] = t.structure.u
    mats["V"] = t.structure.v
    for name, mtx in mats.items():
        ok, why = _preserves_flag(mtx, t.weights)
        cert.add(f"W-preserved-by-{name}", ok, why)
    quots = graded_data(t.weights)
    for k in sorted(quots):
        q = quots[k]
        if k not in t.pairings.matrices:
            cert.add(f"g_{k}-present", False, f"graded piece at weight {k} has no pairing")
            continue
        g = t.pairings.matrix(k)
        if len(g) != q.dim:
            cert.add(f"g_{k}-size", False, f"{len(g)} != dim Gr_{k} = {q.dim}")
            continue
        cert.add(f"g_{k}-symmetric", linalg.is_symmetric(g))
        cert.add(f"g_{k}-nondegenerate", linalg.det(g) != 0)
        gj = JetMatrix.from_rational(ring, g)
        for name in list(mats):
            if name == "V":
                continue
            bar = induced_graded_matrix(mats[name], q)
            res = gj @ bar - bar.transpose() @ gj
            cert.add(f"g_{k}-selfadjoint-{name}", res.is_zero())
        vbar = induced_graded_matrix(t.structure.v, q)
        res = vbar.transpose() @ gj + gj @ vbar - gj.scale(k)
        cert.add(f"g_{k}-V-weight-identity", res.is_zero())
    for k in t.pairings.weights:
        if k not in quots:
            cert.add(f"g_{k}-matches-flag", False,
                     f"pairing given at weight {k} but Gr_{k} = 0")
    return cert


# ---------------------------------------------------------------------------
# Tate twist
# ---------------------------------------------------------------------------

def tate_twist(t: MixedTrTLEPData, ell) -> MixedTrTLEPData:
    """Tate twist by a half-integer: V goes to V + ell, the weight flag and
    graded pairings are re-indexed so a weight-k piece moves to k + 2*ell.
    (This pairing of shifts is the one for which the V weight identity is
    preserved; EC_d becomes EC_{d+2*ell}.)  Involutive in ell."""
    ell = frac(ell)
    two_ell = ell * 2
    if two_ell.denominator != 1:
        raise ValueError("twist parameter must be a half-integer")
    shift = int(two_ell)
    ring = t.ring
    ident = JetMatrix.identity(ring, t.rank)
    new_v = t.structure.v + ident.scale(ell)
    structure = replace(t.structure, v=new_v)
    weights = t.weights.shift(shift)
    pairings = GradedPairingSet({k + shift: m for k, m in t.pairings.matrices.items()})
    return MixedTrTLEPData(structure, weights, pairings)


# ---------------------------------------------------------------------------
# section conditions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SectionConditions:
    injectivity: bool          # (IC)
    identity: bool             # (IdC)
    generation: bool           # (GC)
    eigenvalue: bool           # (EC)_d for the requested d
    generated_dim: int


def section_conditions(f: FrobTypeStructure, zeta0: Sequence, d) -> SectionConditions:
    """Decide (IC), (IdC), (GC), (EC)_d for the flat extension of zeta0 at
    the closed point (order-0 matrices)."""
    z = [frac(x) for x in zeta0]
    if all(x == 0 for x in z):
        raise ZeroVector("zeta0 must be nonzero")
    r = f.rank
    c0 = f.higgs_at0()
    u0 = f.u.at0()
    v0 = f.v.at0()
    cols = [linalg.mat_vec(c, z) for c in c0]
    icm = [[cols[j][i] for j in range(len(cols))] for i in range(r)]
    rk = linalg.rank(linalg.transpose(icm)) if cols else 0
    injective = rk == len(cols)
    bijective = injective and len(cols) == r
    span = _algebra_orbit(c0 + [u0], z)
    generation = span.dim == r
    vz = linalg.mat_vec(v0, z)
    ec = vz == [frac(d) / 2 * x for x in z]
    return SectionConditions(injective, bijective, generation, ec, span.dim)


def _algebra_orbit(generators, z) -> QSubspace:
    r = len(z)
    space = QSubspace.from_rows(r, [z])
    changed = True
    while changed:
        changed = False
        for g in generators:
            for row in space.basis:
                img = linalg.mat_vec(g, list(row))
                if not space.contains(img):
                    space = linalg.sum_spaces(space, QSubspace.from_rows(r, [img]))
                    changed = True
    return space


# ---------------------------------------------------------------------------
# Rees construction from a filtered flat bundle
# ---------------------------------------------------------------------------

def check_opposite(hodge0: dict[int, list[list[Fraction]]], weights: Flag,
                   opposite: dict[int, QSubspace],
                   polarizations: dict[int, list[list[Fraction]]]) -> Certificate:
    """Verify that (W, S, U) is a graded-polarized opposite package for the
    Hodge filtration at the closed point.

    hodge0 maps ell to generators of F^ell (decreasing), opposite maps ell
    to the constant U_ell (increasing), polarizations maps each weight k to
    the matrix of S_k in the basis of the weight-graded representatives.
    On Gr^W_k the checks are: Gr(F^ell) + Gr(U_{ell-1}) a direct sum equal
    to Gr_k, S_k(Gr F^ell, Gr F^{k-ell+1}) = 0, and the opposite isotropy
    S_k(Gr U_ell, Gr U_{k-ell-1}) = 0.
    """
    cert = Certificate("opposite_filtration")
    r = weights.ambient
    hodge_levels = sorted(hodge0, reverse=True)
    opp_levels = sorted(opposite)

    def hodge_space(ell: int) -> QSubspace:
        rows = []
        for l2 in hodge0:
            if l2 >= ell:
                rows.extend(hodge0[l2])
        return QSubspace.from_rows(r, rows) if rows else QSubspace.zero(r)

    def opp_space(ell: int) -> QSubspace:
        space = QSubspace.zero(r)
        for l2 in opp_levels:
            if l2 <= ell:
                space = opposite[l2]
        return space

    def graded_image(space: QSubspace, k: int, quot) -> QSubspace:
        inter = linalg.intersect_spaces(space, weights.space_at(k))
        rows = []
        proj = [list(row) for row in quot.projection]
        for b in inter.basis:
            rows.append(linalg.mat_vec(proj, list(b)))
        return (QSubspace.from_rows(quot.dim, rows)
                if rows and quot.dim else QSubspace.zero(max(quot.dim, 1)))

    lo = min(hodge_levels + opp_levels) - 1
    hi = max(hodge_levels + opp_levels) + 1
    for k in weights.graded_dims():
        quot = weights.graded_quotient(k)
        dk = quot.dim
        sk = polarizations.get(k)
        if sk is None:
            cert.add(f"S_{k}-present", False, "missing graded polarization")
            continue
        cert.add(f"S_{k}-nondegenerate", linalg.det(sk) != 0)
        sym = linalg.is_symmetric(sk)
        skew = all(sk[i][j] == -sk[j][i] for i in range(dk) for j in range(dk))
        cert.add(f"S_{k}-(-1)^k-symmetric", sym if k % 2 == 0 else skew)
        for ell in range(lo, hi + 1):
            gf = graded_image(hodge_space(ell), k, quot)
            gu = graded_image(opp_space(ell - 1), k, quot)
            direct = (linalg.intersect_spaces(gf, gu).dim == 0
                      and gf.dim + gu.dim == dk)
            cert.add(f"(opp)-Gr_{k}-level-{ell}", direct,
                     f"dims {gf.dim}+{gu.dim} vs {dk}")
        for ell in range(lo, hi + 1):
            gf = graded_image(hodge_space(ell), k, quot)
            gf2 = graded_image(hodge_space(k - ell + 1), k, quot)
            ok = _pairing_vanishes(sk, gf, gf2)
            cert.add(f"S_{k}-isotropy-F-{ell}", ok)
            gu = graded_image(opp_space(ell), k, quot)
            gu2 = graded_image(opp_space(k - ell - 1), k, quot)
            ok = _pairing_vanishes(sk, gu, gu2)
            cert.add(f"S_{k}-isotropy-U-{ell}", ok)
    return cert


def _pairing_vanishes(s, a: QSubspace, b: QSubspace) -> bool:
    for x in a.basis:
        sx = linalg.mat_vec(s, list(x))
        for y in b.basis:
            if sum(p * q for p, q in zip(sx, y)) != 0:
                return False
    return True


@dataclass(frozen=True)
class ReesResult:
    data: MixedTrTLEPData
    piece_levels: tuple[int, ...]   # Hodge level of each final frame vector
    zeta0: tuple[Fraction, ...]     # image of the chosen top Hodge generator
    certificate: Certificate


def rees_construct(ring: JetRing, hodge: dict[int, list[list[Jet]]],
                   weights: Flag, opposite: dict[int, QSubspace],
                   polarizations: dict[int, list[list[Fraction]]]) -> ReesResult:
    """Rees construction in the flat frame of a filtered flat bundle.

    hodge maps each level ell to jet-vector generators of F^ell (the flat
    connection is d in the given frame).  The splitting pieces F^ell cap
    U_ell are computed at jet level, the adapted frame is twisted by
    lambda^{-ell}, the residual connection is renormalized to d by a flat
    gauge, and the graded pairings are extracted by matching lambda powers.
    """
    cert = Certificate("rees_construction")
    r = weights.ambient
    hodge0 = {ell: [[v.at0() for v in vec] for vec in hodge[ell]]
              for ell in hodge}
    cert.extend(check_opposite(hodge0, weights, opposite, polarizations),
                prefix="opp:")
    if not cert.ok:
        raise SplittingFails("opposite-filtration checks failed:\n" + cert.summary())

    levels = sorted(hodge, reverse=True)
    piece_vectors: list[list[Jet]] = []
    piece_levels: list[int] = []
    for ell in levels:
        gens = hodge[ell]
        if not gens:
            continue
        u_ell = opposite.get(ell)
        if u_ell is None:
            u_keys = [l2 for l2 in sorted(opposite) if l2 <= ell]
            u_ell = opposite[u_keys[-1]] if u_keys else QSubspace.zero(r)
        piece = _jet_intersection(ring, gens, u_ell)
        for vec in piece:
            piece_vectors.append(vec)
            piece_levels.append(ell)
    if len(piece_vectors) != r:
        raise SplittingFails(
            f"splitting pieces span {len(piece_vectors)} of {r} dimensions")
    frame = JetMatrix(ring, [[piece_vectors[a][i] for a in range(r)]
                             for i in range(r)])
    if linalg.det(frame.at0()) == 0:
        raise SplittingFails("adapted frame degenerate at the closed point")
    cert.add("splitting-decomposes", True)

    frame_inv = frame.inv()
    n = ring.nvars
    db = max(ring.base_order - 1, 0)
    du = max(ring.unfold_order - 1, 0)
    higgs = []
    resid = []
    for i in range(n):
        theta = frame_inv @ frame.diff(i)
        cmat = JetMatrix.zeros(ring, r)
        bmat = JetMatrix.zeros(ring, r)
        for a in range(r):
            for bidx in range(r):
                la, lb = piece_levels[bidx], piece_levels[a]
                ent = theta.rows[bidx][a]
                if ent.is_zero():
                    continue
                if la == lb - 1:
                    cmat.rows[bidx][a] = ent
                elif la == lb:
                    bmat.rows[bidx][a] = ent
                elif la > lb:
                    if not ent.truncate(db, du).is_zero():
                        raise SplittingFails(
                            "derivative leaves the opposite filtration "
                            f"(block {lb}->{la} in direction {i})")
                else:
                    if not ent.truncate(db, du).is_zero():
                        raise TransversalityFails(
                            f"Griffiths transversality fails: block {lb}->{la} "
                            f"in direction {i}")
        higgs.append(cmat.truncate(db, du))
        resid.append(bmat.truncate(db, du))
    cert.add("griffiths-transversality", True)

    work = JetRing(ring.base_vars, db, ring.unfold_vars, du)
    gauge = jets.flat_gauge([b.in_ring(work) for b in resid])
    gauge_inv = gauge.inv()
    higgs_flat = tuple(gauge_inv @ c.in_ring(work) @ gauge for c in higgs)
    vdiag = JetMatrix(work, [[work.const(piece_levels[a] if a == bidx else 0)
                              for a in range(r)] for bidx in range(r)])
    v_flat = gauge_inv @ vdiag @ gauge
    u_flat = JetMatrix.zeros(work, r)
    cert.add("V-constant-after-gauge", v_flat.is_constant())

    # transported weight flag: condition at the closed point, then jet check
    sec = frame.in_ring(work) @ gauge
    flag_steps = []
    for k, wk in weights.steps:
        rows = _twisted_flag_space(sec.at0(), piece_levels, wk)
        flag_steps.append((k, QSubspace.from_rows(r, rows)))
    new_flag = Flag.from_steps(r, flag_steps)
    for k, space in new_flag.steps:
        wk = weights.space_at(k)
        ok, why = True, ""
        for basis_vec in space.basis:
            s_t = sec.apply([work.const(x) for x in basis_vec])
            for ell in set(piece_levels):
                piece_part = _piece_component(s_t, piece_levels, ell)
                exps = set()
                for entry in piece_part:
                    exps.update(entry.coeffs)
                for e in exps:
                    vec = [entry.coeffs.get(e, Fraction(0)) for entry in piece_part]
                    if not wk.contains(vec):
                        ok, why = False, f"piece {ell} leaves W_{k} at {e}"
        cert.add(f"flag-flat-weight-{k}", ok, why)

    # graded pairings by lambda-power matching
    pair_mats: dict[int, list[list[Fraction]]] = {}
    quots = graded_data(new_flag)
    wquots = graded_data(weights)
    for k in sorted(quots):
        q = quots[k]
        wq = wquots[k]
        sk = polarizations[k]
        classes = []
        for rep in q.reps:
            s_t = sec.apply([work.const(x) for x in rep])
            by_level: dict[int, list[Jet]] = {}
            proj = [list(row) for row in wq.projection]
            for ell in set(piece_levels):
                part = _piece_component(s_t, piece_levels, ell)
                coords = [sum((work.const(proj[i][a]) * part[a]
                               for a in range(r)), work.zero())
                          for i in range(wq.dim)]
                by_level[ell] = coords
            classes.append(by_level)
        gk = [[Fraction(0)] * q.dim for _ in range(q.dim)]
        pole_ok = True
        const_ok = True
        for a in range(q.dim):
            for b in range(q.dim):
                by_power: dict[int, Jet] = {}
                for la, ca in classes[a].items():
                    for lb, cb in classes[b].items():
                        val = work.zero()
                        for i in range(wq.dim):
                            for j in range(wq.dim):
                                if sk[i][j]:
                                    val = val + ca[i] * cb[j] * sk[i][j]
                        if val.is_zero():
                            continue
                        sign = Fraction(-1) ** abs(lb)
                        p = la + lb
                        by_power[p] = by_power.get(p, work.zero()) + val * sign
                for p, val in by_power.items():
                    if p != k and not val.is_zero():
                        pole_ok = False
                    elif p == k:
                        if val.coeffs and set(val.coeffs) != {work.zero_exp()}:
                            const_ok = False
                        gk[a][b] = val.at0()
        cert.add(f"P_{k}-pole-order", pole_ok)
        cert.add(f"P_{k}-constant", const_ok)
        pair_mats[k] = gk

    structure = FrobTypeStructure(work, higgs_flat, u_flat, v_flat)
    data = MixedTrTLEPData(structure, new_flag, GradedPairingSet.build(pair_mats))
    cert.extend(check_mixed_trtlep(data), prefix="mixed:")
    top = max(ell for ell in levels if hodge[ell])
    zeta_idx = piece_levels.index(top)
    zeta0 = tuple(Fraction(1) if a == zeta_idx else Fraction(0) for a in range(r))
    return ReesResult(data, tuple(piece_levels), zeta0, cert)


def _piece_component(vec: list[Jet], piece_levels, ell: int) -> list[Jet]:
    ring = vec[0].ring
    return [vec[a] if piece_levels[a] == ell else ring.zero()
            for a in range(len(vec))]


def _twisted_flag_space(sec0, piece_levels, wk: QSubspace) -> list[list[Fraction]]:
    """Solutions xi of: every Hodge-level component of sec0 xi lies in wk."""
    r = len(piece_levels)
    if wk.dim == r:
        return linalg.identity(r)
    ann = linalg.kernel([list(row) for row in wk.basis]) if wk.dim else linalg.identity(r)
    rows = []
    for ell in set(piece_levels):
        comp = [[sec0[i][a] if piece_levels[a] == ell else Fraction(0)
                 for a in range(r)] for i in range(r)]
        rows.extend(linalg.mat_mul(ann, comp))
    return linalg.kernel(rows)


def _jet_intersection(ring: JetRing, gens: list[list[Jet]],
                      u_space: QSubspace) -> list[list[Jet]]:
    """Jet-level basis of span(gens) cap (constant subspace), extending an
    order-0 basis of the intersection order by order."""
    r = len(gens[0])
    ann = (linalg.kernel([list(row) for row in u_space.basis])
           if u_space.dim else linalg.identity(r))
    if not ann:
        ann = []
    gen_mat = JetMatrix(ring, [[gens[j][i] for j in range(len(gens))]
                               for i in range(r)])
    if not ann:
        amat = None
    else:
        ann_jm = JetMatrix.from_rational(ring, ann)
        amat = ann_jm @ gen_mat
    gens0 = [[v.at0() for v in vec] for vec in gens]
    inter0 = linalg.intersect_spaces(
        QSubspace.from_rows(r, gens0), u_space)
    out = []
    for base_vec in inter0.basis:
        c0, _ = linalg.solve(linalg.transpose(gens0), list(base_vec))
        if c0 is None:
            raise SplittingFails("intersection vector not in the Hodge span")
        if amat is None:
            coeffs = [ring.const(x) for x in c0]
        else:
            rhs = [-sum((amat.rows[i][j] * c0[j] for j in range(len(c0))),
                        ring.zero()) for i in range(amat.nrows)]
            try:
                h, _ = jets.solve_linear(amat, rhs)
            except jets.NoSolution as exc:
                raise SplittingFails(f"intersection does not extend: {exc}")
            coeffs = [ring.const(c0[j]) + h[j] for j in range(len(c0))]
        out.append(gen_mat.apply(coeffs))
    return out


# ---------------------------------------------------------------------------
# Saito / mixed Frobenius structures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SaitoMFSData:
    """Mixed Frobenius data in flat coordinates: multiplication matrices
    mult[k] (the operator of product by the k-th coordinate field), unit and
    Euler fields, invariant flag, graded metrics, charge."""

    ring: JetRing
    mult: tuple[JetMatrix, ...]
    unit: tuple[Fraction, ...]
    euler: tuple[Jet, ...]
    filtration: Flag
    metrics: GradedPairingSet
    charge: Fraction

    @property
    def dim(self) -> int:
        return self.ring.nvars


def euler_gradient(mfs: SaitoMFSData) -> JetMatrix:
    """Matrix of nabla_. E in flat coordinates: entry (s, j) = dE^s/dx_j."""
    ring = mfs.ring
    return JetMatrix(ring, [[mfs.euler[s].diff(j) for j in range(mfs.dim)]
                            for s in range(mfs.dim)])


def check_mfs(mfs: SaitoMFSData) -> Certificate:
    """Saito axioms, filtration invariance, and the two metric identities
    (multiplication self-adjointness and the Euler scaling law)."""
    cert = Certificate("mixed_frobenius")
    ring = mfs.ring
    n = mfs.dim
    db, du = max(ring.base_order - 1, 0), max(ring.unfold_order - 1, 0)

    # commutativity: column j of mult[i] equals column i of mult[j]
    comm_ok = all(mfs.mult[i].rows[s][j] == mfs.mult[j].rows[s][i]
                  for i in range(n) for j in range(n) for s in range(n))
    cert.add("product-commutative", comm_ok)
    for i in range(n):
        for j in range(i + 1, n):
            cert.add(f"mult-operators-commute-{i}{j}",
                     mfs.mult[i].comm(mfs.mult[j]).is_zero())
    # closure: M_i M_j = sum_s c_{ij}^s M_s (associativity with flat frame)
    for i in range(n):
        for j in range(n):
            lhs = mfs.mult[i] @ mfs.mult[j]
            rhs = JetMatrix.zeros(ring, n)
            for s in range(n):
                rhs = rhs + mfs.mult[s].map(
                    lambda a, c=mfs.mult[i].rows[s][j]: a * c)
            cert.add(f"product-associative-{i}{j}", (lhs - rhs).is_zero())
    # unit: sum_k e^k M_k = id and e flat (constant by representation)
    acc = JetMatrix.zeros(ring, n)
    for k in range(n):
        acc = acc + mfs.mult[k].scale(mfs.unit[k])
    cert.add("unit-acts-as-identity",
             (acc - JetMatrix.identity(ring, n)).is_zero())
    # potentiality: d_i c_{jk} = d_j c_{ik}
    for i in range(n):
        for j in range(i + 1, n):
            res = (mfs.mult[j].diff(i) - mfs.mult[i].diff(j)).truncate(db, du)
            cert.add(f"product-potential-{i}{j}", res.is_zero())
    # Euler: nabla nabla E = 0 (E affine in flat coordinates)
    grad = euler_gradient(mfs)
    for i in range(n):
        cert.add(f"euler-affine-{i}", grad.diff(i).truncate(db, du).is_zero())
    # Lie_E(mult) = mult, componentwise
    for i in range(n):
        res = JetMatrix.zeros(ring, n)
        for u in range(n):
            res = res + mfs.mult[i].diff(u).map(lambda a, e=mfs.euler[u]: a * e)
        res = res - grad @ mfs.mult[i] + mfs.mult[i] @ grad
        for u in range(n):
            res = res + mfs.mult[u].map(lambda a, g=grad.rows[u][i]: a * g)
        res = res - mfs.mult[i]
        cert.add(f"euler-homogeneity-{i}", res.truncate(db, du).is_zero())
    # filtration: product-invariant, flat (constant), E-closed
    for i in range(n):
        ok, why = _preserves_flag(mfs.mult[i], mfs.filtration)
        cert.add(f"I-invariant-under-mult-{i}", ok, why)
    ok, why = _preserves_flag(grad, mfs.filtration)
    cert.add("I-E-closed", ok, why)
    # metrics: symmetric, nondegenerate, (g1) and (g2)
    quots = graded_data(mfs.filtration)
    for k in sorted(quots):
        q = quots[k]
        if k not in mfs.metrics.matrices:
            cert.add(f"metric_{k}-present", False, "missing graded metric")
            continue
        g = mfs.metrics.matrix(k)
        cert.add(f"metric_{k}-symmetric", linalg.is_symmetric(g))
        cert.add(f"metric_{k}-nondegenerate", linalg.det(g) != 0)
        gj = JetMatrix.from_rational(ring, g)
        for i in range(n):
            bar = induced_graded_matrix(mfs.mult[i], q)
            cert.add(f"metric_{k}-mult-selfadjoint-{i}",
                     (gj @ bar - bar.transpose() @ gj).is_zero())
        vbar = induced_graded_matrix(grad, q)
        scale = frac(2) - mfs.charge + k
        res = vbar.transpose() @ gj + gj @ vbar - gj.scale(scale)
        cert.add(f"metric_{k}-euler-scaling", res.is_zero())
    return cert


def mfs_to_mixed(mfs: SaitoMFSData) -> MixedTrTLEPData:
    """Associated mixed trTLEP-structure in the flat frame: C_i is minus the
    multiplication, U is multiplication by the Euler field, and V is
    nabla_. E - (2 - d)/2."""
    ring = mfs.ring
    n = mfs.dim
    higgs = tuple(m.scale(-1) for m in mfs.mult)
    u = JetMatrix.zeros(ring, n)
    for k in range(n):
        u = u + mfs.mult[k].map(lambda a, e=mfs.euler[k]: a * e)
    c = (frac(2) - mfs.charge) / 2
    v = euler_gradient(mfs) - JetMatrix.identity(ring, n).scale(c)
    structure = FrobTypeStructure(ring, higgs, u, v)
    return MixedTrTLEPData(structure, mfs.filtration, mfs.metrics)


def roundtrip_saito(t: MixedTrTLEPData, zeta0: Sequence, d) -> tuple[SaitoMFSData, Certificate]:
    """Unique Saito/MFS data with mu = -C_.zeta and e = mu^{-1} zeta, in the
    flat coordinates x = -psi (so the frame map mu becomes the identity).

    Requires (IdC) and (EC)_d for zeta0; the returned certificate records
    the exact identities tying the result back to the input structure.
    """
    from . import unfolding  # local import to avoid a cycle

    cond = section_conditions(t.structure, zeta0, d)
    if not (cond.identity and cond.eigenvalue):
        raise ConditionsNotMet(
            f"need IdC and EC_{d}: got IdC={cond.identity}, EC={cond.eigenvalue}")
    cert = Certificate("saito_roundtrip")
    ring = t.ring
    n = ring.nvars
    r = t.rank
    z = [frac(x) for x in zeta0]
    zeta = [ring.const(x) for x in z]
    psi = unfolding.potential(t.structure, z).components
    # flat coordinates x = -psi(t); invert to t(x)
    flat_order = min(ring.base_order,
                     ring.unfold_order if ring.unfold_vars else ring.base_order)
    flat_ring = JetRing(n, flat_order)

    def reshape(j: Jet) -> Jet:
        return Jet.build(flat_ring, [(e, c) for e, c in j.coeffs.items()
                                     if sum(e) <= flat_order])

    x_of_t = [reshape(-p) for p in psi]
    t_of_x = jets.invert_map(x_of_t)

    def compose(mtx: JetMatrix) -> JetMatrix:
        return mtx.map(lambda a: reshape(a).subs(t_of_x))

    # dt/dx = (dx/dt)^{-1} with dx/dt = -C_.zeta, composed into x; this
    # avoids differentiating the inverted map and keeps the top jet order.
    dx_dt = JetMatrix(flat_ring, [
        [reshape(sum((t.structure.higgs[k].rows[i][j] * (-z[j])
                      for j in range(r)), ring.zero()))
         for k in range(n)] for i in range(r)])
    jac = compose(dx_dt).inv()  # rows i: dt_i/dx_k

    higgs_x = [compose(c) for c in t.structure.higgs]
    # C in the x-frame: C_{d/dx_k} = sum_i (dt_i/dx_k) C_i
    cx = []
    for k in range(n):
        acc = JetMatrix.zeros(flat_ring, r)
        for i in range(n):
            acc = acc + higgs_x[i].map(lambda a, w=jac.rows[i][k]: a * w)
        cx.append(acc)
    mult = tuple(c.scale(-1) for c in cx)
    # mu = -C_.zeta is the identity matrix in these coordinates: certify
    mu = JetMatrix(flat_ring, [[cx[k].apply([flat_ring.const(c) for c in z])[i] * (-1)
                                for k in range(n)] for i in range(r)])
    cert.add("mu-is-identity-in-flat-coordinates",
             (mu - JetMatrix.identity(flat_ring, r)).truncate(flat_order - 1).is_zero())
    unit = tuple(z)
    ux = compose(t.structure.u)
    euler = tuple(ux.apply([flat_ring.const(c) for c in z]))
    vx = compose(t.structure.v)
    mfs = SaitoMFSData(flat_ring, mult, unit, euler, t.weights,
                       t.pairings, frac(d))
    # U = mult_E and V = nabla E - c tie the conversion back to the input
    umfs = JetMatrix.zeros(flat_ring, r)
    for k in range(n):
        umfs = umfs + mfs.mult[k].map(lambda a, e=euler[k]: a * e)
    cert.add("U-equals-mult-by-Euler",
             (umfs - ux).truncate(flat_order - 1).is_zero())
    c = (frac(2) - frac(d)) / 2
    vback = euler_gradient(mfs) - JetMatrix.identity(flat_ring, r).scale(c)
    cert.add("V-equals-euler-gradient-minus-c",
             (vback - vx).truncate(flat_order - 1).is_zero())
    return mfs, cert
