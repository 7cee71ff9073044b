"""Run configurations, suite orchestration and JSON reports."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from . import extremal as ex
from . import suites as S
from .algebra import Algebra, center, quotient
from .chevalley import (StructureError, build_chevalley_algebra, build_structure_constants,
                        canonical_spanning_set, spanning_set_table, verify_h_identities)
from .fields import Field
from .geometry import (DEFAULT_POINT_CAP, MATRIX_LIMIT, PointCapExceeded, brute_force_geometry,
                       orbit_geometry, predicted_point_count)
from .linalg import VerificationError
from .roots import DiagramSpec, RootSystem, RootSystemError

SCHEMA = "extremal-lie-report/1"
SUITES = ("structure", "extremal", "geometry", "dictionary", "pointgroup", "maintheorem", "lemmas")
# suites that enumerate points and so need a finite field
GEOMETRY_SUITES = ("geometry", "pointgroup", "lemmas")
BRUTE_FORCE_CAP = 2**16


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    type: DiagramSpec
    field: Field
    suites: tuple
    point_cap: int = DEFAULT_POINT_CAP
    seed: int = 0
    out: str | None = None

    @classmethod
    def parse(cls, type, field, suites="all", point_cap=DEFAULT_POINT_CAP, seed=0, out=None) -> "RunConfig":
        try:
            spec = DiagramSpec.parse(type)
            fld = Field.parse(field)
        except (RootSystemError, ValueError) as e:
            raise ConfigError(str(e)) from None
        if isinstance(suites, str):
            names = [s.strip() for s in suites.split(",") if s.strip()]
        else:
            names = list(suites)
        if names == ["all"]:
            names = [s for s in SUITES if fld.is_finite or s not in GEOMETRY_SUITES]
        unknown = [s for s in names if s not in SUITES]
        if unknown:
            raise ConfigError(f"unknown suite(s): {', '.join(unknown)}")
        if not fld.is_finite and any(s in GEOMETRY_SUITES for s in names):
            raise ConfigError("geometry suites need a finite field")
        if fld.is_finite and not fld.int_backed and any(s in GEOMETRY_SUITES for s in names):
            raise ConfigError("geometry suites need a prime below 2**25")
        if int(point_cap) < 1:
            raise ConfigError("point cap must be positive")
        ordered = tuple(s for s in SUITES if s in names)
        return cls(spec, fld, ordered, int(point_cap), int(seed), out)

    def to_json(self):
        return {"type": str(self.type), "field": str(self.field), "suites": list(self.suites),
                "point_cap": self.point_cap, "seed": self.seed}


# --- structure and extremality suites ----------------------------------------

def structure_suite(rs: RootSystem, fields=("2", "3", "5")) -> S.SuiteReport:
    """Structure constants: signs, defining pairs, circle identities, Jacobi over Z and each field."""
    rep = S.SuiteReport("structure")
    try:
        table = build_structure_constants(rs, verify=True)
        rep.add("constants +-1, defining pairs, circle identities, Jacobi over Z", True,
                f"{len(table.A)} nonzero constants")
    except StructureError as e:
        rep.add("constants +-1, defining pairs, circle identities, Jacobi over Z", False, str(e), e.witness)
        return rep
    for fl in fields:
        fl = Field.parse(fl)
        L = build_chevalley_algebra(table, fl, verify=False)
        w = L.jacobi_witness()
        rep.add(f"Jacobi over {fl}", w is None, f"dim {L.dim}", w)
        sp = canonical_spanning_set(L, rs)
        try:
            verify_h_identities(sp)
            ok, err = True, None
        except StructureError as e:
            ok, err = False, e
        rep.add(f"h identities over {fl}", ok, "h_-a = -h_a, h_(a+b) = h_a + h_b" if ok else str(err),
                getattr(err, "witness", None))
        if fl.characteristic != 2:
            same = spanning_set_table(sp) == table
            rep.add(f"table read back over {fl}", same, "constants of the basis equal the table")
    rep.data.update(roots=len(rs.roots), dim=len(rs.roots) + rs.n, constants=len(table.A))
    return rep


def _simple_generators(L, xs, rs):
    simple = list(rs.simple) + [rs.neg(a) for a in rs.simple]
    return [xs[a] for a in simple]


def extremal_suite(rs: RootSystem, L: Algebra, xs: dict, label="", controls=True) -> S.SuiteReport:
    """Both extremal identities for every root element, with g from the g-form of the simple root elements.

    ``controls`` adds negative controls that hold in the Chevalley algebra itself
    but not necessarily in its quotients.
    """
    rep = S.SuiteReport("extremal" + (f" {label}" if label else ""))
    f = L.field
    gens = _simple_generators(L, xs, rs)
    try:
        fun = [ex.extremal_functional(L, v) for v in gens]
        form = ex.g_form(L, gens, [g.values for g in fun])
    except VerificationError as e:
        rep.add("g-form from simple root elements", False, str(e), e.witness)
        return rep
    rep.add("g-form from simple root elements", True, f"{len(gens)} generators")
    bad1 = bad2 = bad_norm = bad_direct = None
    for a in rs.roots:
        x = f.reduce(np.asarray(xs[a]))
        g = f.reduce(f.matmul(form.matrix, x))
        if ex.eq1_witness(L, x, g) is not None and bad1 is None:
            bad1 = a
        if ex.eq2_witness(L, x, g) is not None and bad2 is None:
            bad2 = a
        v = f(np.dot(g, f.reduce(np.asarray(xs[rs.neg(a)]))))
        if v != f(-1) and bad_norm is None:
            bad_norm = a
        if f.is_finite and f.characteristic != 2 and bad_direct is None:
            # g is forced by [x,[x,y]] = 2g(y)x away from characteristic 2
            if not f.equal(ex.extremal_functional(L, x).values, g):
                bad_direct = a
    rep.add("[x,[x,y]] = 2g(y)x for every root element", bad1 is None, f"{len(rs.roots)} roots", bad1)
    rep.add("double-bracket identity for every root element", bad2 is None, "all pairs y, z", bad2)
    rep.add("g_{x_a}(x_-a) = -1", bad_norm is None, "", bad_norm)
    if f.is_finite and f.characteristic != 2:
        rep.add("g-form agrees with the functional read off [x,[x,y]]", bad_direct is None, "", bad_direct)
    if controls and f.characteristic == 2:
        pair = next(((a, b) for a in rs.positive for b in rs.positive if rs.inner(a, b) == 0), None)
        if pair is not None:
            x = f.reduce(np.asarray(xs[pair[0]]) + np.asarray(xs[pair[1]]))
            eq1_zero = ex.eq1_witness(L, x, f.zeros(L.dim)) is None
            rep.add("orthogonal sum passes [x,[x,y]] = 0 but is not extremal",
                    eq1_zero and not ex.is_extremal(L, x), f"x_{pair[0]} + x_{pair[1]}", pair)
    if controls:
        h = L.bracket(xs[rs.simple[0]], xs[rs.neg(rs.simple[0])])
        rep.add("Cartan element h_1 is not extremal", not ex.is_extremal(L, h))
    return rep


# --- run ----------------------------------------------------------------------

@dataclass
class Instance:
    """The Chevalley algebra and, when its center is nonzero, the simple quotient."""

    rs: RootSystem
    field: Field
    chevalley: Algebra
    xs: dict
    center_dim: int
    simple: Algebra
    simple_xs: dict
    projection: object = None


def build_instance(spec, fld) -> Instance:
    rs = RootSystem(spec)
    table = build_structure_constants(rs, verify=False)
    G = build_chevalley_algebra(table, fld, verify=False)
    xs = S.root_vectors(G, rs)
    Z = center(G)
    if Z.dim:
        Q = quotient(G, Z)
        return Instance(rs, G.field, G, xs, Z.dim, Q.algebra, S.root_vectors(Q.algebra, rs, Q.projection),
                        Q.projection)
    return Instance(rs, G.field, G, xs, 0, G, xs)


def _geometry_gate(rs, fld, cap):
    if not fld.is_finite:
        return "infinite field"
    n = predicted_point_count(rs, fld.p)
    if n > cap:
        return f"point-cap: {n} predicted points exceed {cap}"
    return None


def _seeds(xs, rs):
    return [xs[a] for a in rs.roots]


def run(config: RunConfig):
    """Run the configured suites; returns the report dict."""
    rs = RootSystem(config.type)
    fld = config.field
    suites, timings = {}, {}
    counts = {"roots": len(rs.roots), "dim": len(rs.roots) + rs.n}
    wanted = set(config.suites)

    def timed(name, fn):
        t = time.perf_counter()
        rep = fn()
        timings[name] = round(time.perf_counter() - t, 3)
        suites[name] = rep.to_json()
        return rep

    if "structure" in wanted:
        fields = [fld] if fld.is_finite else []
        timed("structure", lambda: structure_suite(rs, fields))

    need_alg = wanted - {"structure"}
    inst = build_instance(config.type, fld) if need_alg else None
    if inst is not None:
        counts["center_dim"] = inst.center_dim
        counts["simple_dim"] = inst.simple.dim

    if "extremal" in wanted:
        def _ext():
            rep = extremal_suite(rs, inst.chevalley, inst.xs)
            if inst.center_dim:
                q = extremal_suite(rs, inst.simple, inst.simple_xs, controls=False)
                for c in q.checks:
                    rep.checks.append(S.Check("quotient: " + c.name, c.passed, c.detail, c.witness))
            return rep
        timed("extremal", _ext)

    geom = None
    geom_reason = None
    if wanted & {"geometry", "dictionary", "pointgroup", "lemmas"}:
        geom_reason = _geometry_gate(rs, fld, config.point_cap)
        if geom_reason is None:
            n_pred = predicted_point_count(rs, fld.p)
            if n_pred > MATRIX_LIMIT:
                geom_reason = f"relation matrix: {n_pred} points exceed {MATRIX_LIMIT}"
    if "geometry" in wanted:
        def _geo():
            nonlocal geom
            rep = S.SuiteReport("geometry")
            if geom_reason is not None:
                rep.skipped = geom_reason
                return rep
            try:
                geom = orbit_geometry(inst.chevalley, _seeds(inst.xs, rs), point_cap=config.point_cap)
            except PointCapExceeded as e:
                rep.skipped = f"point-cap: {e} (partial {e.partial})"
                return rep
            want = predicted_point_count(rs, fld.p)
            rep.add("point count matches the long-root count", geom.N == want, f"{geom.N} vs {want}")
            c = geom.counts()
            counts.update(points=c["points"], lines=c["lines"])
            rep.data.update(c, notes=geom.notes)
            for sub in (S.verify_rfs_axioms(geom), S.thickness(geom), S.verify_graph_labels(geom)):
                for ch in sub.checks:
                    rep.checks.append(S.Check(f"{sub.suite}: {ch.name}", ch.passed, ch.detail, ch.witness))
            return rep
        timed("geometry", _geo)

    def _need_geom():
        nonlocal geom
        if geom is None and geom_reason is None:
            geom = orbit_geometry(inst.chevalley, _seeds(inst.xs, rs), point_cap=config.point_cap)
            counts.update(points=geom.N, lines=int(len(geom.lines)))
        return geom

    if "dictionary" in wanted:
        def _dic():
            g = _need_geom()
            if g is None:
                rep = S.apartment_dictionary_check(inst.chevalley, rs, inst.xs)
                rep.data["geometry"] = geom_reason
                return rep
            return S.apartment_dictionary_check(inst.chevalley, rs, inst.xs, g, S.apartment_embedding(g, rs, inst.xs))
        timed("dictionary", _dic)

    for name, fn in (("pointgroup", lambda g: S.verify_point_group_action(inst.chevalley, g)),
                     ("lemmas", S.structural_lemma_suite)):
        if name in wanted:
            def _suite(fn=fn, name=name):
                g = _need_geom()
                if g is None:
                    return S.SuiteReport(name, skipped=geom_reason)
                rep = fn(g)
                rep.suite = name
                return rep
            timed(name, _suite)

    if "maintheorem" in wanted:
        def _main():
            L, xs = inst.simple, inst.simple_xs
            reason = _geometry_gate(rs, fld, config.point_cap)
            if reason is None:
                sg = geom if (geom is not None and inst.center_dim == 0) else \
                    orbit_geometry(L, _seeds(xs, rs), point_cap=config.point_cap)
                emb = S.apartment_embedding(sg, rs, xs)
                reps = {a: sg.points[emb(a)] for a in rs.roots}
                fun = {a: sg.functionals[emb(a)] for a in rs.roots}
                rep = S.verify_main_theorem_instance(L, rs, reps, fun, sg.points, chevalley=inst.chevalley,
                                                     seed=config.seed)
                rep.data["orbit_points"] = sg.N
                if fld.p ** L.dim <= BRUTE_FORCE_CAP:
                    # recorded, not asserted: quotients can carry extremal points outside the root orbit
                    rep.data["brute_force_points"] = brute_force_geometry(L, BRUTE_FORCE_CAP).N
            else:
                gens = _simple_generators(L, xs, rs)
                form = ex.g_form(L, gens, [ex.extremal_functional(L, v).values for v in gens])
                fun = {a: L.field.reduce(L.field.matmul(form.matrix, xs[a])) for a in rs.roots}
                rep = S.verify_main_theorem_instance(L, rs, xs, fun, None, chevalley=inst.chevalley,
                                                     seed=config.seed)
                rep.data["points"] = f"not enumerated ({reason})"
            rep.suite = "maintheorem"
            return rep
        timed("maintheorem", _main)

    failed = any(s["status"] == "fail" for s in suites.values())
    return {"schema": SCHEMA, "tool_version": __version__, "config": config.to_json(),
            "status": "fail" if failed else "pass", "counts": counts, "suites": suites,
            "timings": timings}


def dumps(report) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def summary(report) -> str:
    cfg = report["config"]
    lines = [f"{cfg['type']} over {cfg['field']}: {report['status']}"]
    for name, s in report["suites"].items():
        extra = ""
        if s["status"] == "skipped":
            extra = f" ({s.get('reason', '')})"
        elif s["status"] == "fail":
            extra = " (" + "; ".join(c["name"] for c in s["checks"] if not c["passed"]) + ")"
        t = report["timings"].get(name)
        lines.append(f"  {name:12s} {s['status']:8s}{extra}" + (f"  [{t:.2f}s]" if t is not None else ""))
    c = report["counts"]
    lines.append("  counts: " + ", ".join(f"{k}={v}" for k, v in c.items()))
    return "\n".join(lines)


class SchemaMismatch(ValueError):
    pass


def compare_reports(a, b):
    """Differences between two reports as (path, left, right), ignoring timing fields."""
    if a.get("schema") != b.get("schema"):
        raise SchemaMismatch(f"schema {a.get('schema')} vs {b.get('schema')}")
    out = []

    def walk(x, y, path):
        if isinstance(x, dict) and isinstance(y, dict):
            for k in sorted(set(x) | set(y)):
                if k == "timings":
                    continue
                walk(x.get(k), y.get(k), path + (k,))
        elif isinstance(x, list) and isinstance(y, list) and len(x) == len(y):
            for i, (u, v) in enumerate(zip(x, y)):
                walk(u, v, path + (i,))
        elif x != y:
            out.append(("/".join(map(str, path)), x, y))

    walk(a, b, ())
    return out
