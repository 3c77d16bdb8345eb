"""Command-line front end: build, verify, factor, fibration, cocycle,
translations, rp, corpus, report.

Exit codes: 0 success, 1 a requested check failed, 2 input error,
3 resource guard tripped.
"""

from __future__ import annotations

import functools
import json
import os
import sys

import click
import numpy as np

from . import serialize as ser
from .cocycles import (
    Cocycle,
    GroupValuedFunction,
    Infeasible,
    StructureContext,
    derivative,
    is_cocycle,
    solve_functional,
    straighten_section,
    quotient_by_straight_classes,
)
from .constructions import dynamical_cubespace, hk_nilspace, standard_nilspace
from .corpus import (
    builtin_action,
    builtin_group,
    corpus_entries,
    z4_deg2_filtration,
)
from .cubespace import (
    FiniteCubespace,
    check_cube_invariance,
    check_ergodic,
    check_fibrant,
    check_glueing,
    check_uniqueness,
    nilspace_degree,
    replay_verdict,
)
from .dynamics import DynamicalSystem, NotMinimal, rp_quotient, rp_quotient_components
from .factors import (
    canonical_tower,
    structure_group,
    structure_group_at,
    verify_weak_structure,
)
from .fibrations import check_fibration, check_morphism, classify, decompose
from .groups import (
    NotAGroup,
    abelian_invariants,
    lower_central_series,
    subgroup_closure,
)
from .guards import GuardExceeded, set_guard
from .relations import NotEquivalence
from .translations import aut_filtration, translation_group
from . import report as report_mod

EXIT_CHECK = 1
EXIT_INPUT = 2
EXIT_GUARD = 3

_INPUT_ERRORS = (
    ser.SchemaError,
    FileNotFoundError,
    IsADirectoryError,
    json.JSONDecodeError,
    NotAGroup,
    KeyError,
)
_CHECK_ERRORS = (NotEquivalence, Infeasible, NotMinimal)


def guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except GuardExceeded as err:
            click.echo(f"resource guard: {err}", err=True)
            sys.exit(EXIT_GUARD)
        except _CHECK_ERRORS as err:
            click.echo(f"check failed: {err}", err=True)
            sys.exit(EXIT_CHECK)
        except _INPUT_ERRORS as err:
            click.echo(f"input error: {err}", err=True)
            sys.exit(EXIT_INPUT)
        except ValueError as err:
            click.echo(f"input error: {err}", err=True)
            sys.exit(EXIT_INPUT)

    return wrapper


@click.group()
@click.option("--guard", type=int, default=None, help="Size-guard override; beats NILKIT_GUARD.")
@click.option("--format", "fmt", type=click.Choice(["json"]), default="json", show_default=True)
def main(guard, fmt):
    """Finite cubespace construction and nilspace verification toolkit."""
    if guard is not None:
        set_guard(guard)


def _load_group(spec):
    if os.path.exists(spec):
        return ser.group_from_doc(ser.load(spec, expect_kind="group"))
    return builtin_group(spec)


def _load_abelian(spec):
    return abelian_invariants(_load_group(spec))


def _load_action(spec):
    if os.path.exists(spec):
        return ser.action_from_doc(ser.load(spec, expect_kind="action"))
    return builtin_action(spec)


def _load_space(path) -> FiniteCubespace:
    return ser.cubespace_from_doc(ser.load(path, expect_kind="cubespace"))


def _echo_verdict(v):
    click.echo(f"{v.check}: {'PASS' if v.ok else 'FAIL'} - {v.detail}")


# --- build -------------------------------------------------------------------


@main.group()
def build():
    """Construct cubespace artifacts."""


@build.command("hk")
@click.option("--group", "group_spec", required=True, help="Group file or builtin name.")
@click.option("--filtration", "filt_spec", default="lcs", show_default=True,
              help="'lcs', 'z4-deg2', or a filtration file.")
@click.option("--gamma", "gamma_spec", default="trivial", show_default=True,
              help="'trivial', 'full', or comma-separated element generators.")
@click.option("--lmax", type=int, default=3, show_default=True)
@click.option("--out", required=True, type=click.Path())
@guarded
def build_hk(group_spec, filt_spec, gamma_spec, lmax, out):
    """Host-Kra nilspace on G/Gamma from a filtered group."""
    if filt_spec == "z4-deg2":
        filt = z4_deg2_filtration()
        group = filt.group
    else:
        group = _load_group(group_spec)
        if filt_spec == "lcs":
            filt = lower_central_series(group)
        else:
            filt = ser.filtration_from_doc(ser.load(filt_spec, expect_kind="filtration"))
    if gamma_spec == "trivial":
        gamma = subgroup_closure(group, [])
    elif gamma_spec == "full":
        gamma = subgroup_closure(group, range(group.order))
    else:
        gamma = subgroup_closure(group, [int(v) for v in gamma_spec.split(",")])
    hk = hk_nilspace(filt, gamma, lmax)
    meta = ser.provenance(
        "hk",
        group=group_spec,
        filtration=filt_spec,
        gamma=gamma_spec,
        lmax=lmax,
        gamma_level_orders=list(hk.gamma_level_orders),
        coset_reps=list(hk.coset_reps),
    )
    ser.save(out, ser.cubespace_doc(hk.space, meta=meta))
    click.echo(f"wrote {out}: {hk.space}")


@build.command("ds")
@click.option("--abelian", "abelian_spec", required=True, help="Abelian group file or builtin name.")
@click.option("--degree", type=int, required=True)
@click.option("--lmax", type=int, default=None, help="Defaults to degree + 2.")
@click.option("--out", required=True, type=click.Path())
@guarded
def build_ds(abelian_spec, degree, lmax, out):
    """Standard abelian cubespace cut out by vanishing alternating sums."""
    fab = _load_abelian(abelian_spec)
    lmax = degree + 2 if lmax is None else lmax
    space = standard_nilspace(fab, degree, lmax)
    meta = ser.provenance("ds", abelian=abelian_spec, degree=degree, lmax=lmax,
                          invariant_factors=list(fab.factors))
    ser.save(out, ser.cubespace_doc(space, meta=meta))
    click.echo(f"wrote {out}: {space}")


@build.command("dynamical")
@click.option("--action", "action_spec", required=True, help="Action file or builtin name.")
@click.option("--lmax", type=int, default=2, show_default=True)
@click.option("--out", required=True, type=click.Path())
@guarded
def build_dynamical(action_spec, lmax, out):
    """Dynamical cubespace of a finite group action (orbit = closure)."""
    action = _load_action(action_spec)
    dyn = dynamical_cubespace(action, lmax)
    meta = ser.provenance(
        "dynamical",
        action=action_spec,
        lmax=lmax,
        stabilized_tail_order=dyn.stabilized_tail_order,
    )
    ser.save(out, ser.cubespace_doc(dyn.space, meta=meta))
    click.echo(f"wrote {out}: {dyn.space}")


# --- verify ------------------------------------------------------------------


@main.command()
@click.argument("space_file", type=click.Path(exists=True))
@click.option("--nilspace", "do_nilspace", is_flag=True)
@click.option("--weak-structure", "do_weak", is_flag=True)
@click.option("--invariance", "do_invariance", is_flag=True)
@click.option("--ergodic", type=int, default=None)
@click.option("--fibrant", type=int, default=None)
@click.option("--uniqueness", type=int, default=None)
@click.option("--glueing", type=int, default=None)
@click.option("--replay", type=click.Path(exists=True), default=None,
              help="Certificate whose failure witnesses must reproduce.")
@click.option("--out", type=click.Path(), default=None)
@guarded
def verify(space_file, do_nilspace, do_weak, do_invariance, ergodic, fibrant,
           uniqueness, glueing, replay, out):
    """Run axiom checks and write a machine-readable certificate."""
    space = _load_space(space_file)

    if replay:
        cert = ser.load(replay, expect_kind="certificate")
        failures = [c for c in cert["payload"].get("checks", []) if not c.get("ok")]
        reproduced = all(replay_verdict(space, c) for c in failures)
        click.echo(f"replayed {len(failures)} failure witnesses: "
                   f"{'all reproduce' if reproduced else 'MISMATCH'}")
        sys.exit(0 if reproduced else EXIT_CHECK)

    checks = []
    payload = {"input": os.path.basename(space_file), "checks": []}
    if not any([do_nilspace, do_weak, do_invariance]) and all(
        v is None for v in (ergodic, fibrant, uniqueness, glueing)
    ):
        do_nilspace = True
    if do_invariance:
        checks.append(check_cube_invariance(space))
    if ergodic is not None:
        checks.append(check_ergodic(space, ergodic))
    if fibrant is not None:
        checks.append(check_fibrant(space, fibrant))
    if uniqueness is not None:
        checks.append(check_uniqueness(space, uniqueness))
    if glueing is not None:
        checks.append(check_glueing(space, glueing))
    all_ok = True
    if do_nilspace or do_weak:
        cert = nilspace_degree(space)
        payload["nilspace"] = cert.to_json()
        all_ok = cert.is_nilspace
        click.echo(
            f"nilspace: {'PASS' if cert.is_nilspace else 'FAIL'} - degree {cert.degree}, "
            f"ergodic level {cert.ergodic_level}"
        )
        if not cert.is_nilspace:
            payload["checks"].extend(v.to_json() for v in cert.verdicts.values())
        elif do_weak:
            ws = verify_weak_structure(space, cert.degree)
            payload["weak_structure"] = ws.to_json()
            sgr = structure_group(space, cert.degree)
            payload["structure_group"] = list(sgr.abelian.factors)
            checks.extend(ws.verdicts.values())
    for v in checks:
        _echo_verdict(v)
    payload["checks"].extend(v.to_json() for v in checks)
    _write_cert(out, payload)
    sys.exit(0 if all_ok and all(v.ok for v in checks) else EXIT_CHECK)


def _write_cert(out, payload):
    if out:
        ser.save(out, ser.certificate_doc(payload))
        click.echo(f"certificate: {out}")


# --- factor ------------------------------------------------------------------


@main.command()
@click.argument("space_file", type=click.Path(exists=True))
@click.option("--tower", "do_tower", is_flag=True, default=True)
@click.option("--out-dir", required=True, type=click.Path())
@guarded
def factor(space_file, do_tower, out_dir):
    """Canonical factor tower with structure groups per level."""
    space = _load_space(space_file)
    os.makedirs(out_dir, exist_ok=True)
    tower = canonical_tower(space)
    payload = {"degree": tower.degree, "levels": []}
    ok = True
    for lv in tower.levels:
        member_path = os.path.join(out_dir, f"tower_{lv.level}.json")
        ser.save(member_path, ser.cubespace_doc(
            lv.member, meta=ser.provenance("canonical_factor", level=lv.level)
        ))
        proj_path = os.path.join(out_dir, f"projection_{lv.level}.json")
        ser.save(proj_path, ser.map_doc(lv.projection))
        sgr = structure_group_at(space, lv.level) if lv.level >= 1 else None
        payload["levels"].append({
            "level": lv.level,
            "points": lv.member.npoints,
            "fibration": lv.fibration.to_json(),
            "structure_group": list(sgr.abelian.factors) if sgr else [],
        })
        ok = ok and lv.fibration.ok
        click.echo(
            f"pi_{lv.level}: {lv.member.npoints} points, fibration "
            f"{'PASS' if lv.fibration.ok else 'FAIL'}"
            + (f", A_{lv.level} = {tuple(sgr.abelian.factors)}" if sgr else "")
        )
    ser.save(os.path.join(out_dir, "factor_certificate.json"), ser.certificate_doc(payload))
    sys.exit(0 if ok else EXIT_CHECK)


# --- fibration ---------------------------------------------------------------


@main.command()
@click.argument("map_file", type=click.Path(exists=True))
@click.option("--classify", "do_classify", is_flag=True)
@click.option("--decompose", "do_decompose", is_flag=True)
@click.option("--degree", type=int, default=None,
              help="Nilspace degree; computed from the source when omitted.")
@click.option("--out", type=click.Path(), default=None)
@guarded
def fibration(map_file, do_classify, do_decompose, degree, out):
    """Verify a map is a fibration; optionally classify and decompose."""
    f = ser.map_from_doc(ser.load(map_file, expect_kind="map"))
    payload = {"checks": []}
    morito = check_morphism(f)
    fib = check_fibration(f)
    _echo_verdict(morito)
    _echo_verdict(fib)
    payload["checks"] = [morito.to_json(), fib.to_json()]
    ok = morito.ok and fib.ok
    if (do_classify or do_decompose) and ok:
        if degree is None:
            cert = nilspace_degree(f.source)
            if not cert.is_nilspace:
                click.echo("source is not a verified nilspace; pass --degree", err=True)
                sys.exit(EXIT_CHECK)
            degree = cert.degree
        if do_classify:
            cls = classify(f, degree)
            click.echo(f"classification: {cls.kind}")
            payload["classification"] = {
                "kind": cls.kind,
                "horizontal": cls.horizontal,
                "vertical": cls.vertical,
            }
        if do_decompose:
            dec = decompose(f, degree)
            click.echo(
                f"decomposition: middle space with {dec.middle.npoints} points; "
                + ", ".join(f"{k}={'PASS' if v.ok else 'FAIL'}" for k, v in dec.verdicts.items())
            )
            payload["decomposition"] = {k: v.to_json() for k, v in dec.verdicts.items()}
            payload["middle_points"] = dec.middle.npoints
            ok = ok and all(v.ok for v in dec.verdicts.values())
    if out:
        ser.save(out, ser.certificate_doc(payload))
    sys.exit(0 if ok else EXIT_CHECK)


# --- cocycle -----------------------------------------------------------------


@main.group()
def cocycle():
    """Cocycle calculus: derive, solve, random coboundaries, straighten."""


@cocycle.command("derive")
@click.argument("function_file", type=click.Path(exists=True))
@click.option("--level", type=int, required=True)
@click.option("--out", required=True, type=click.Path())
@guarded
def cocycle_derive(function_file, level, out):
    """Write the signed vertex-sum derivative of a group-valued function."""
    f = ser.function_from_doc(ser.load(function_file, expect_kind="function"))
    rho = derivative(f, level)
    ser.save(out, ser.cocycle_doc(rho, meta=ser.provenance("derivative", level=level)))
    click.echo(f"wrote {out}: cocycle on {rho.values.shape[0]} cubes, verified={rho.verified}")


@cocycle.command("random")
@click.argument("space_file", type=click.Path(exists=True))
@click.option("--abelian", "abelian_spec", required=True)
@click.option("--level", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out-function", type=click.Path(), default=None)
@click.option("--out", "out_cocycle", required=True, type=click.Path())
@guarded
def cocycle_random(space_file, abelian_spec, level, seed, out_function, out_cocycle):
    """Seeded random coboundary: draw g, write g and its derivative."""
    space = _load_space(space_file)
    fab = _load_abelian(abelian_spec)
    rng = np.random.default_rng(seed)
    values = tuple(int(v) for v in rng.integers(0, fab.order, size=space.npoints))
    g = GroupValuedFunction(space, fab, values)
    rho = derivative(g, level)
    if out_function:
        ser.save(out_function, ser.function_doc(space, fab, values,
                                                meta=ser.provenance("random_function", seed=seed)))
    ser.save(out_cocycle, ser.cocycle_doc(rho, meta=ser.provenance(
        "random_coboundary", seed=seed, level=level)))
    click.echo(f"wrote {out_cocycle} (seed {seed})")


@cocycle.command("straighten")
@click.argument("space_file", type=click.Path(exists=True))
@click.option("--degree", type=int, default=None,
              help="Nilspace degree; computed when omitted.")
@click.option("--out-dir", required=True, type=click.Path())
@guarded
def cocycle_straighten(space_file, degree, out_dir):
    """Straighten a section over the base factor collapsed to a point, then
    quotient by the resulting straight classes."""
    space = _load_space(space_file)
    if degree is None:
        cert = nilspace_degree(space)
        if not cert.is_nilspace:
            click.echo("input is not a verified nilspace; pass --degree", err=True)
            sys.exit(EXIT_CHECK)
        degree = cert.degree
    ctx = StructureContext(space, degree)
    b1 = ctx.base_space
    from .cubespace import point_cubespace
    from .fibrations import CubespaceMap

    psi = CubespaceMap(b1, point_cubespace(b1.lmax), (0,) * b1.npoints)
    section = straighten_section(ctx, psi)
    quotient = quotient_by_straight_classes(ctx, psi)
    os.makedirs(out_dir, exist_ok=True)
    ser.save(os.path.join(out_dir, "quotient.json"),
             ser.cubespace_doc(quotient.quotient, meta=ser.provenance(
                 "straight_class_quotient", degree=degree)))
    ser.save(os.path.join(out_dir, "projection.json"), ser.map_doc(quotient.projection))
    payload = {
        "section": list(section.mapping),
        "section_straight": section.straight.to_json(),
        "checks": [v.to_json() for v in quotient.verdicts.values()],
    }
    ser.save(os.path.join(out_dir, "straighten_certificate.json"),
             ser.certificate_doc(payload))
    _echo_verdict(section.straight)
    for v in quotient.verdicts.values():
        _echo_verdict(v)
    ok = section.straight.ok and all(v.ok for v in quotient.verdicts.values())
    sys.exit(0 if ok else EXIT_CHECK)


@cocycle.command("solve")
@click.argument("map_file", type=click.Path(exists=True))
@click.argument("cocycle_file", type=click.Path(exists=True))
@click.option("--out-f", type=click.Path(), default=None)
@click.option("--out-rho", type=click.Path(), default=None)
@click.option("--out", "out_report", type=click.Path(), default=None)
@guarded
def cocycle_solve(map_file, cocycle_file, out_f, out_rho, out_report):
    """Solve rho = d^l f + rho~ o phi exactly, or report Infeasible."""
    phi = ser.map_from_doc(ser.load(map_file, expect_kind="map"))
    rho = ser.cocycle_from_doc(ser.load(cocycle_file, expect_kind="cocycle"))
    if phi.source != rho.space:
        raise ser.SchemaError("$.payload", "cocycle space differs from the map source")
    v = is_cocycle(rho)
    if not v.ok:
        click.echo(f"input is not a cocycle: {v.detail}", err=True)
        sys.exit(EXIT_CHECK)
    try:
        sol = solve_functional(phi, rho)
    except Infeasible as err:
        click.echo(f"infeasible: {err.witness}")
        if out_report:
            ser.save(out_report, ser.certificate_doc(
                {"outcome": "infeasible", "witness": err.witness}
            ))
        sys.exit(EXIT_CHECK)
    count = sol.solution_count()
    click.echo(f"solved: {count} solutions in the lattice; "
               f"rho~ cocycle: {'PASS' if sol.rho_tilde_cocycle.ok else 'FAIL'}")
    if out_f:
        ser.save(out_f, ser.function_doc(phi.source, sol.f.abelian, sol.f.values))
    if out_rho:
        ser.save(out_rho, ser.cocycle_doc(sol.rho_tilde))
    if out_report:
        ser.save(out_report, ser.certificate_doc({
            "outcome": "solved",
            "solution_count": count,
            "rho_tilde_cocycle": sol.rho_tilde_cocycle.to_json(),
        }))
    sys.exit(0)


# --- translations ------------------------------------------------------------


@main.command()
@click.argument("space_file", type=click.Path(exists=True))
@click.option("--level", type=int, default=None, help="Single level; omit for the full filtration.")
@click.option("--max-level", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@guarded
def translations(space_file, level, max_level, out):
    """Brute-force translation groups and the Aut filtration laws."""
    space = _load_space(space_file)
    payload = {}
    ok = True
    if level is not None:
        grp = translation_group(space, level)
        click.echo(f"Aut_{level}: order {len(grp)} ({grp.mode})")
        payload["groups"] = {str(level): [list(p) for p in grp.elements]}
    else:
        groups, verdicts = aut_filtration(space, max_level)
        payload["groups"] = {str(i): [list(p) for p in g.elements] for i, g in groups.items()}
        payload["checks"] = [v.to_json() for v in verdicts.values()]
        for name, v in verdicts.items():
            _echo_verdict(v)
            ok = ok and v.ok
        click.echo("orders: " + ", ".join(f"Aut_{i}={len(g)}" for i, g in groups.items()))
    if out:
        ser.save(out, ser.certificate_doc(payload))
    sys.exit(0 if ok else EXIT_CHECK)


# --- rp ----------------------------------------------------------------------


@main.command()
@click.argument("action_spec")
@click.option("--level", "-s", type=int, required=True)
@click.option("--out", type=click.Path(), default=None, help="Relation file.")
@click.option("--quotient-out", type=click.Path(), default=None)
@guarded
def rp(action_spec, level, out, quotient_out):
    """Regionally proximal relation of the given order and its quotient."""
    action = _load_action(action_spec)
    system = DynamicalSystem(action)
    if not system.minimal:
        comps = rp_quotient_components(system, level)
        click.echo(f"action is not transitive: {len(comps)} orbit components")
        for comp in comps:
            res = comp["result"]
            click.echo(
                f"  orbit {comp['orbit']}: quotient {res.quotient.npoints} points, "
                f"degree {res.certificate.degree}"
            )
        sys.exit(0)
    result = rp_quotient(system, level)
    for v in result.verdicts.values():
        _echo_verdict(v)
    click.echo(
        f"RP^{level}: {len(result.rp.relation.classes)} classes on {action.npoints} points; "
        f"quotient degree {result.certificate.degree}"
    )
    if out:
        ser.save(out, ser.relation_doc(result.rp.relation, meta=ser.provenance(
            "rp_relation", action=action_spec, level=level)))
    if quotient_out:
        ser.save(quotient_out, ser.cubespace_doc(result.quotient, meta=ser.provenance(
            "rp_quotient", action=action_spec, level=level)))
    sys.exit(0 if all(v.ok for v in result.verdicts.values()) else EXIT_CHECK)


# --- corpus and report ---------------------------------------------------------


@main.command()
@click.option("--out-dir", required=True, type=click.Path())
@click.option("--full", is_flag=True, help="Raise standard-space lmax to degree + 2.")
@click.option("--figures/--no-figures", default=True, show_default=True)
@guarded
def corpus(out_dir, full, figures):
    """Build the standard instance corpus with certificates, a delimited
    summary and figures."""
    os.makedirs(out_dir, exist_ok=True)
    results = []
    for name, kind, build_fn in corpus_entries(full):
        space, meta = build_fn()
        path = os.path.join(out_dir, f"{name}.json")
        ser.save(path, ser.cubespace_doc(space, meta=ser.provenance(**{"construction": meta.pop("construction")}, **meta)))
        cert = nilspace_degree(space)
        verdicts = [(k, v.ok) for k, v in cert.verdicts.items()]
        structure = ""
        if cert.is_nilspace and cert.degree and cert.degree >= 1:
            sgr = structure_group(space, cert.degree)
            structure = "x".join(str(f) for f in sgr.abelian.factors) or "1"
        ser.save(os.path.join(out_dir, f"{name}.cert.json"),
                 ser.certificate_doc({"input": f"{name}.json", "nilspace": cert.to_json(),
                                      "checks": [v.to_json() for v in cert.verdicts.values()]}))
        results.append({
            "name": name,
            "space": space,
            "degree": cert.degree,
            "ergodic_level": cert.ergodic_level,
            "structure": structure,
            "ok": cert.is_nilspace,
            "verdicts": verdicts,
        })
        click.echo(f"{name}: degree {cert.degree}, counts {space.counts()}")
    if figures:
        written = report_mod.render_corpus_report(results, out_dir)
        for path in written:
            click.echo(f"report: {path}")
    sys.exit(0 if all(r["ok"] for r in results) else EXIT_CHECK)


@main.command("report")
@click.argument("inputs", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--out-dir", required=True, type=click.Path())
@guarded
def report_cmd(inputs, out_dir):
    """Render figures and delimited summaries for cubespace artifacts."""
    os.makedirs(out_dir, exist_ok=True)
    for path in inputs:
        doc = ser.load(path)
        name = os.path.splitext(os.path.basename(path))[0]
        if doc["kind"] == "cubespace":
            space = ser.cubespace_from_doc(doc)
            cert = nilspace_degree(space)
            rows = [(k, v.ok, v.detail) for k, v in cert.verdicts.items()]
            for written in report_mod.render_cubespace_report(name, space, out_dir, rows):
                click.echo(f"report: {written}")
        elif doc["kind"] == "certificate":
            checks = doc["payload"].get("checks", [])
            rows = [(c.get("check", "?"), c.get("ok"), c.get("detail", "")) for c in checks]
            path_csv = os.path.join(out_dir, f"{name}_verdicts.csv")
            report_mod.write_csv(path_csv, ["check", "ok", "detail"], rows)
            click.echo(f"report: {path_csv}")
        else:
            click.echo(f"skipping {path}: no report for kind {doc['kind']}", err=True)
    sys.exit(0)


if __name__ == "__main__":
    main()
