"""Named builders for the standard instance family shared by the CLI and
the test suite."""

from __future__ import annotations

import numpy as np

from .constructions import (
    GroupAction,
    coset_action,
    dynamical_cubespace,
    hk_nilspace,
    left_translation_action,
    standard_nilspace,
)
from .groups import (
    abelian_invariants,
    alternating_group,
    cyclic_group,
    dihedral_group,
    direct_product,
    lower_central_series,
    subgroup_closure,
    symmetric_group,
    validate_filtration,
)

GROUP_BUILDERS = {
    "z2": lambda: cyclic_group(2),
    "z3": lambda: cyclic_group(3),
    "z4": lambda: cyclic_group(4),
    "z6": lambda: cyclic_group(6),
    "z8": lambda: cyclic_group(8),
    "z2xz2": lambda: direct_product(cyclic_group(2), cyclic_group(2)),
    "z2xz4": lambda: direct_product(cyclic_group(2), cyclic_group(4)),
    "d4": lambda: dihedral_group(4),
    "s3": lambda: symmetric_group(3),
    "a4": lambda: alternating_group(4),
    "a5": lambda: alternating_group(5),
}


def builtin_group(name):
    if name not in GROUP_BUILDERS:
        raise KeyError(f"unknown builtin group {name!r}; known: {sorted(GROUP_BUILDERS)}")
    return GROUP_BUILDERS[name]()


def z4_deg2_filtration():
    z4 = cyclic_group(4)
    return validate_filtration(z4, [(0, 1, 2, 3), (0, 1, 2, 3), (0, 2), (0,)])


def mod2_rotation_action():
    """Z/4 acting on two points through its mod-2 quotient."""
    z4 = cyclic_group(4)
    table = np.array([[(h + x) % 2 for x in range(2)] for h in range(4)], dtype=np.int64)
    return GroupAction(z4, 2, table)


ACTION_BUILDERS = {
    "z6-rotation": lambda: left_translation_action(cyclic_group(6)),
    "d4-cosets": lambda: coset_action(
        dihedral_group(4), subgroup_closure(dihedral_group(4), [2])
    ),
    "a5-left": lambda: left_translation_action(alternating_group(5)),
    "z4-mod2": mod2_rotation_action,
}


def builtin_action(name):
    if name not in ACTION_BUILDERS:
        raise KeyError(f"unknown builtin action {name!r}; known: {sorted(ACTION_BUILDERS)}")
    return ACTION_BUILDERS[name]()


ABELIAN_NAMES = ("z2", "z3", "z4", "z2xz2")


def corpus_entries(full=False):
    """(name, kind, build) for the standard corpus; `full` raises the
    standard-space lmax from s+1 to s+2 (larger files, deeper checks)."""
    entries = []
    for name in ABELIAN_NAMES:
        for s in (1, 2):
            lmax = s + 2 if full else s + 1

            def build(name=name, s=s, lmax=lmax):
                fab = abelian_invariants(builtin_group(name))
                space = standard_nilspace(fab, s, lmax)
                return space, {"construction": "ds", "abelian": name, "degree": s, "lmax": lmax}

            entries.append((f"ds-{name}-s{s}", "cubespace", build))

    def build_hk_d4(lmax=3):
        d4 = dihedral_group(4)
        filt = lower_central_series(d4)
        hk = hk_nilspace(filt, subgroup_closure(d4, []), lmax)
        return hk.space, {"construction": "hk", "group": "d4", "filtration": "lcs", "lmax": lmax}

    entries.append(("hk-d4-lcs", "cubespace", build_hk_d4))

    def build_hk_z4(lmax=4 if full else 3):
        filt = z4_deg2_filtration()
        hk = hk_nilspace(filt, subgroup_closure(filt.group, []), lmax)
        return hk.space, {"construction": "hk", "group": "z4", "filtration": "deg2", "lmax": lmax}

    entries.append(("hk-z4-deg2", "cubespace", build_hk_z4))

    for act_name in ("z6-rotation", "d4-cosets"):

        def build_dyn(act_name=act_name, lmax=2):
            dyn = dynamical_cubespace(builtin_action(act_name), lmax)
            return dyn.space, {"construction": "dynamical", "action": act_name, "lmax": lmax}

        entries.append((f"dyn-{act_name}", "cubespace", build_dyn))
    return entries
