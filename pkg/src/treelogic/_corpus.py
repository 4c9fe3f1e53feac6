"""Generators for the bundled corpus files; the files themselves are golden outputs."""

from __future__ import annotations

from importlib import resources

from . import gb, gpsg
from .syntax import print_theory

GPSG_TREES = {
    "gpsg_id5.tree": "({V2} ({H,SUBCAT5}) ({N2}) ({N2}))",
    "gpsg_inv_chain.tree": "({S} ({INV,V2} ({INV,V1} ({BAR0,H,INV})) ({N2})) ({N2}))",
    "gpsg_passive.tree": "({S} ({N2}) ({V2} ({V1} ({BAR0,H,PAS}) ({N2})) ({N2})))",
    "gpsg_inv_broken.tree": "({S} ({INV,V2} ({N2}) ({V1} ({BAR0,H,INV}))) ({N2}))",
    "gpsg_pas_violation.tree": "({S} ({N2}) ({V2} ({V1} ({BAR0,H,PAS})) ({N2})))",
    "gpsg_inv_unlicensed.tree": "({S} ({N2}) ({INV,V2} ({V1}) ({N2})))",
}

GB_TREES = {
    "gb_wh.tree": "({CP} ({NP,Spec,TargetPos,Wh}) ({C1} ({C}) ({IP} ({APos,NP,Spec}) "
                  "({I1} ({I}) ({VP} ({V}) ({BasePos,NP,TrAbar,Wh}))))))",
    "gb_wh_barrier.tree": "({CP} ({NP,Spec,TargetPos,Wh}) ({C1} ({C}) ({IP} ({APos,NP,Spec}) "
                          "({I1} ({I}) ({Barrier,VP} ({V}) ({BasePos,NP,TrAbar,Wh}))))))",
    "gb_multi_trace.tree": "({CP} ({NP,Spec,TargetPos,Wh}) ({C1} ({C}) ({IP} ({APos,NP,Spec}) "
                           "({I1} ({I}) ({VP} ({V}) ({BasePos,NP,TrAbar,Wh}) ({BasePos,NP,TrAbar,Wh}))))))",
    "gb_overlap.tree": "({VP} ({Head,Pl,TargetPos,V}) ({V1} ({Head,TargetPos,V}) ({VP} ({NP}) "
                       "({V1} ({VP} ({NP}) ({BasePos,Pl,TrX0,V})) ({BasePos,TrX0,V})))))",
    "gb_no_movement.tree": "({IP} ({APos,NP,Spec}) ({I1} ({I}) ({VP} ({V}) ({NP}))))",
}


def generated() -> dict:
    """File name to expected contents for every corpus file."""
    out = {
        "gpsg_core.thy": print_theory(gpsg.core_theory(3)),
        "gpsg_fsd_example.thy": print_theory(gpsg.example_theory()),
        "gb_core.thy": print_theory(gb.core_theory(gb.ENGLISH)),
        "gb_english_fragment.thy": print_theory(gb.gb_theory(gb.ENGLISH)),
        "gb_english_fragment.json": gb.ENGLISH.to_json(),
    }
    for name, text in {**GPSG_TREES, **GB_TREES}.items():
        out[name] = text + "\n"
    return {k: v if v.endswith("\n") else v + "\n" for k, v in out.items()}


def path(name: str):
    """Location of a bundled corpus file."""
    return resources.files("treelogic") / "corpus" / name


def read(name: str) -> str:
    return path(name).read_text(encoding="utf-8")


def write_all(directory) -> list:
    from pathlib import Path

    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    names = []
    for name, text in sorted(generated().items()):
        (d / name).write_text(text, encoding="utf-8")
        names.append(name)
    return names


if __name__ == "__main__":
    import sys

    print("\n".join(write_all(sys.argv[1] if len(sys.argv) > 1 else resources.files("treelogic") / "corpus")))
