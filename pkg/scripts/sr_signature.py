"""Pseudosymmetry scalars of Som-Raychaudhuri under both metric signatures.

C.C / Q(g,C) changes sign with g -> -g; R.R / Q(S,R) does not.
"""

from __future__ import annotations

from pseudosym.catalog import builtin
from pseudosym.classify import proportionality
from pseudosym.curvature import CurvatureBundle
from pseudosym.expr import ONE, to_string
from pseudosym.tensor import MetricSpec


def scalars(b: CurvatureBundle) -> dict[str, str]:
    out = {}
    for label, (D, A, H) in {"C.C / Q(g,C)": ("C", "g", "C"), "R.R / Q(g,R)": ("R", "g", "R"),
                             "R.R / Q(S,R)": ("R", "S", "R")}.items():
        v = proportionality(b.dot(D, H), b.q(A, H))
        out[label] = to_string(v.data["L"]) if v.positive else v.status
    return out


def main() -> None:
    m = builtin("som-raychaudhuri")
    flipped = MetricSpec(m.ctx, m.g.scale(-ONE), "som-raychaudhuri (-g)")
    for metric in (m, flipped):
        print(metric.name)
        for label, value in scalars(CurvatureBundle(metric)).items():
            print(f"  {label:<14} {value}")


if __name__ == "__main__":
    main()
