"""Compare the solved Roter coefficients of RT with both readings of the reference g^g coefficient."""

from __future__ import annotations

from pseudosym.catalog import builtin
from pseudosym.classify import express_in_span
from pseudosym.curvature import CurvatureBundle
from pseudosym.expr import to_string


def main() -> None:
    m = builtin("robinson-trautman-jet")
    b = CurvatureBundle(m)
    v = express_in_span(b.R, [b.SS, b.gS, b.gg], ["S^S", "g^S", "g^g"], "roter")
    expected = m.candidates["expected"]["roter-type"]
    for label in ("S^S", "g^S", "g^g"):
        solved = v.data[label]
        print(f"{label}: {to_string(solved)}")
        for k, ref in enumerate(expected[label], 1):
            print(f"    reading {k}: {'match' if ref == solved else 'differs'}")


if __name__ == "__main__":
    main()
