"""Built-in curve registry: five reference curves with known division
field degree annotations and expected census results at a million."""

from __future__ import annotations

from dataclasses import dataclass

from .curve import CurveOverQ
from .density import DegreeProfile

REFERENCE_LIMIT = 10**6


@dataclass(frozen=True)
class CurveSpec:
    label: str
    A: int
    B: int
    profile: DegreeProfile
    expected_cyclic_count: int | None = None
    expected_fraction: str | None = None
    expected_total: int | None = None

    @property
    def curve(self) -> CurveOverQ:
        return CurveOverQ(self.A, self.B)


REGISTRY: dict[str, CurveSpec] = {
    spec.label: spec
    for spec in (
        CurveSpec(
            label="serre-ex1",
            A=-3,
            B=1,
            profile=DegreeProfile(degrees={2: 3}),
            expected_cyclic_count=51105,
            expected_fraction="0.6510",
            expected_total=78498,
        ),
        CurveSpec(
            label="serre-ex2",
            A=2,
            B=3,
            profile=DegreeProfile(degrees={2: 2}, superfluous=frozenset({11})),
            expected_cyclic_count=38383,
            expected_fraction="0.4889",
            expected_total=78498,
        ),
        CurveSpec(
            label="serre-ex3",
            A=-12096,
            B=-544752,
            profile=DegreeProfile(degrees={3: 2}, charsum=frozenset({2, 19})),
            expected_cyclic_count=32652,
            expected_fraction="0.4159",
            expected_total=78498,
        ),
        CurveSpec(
            label="serre-ex4",
            A=1,
            B=3,
            profile=DegreeProfile(charsum=frozenset({2, 13, 19})),
            expected_cyclic_count=63910,
            expected_fraction="0.8141",
            expected_total=78498,
        ),
        CurveSpec(
            label="serre-ex5",
            A=-13392,
            B=-1080432,
            profile=DegreeProfile(degrees={5: 4}, charsum=frozenset({2, 11})),
            expected_cyclic_count=48026,
            expected_fraction="0.6118",
            expected_total=78498,
        ),
    )
}


def get_curve(label: str) -> CurveSpec:
    try:
        return REGISTRY[label]
    except KeyError:
        known = ", ".join(sorted(REGISTRY))
        raise KeyError(f"unknown curve label {label!r}; known: {known}") from None
