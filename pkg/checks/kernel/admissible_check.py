import numpy as np

from checks.base_check import BaseCheck
from coarea.admissible import merge_admissible, monotone_constant
from coarea.localized import monotonize
from core.errors import BudgetExceeded, HardAssertionError
from cubical.complex import CubicalComplex

SLACK = 1e-9


def random_balls(rng: np.random.Generator, count: int, spread: float = 0.5):
    centers = rng.uniform(-spread, spread, size=(count, 2))
    radii = rng.uniform(0.01, 0.12, size=count)
    return list(zip(centers, radii))


def inside(ball, family) -> bool:
    c, r = ball
    return any(np.linalg.norm(c - np.asarray(cc)) + r <= rr + SLACK for cc, rr in family.balls)


class AdmissibleAlgebraCheck(BaseCheck):
    def get_name(self) -> str:
        return "admissible_algebra"

    def get_description(self) -> str:
        return "Merged ball families are disjoint, cover their inputs and stay within 3x radius"

    def check(self) -> str:
        families = int(self.param("families", 1000))
        rng = self.rng("merge")
        violations = 0
        for trial in range(families):
            balls = random_balls(rng, int(rng.integers(2, 13)))
            try:
                merged = merge_admissible(balls)
            except (BudgetExceeded, HardAssertionError) as e:
                violations += 1
                self.result.add_log(f"family {trial}: {e}")
                continue
            total = sum(r for _, r in balls)
            ok = (merged.is_disjoint() and all(inside(b, merged) for b in balls)
                  and merged.radius_sum <= 3.0 * total + SLACK)
            if not ok:
                violations += 1
                self.result.add_log(f"family {trial}: merged {merged.to_dict()}")
        self.expect_none(violations, "merged families break disjointness, cover or radius",
                         families)

        profiles = self._monotone_profiles(int(self.param("complexes", 50)))
        return f"{families} merges and {profiles} monotone profiles within bounds"

    def _monotone_profiles(self, complexes: int) -> int:
        if monotone_constant(1) != 1 or monotone_constant(2) != 15:
            raise HardAssertionError("monotone_constant", "c(1)=1 and c(2)=15 expected")
        rng = self.rng("monotone")
        violations = 0
        checked = 0
        for trial in range(complexes):
            p = int(rng.integers(1, 3))
            complex = CubicalComplex.grid(p, int(rng.integers(1, 4)))
            certs = {cell: merge_admissible(random_balls(rng, int(rng.integers(1, 4)), 0.8))
                     for cell in complex.maximal_cells()}
            N = max(f.count for f in certs.values())
            delta = max(f.delta for f in certs.values())
            c = monotone_constant(p)
            try:
                profile = monotonize(certs, complex, p)
            except (BudgetExceeded, HardAssertionError) as e:
                violations += 1
                self.result.add_log(f"complex {trial}: {e}")
                continue
            for cell, family in profile.items():
                checked += 1
                if family.count > c * N or family.radius_sum > c * delta + SLACK:
                    violations += 1
                for facet in cell.facets():
                    if not all(inside(b, family) for b in profile[facet].specs()):
                        violations += 1
        self.expect_none(violations, "monotone profiles exceed their bound", checked)
        return checked
