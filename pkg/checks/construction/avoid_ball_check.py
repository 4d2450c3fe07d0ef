from checks.base_check import BaseCheck
from core.errors import HardAssertionError
from core.generators import CROSSING, FamilySpec, generate_family
from core.pipeline import difference_certs
from fill.avoid_ball import avoid_boundary_ball


class AvoidBallCheck(BaseCheck):
    def get_name(self) -> str:
        return "avoid_ball"

    def get_description(self) -> str:
        return "Families crossing the sphere are rerouted around a boundary ball, still localized"

    def check(self) -> str:
        families = int(self.param("families", 50))
        L = float(self.param("L", 0.3))
        delta = float(self.param("delta", 0.15))
        q = int(self.param("q", 16))
        violations = 0
        worst = float("-inf")
        for i in range(families):
            spec = FamilySpec(kind=CROSSING, n=3, points=int(self.param("points", 6)),
                              crossing=1, d=1, q=q, spread=0.15)
            F = generate_family(spec, self.seed + i)
            certs = difference_certs(F, float(self.param("rho", 0.005)),
                                     float(self.param("link", 0.2)))
            try:
                _, report = avoid_boundary_ball(F, certs, L, delta)
            except HardAssertionError as e:
                violations += 1
                self.result.add_log(f"family {i}: {e}")
                continue
            worst = max(worst, report.max_excess)
        self.result.add_metric("max_excess", worst)
        self.expect_none(violations, "families break an avoid-ball postcondition", families)
        return f"{families} families, max mass excess {worst:g}"
