import math

import numpy as np

from checks.base_check import BaseCheck, CheckViolation
from core.errors import HardAssertionError
from core.generators import SWEEPOUT, FamilySpec, generate_family
from core.seeds import task_seed
from fill.domain import TriangulatedDomain, parametric_fill


class ParametricFillCheck(BaseCheck):
    def get_name(self) -> str:
        return "parametric_fill"

    def get_description(self) -> str:
        return "Sweepout slices of the unit square are filled with mass ~ mass_0 p^-1/2 + p^1/2"

    def check(self) -> str:
        masses = self.param("points", [30, 100])
        ps = self.param("p", [4, 16, 64])
        q = int(self.param("q", 8))
        max_slope = float(self.param("max_slope", 0.1))
        domain = TriangulatedDomain.unit_square(int(self.param("divisions", 1)))
        failures = 0
        summary = []
        for points in masses:
            spec = FamilySpec(kind=SWEEPOUT, n=2, points=points, domain="square", d=1, q=q)
            F = generate_family(spec, task_seed(self.seed, "sweepout", points))
            constants = []
            for p in ps:
                try:
                    _, report = parametric_fill(F, domain, p, seed=task_seed(self.seed, points, p))
                except HardAssertionError as e:
                    failures += 1
                    self.result.add_log(f"mass_0={points}, p={p}: {e}")
                    continue
                constants.append(report.C)
            self.result.add_metric(f"C_mass{points}", constants)
            if len(constants) == len(ps):
                slope = float(np.polyfit([math.log(p) for p in ps], np.log(constants), 1)[0])
                self.result.add_metric(f"slope_mass{points}", slope)
                self.result.add_log(f"mass_0={points}: C={constants}, log-log slope {slope:.3g}")
                if slope > max_slope:
                    raise CheckViolation(f"mass_0={points}: ratio grows with p (slope {slope:.3g})")
                summary.append(f"mass_0={points}: slope {slope:.3g}")
        self.expect_none(failures, "parametric fills break a hard assert", len(masses) * len(ps))
        return "; ".join(summary)
