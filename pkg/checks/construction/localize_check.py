from chains.regions import unit_disk
from checks.base_check import BaseCheck
from core.generators import DRIFTING, FamilySpec, generate_family
from localize.family import localize_family

EPS_FRACTIONS = (0.1, 0.01, 0.001)


class LocalizationCheck(BaseCheck):
    def get_name(self) -> str:
        return "localization_pipeline"

    def get_description(self) -> str:
        return "Localized families keep F at original vertices and pass the localization check"

    def check(self) -> str:
        families = int(self.param("families", 50))
        points = int(self.param("points", 6))
        delta = float(self.param("delta", 0.5))
        q = int(self.param("q", 2))
        domain = unit_disk(2)
        constants = []
        failures = 0
        for fraction in EPS_FRACTIONS:
            eps = fraction * delta
            worst = 0.0
            for i in range(families):
                d = 1 + i % 2
                # per-cell corner moves stay below eps in flat distance
                drift = min(0.45, 0.9 * eps * q / (points * d))
                spec = FamilySpec(kind=DRIFTING, n=2, points=points, d=d, q=q, drift=drift,
                                  spread=0.2)
                F = generate_family(spec, self.seed + i)
                _, _, report = localize_family(F, eps, delta, domain, verify=True)
                if not report.passed:
                    failures += 1
                    self.result.add_log(f"eps={eps:g}, family {i}: {report.to_dict()}")
                worst = max(worst, report.measured_constant(d))
            constants.append(worst)
            self.result.add_log(f"eps={eps:g}: fitted C={worst:.4g}")
        self.expect_none(failures, "localized families fail (a)-(c)", families * len(EPS_FRACTIONS))
        self.expect_stable("C", constants, float(self.param("factor", 2.0)))
        return f"{families} families per eps, fitted C {constants}"
