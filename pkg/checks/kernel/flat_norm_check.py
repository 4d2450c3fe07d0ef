from chains.regions import ConvexPolygon, unit_disk
from checks.base_check import BaseCheck
from checks.sampling import random_points
from flat.norm import ABSOLUTE, RELATIVE, flat_norm, flat_norm_oracle

TOLERANCE = 1e-9


class FlatNormOracleCheck(BaseCheck):
    def get_name(self) -> str:
        return "flat_norm_oracle"

    def get_description(self) -> str:
        return "Matching flat norm agrees with the brute-force oracle; its witness rebuilds z"

    def check(self) -> str:
        cycles = int(self.param("cycles", 500))
        max_points = int(self.param("max_points", 8))
        domains = {
            "disk": unit_disk(2),
            "triangle": ConvexPolygon([(0.0, 0.0), (1.0, 0.0), (0.3, 0.9)]),
        }
        violations = 0
        worst = 0.0
        trials = 0
        for mode in (ABSOLUTE, RELATIVE):
            for name, domain in domains.items():
                rng = self.rng(mode, name)
                for _ in range(cycles):
                    z = random_points(rng, domain, max_points)
                    witness = flat_norm(z, domain, mode)
                    gap = abs(witness.value - flat_norm_oracle(z, domain, mode))
                    worst = max(worst, gap)
                    trials += 1
                    if gap > TOLERANCE or not witness.reconstructs(z):
                        violations += 1
                        self.result.add_log(f"{mode}/{name}: gap {gap:.3g} on {z.to_list()}")
        self.result.add_metric("max_gap", worst)
        self.expect_none(violations, "cycles disagree with the oracle", trials)
        return f"{trials} cycles, max gap {worst:.3g}"
