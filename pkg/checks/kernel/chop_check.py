from chains.regions import Ball, Union, unit_disk
from checks.base_check import BaseCheck
from checks.sampling import random_segments
from coarea.chop import Chopper
from coarea.cover import cover_centers, sample_domain
from core.errors import Infeasible, TangencyError


class ChopStabilityCheck(BaseCheck):
    def get_name(self) -> str:
        return "chop_stability"

    def get_description(self) -> str:
        return "Chopping two chains that agree outside some balls differs only near those balls"

    def check(self) -> str:
        pairs = int(self.param("pairs", 200))
        domain = unit_disk(2)
        rng = self.rng("pairs")
        violations = 0
        for trial in range(pairs):
            r = float(rng.uniform(0.08, 0.2))
            cover = cover_centers(domain, r)
            chopper = Chopper(cover)
            centers = sample_domain(domain, int(rng.integers(1, 4)), rng)
            balls = [(y, float(rng.uniform(0.05, 0.2))) for y in centers]
            tau = random_segments(rng, domain, int(rng.integers(3, 20)))
            change = random_segments(rng, domain, int(rng.integers(1, 10)))
            change = change.restrict(Union([Ball(y, s) for y, s in balls]))
            tau_prime = tau + change
            l = int(rng.integers(0, cover.L + 1))
            try:
                diff = (chopper.chop(tau, l) + chopper.chop(tau_prime, l)).normalized()
            except (Infeasible, TangencyError) as e:
                violations += 1
                self.result.add_log(f"pair {trial}: {e}")
                continue
            grown = [(y, s + 4.0 * r) for y, s in balls]
            if not diff.support_within(grown):
                violations += 1
                self.result.add_log(f"pair {trial}: l={l}, stray mass "
                                    f"{diff.uncovered(grown).mass:.4g}")
        self.expect_none(violations, "chopped pairs differ far from the balls", pairs)
        return f"{pairs} chopped pairs, differences stay within s_i + 4r"
