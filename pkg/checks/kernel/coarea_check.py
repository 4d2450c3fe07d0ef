from chains.operations import slice_sphere
from chains.regions import unit_disk
from checks.base_check import BaseCheck
from checks.sampling import random_segments
from coarea.cover import cover_centers
from coarea.radii import select_radius
from core.errors import Infeasible, TangencyError


class CoareaSelectionCheck(BaseCheck):
    def get_name(self) -> str:
        return "coarea_selection"

    def get_description(self) -> str:
        return "Every selected radius meets the slice bound mass(slice) <= K mass / r"

    def check(self) -> str:
        pairs = int(self.param("pairs", 1000))
        K = int(self.param("K", 1))
        domain = unit_disk(2)
        rng = self.rng("pairs")
        violations = 0
        for trial in range(pairs):
            chain = random_segments(rng, domain, int(rng.integers(1, 30)))
            if chain.is_empty:
                continue
            r = float(rng.uniform(0.05, 0.2))
            cover = cover_centers(domain, r)
            picks = rng.choice(cover.L, size=min(5, cover.L), replace=False)
            for l in picks:
                x = cover.points[int(l)]
                try:
                    s = select_radius(x, [chain], K, r)
                    sliced = slice_sphere(chain, x, s).mass
                except (Infeasible, TangencyError) as e:
                    violations += 1
                    self.result.add_log(f"pair {trial}, center {l}: {e}")
                    continue
                if not r <= s <= 2.0 * r or sliced > K * chain.mass / r + 1e-9:
                    violations += 1
                    self.result.add_log(f"pair {trial}, center {l}: s={s:.6g}, slice={sliced}")
        self.expect_none(violations, "selected radii break the slice bound", pairs)
        return f"{pairs} (chain, cover) pairs, no slice bound violations"
