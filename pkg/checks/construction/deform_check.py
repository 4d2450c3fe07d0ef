import numpy as np

from chains import south_pole
from chains.regions import BoundaryBall, unit_disk
from chains.zero import ZeroChain
from checks.base_check import BaseCheck
from coarea.cover import sample_domain
from core.errors import DegenerateCenter
from fill.deform import ff_deform
from fill.generic_point import pick_generic_point
from fill.rays import ray_fill
from fill.skeleton import GridSkeleton

GRID_SIZES = {2: (4, 8, 16), 3: (4, 8)}


class DeformationCheck(BaseCheck):
    def get_name(self) -> str:
        return "ff_deformation"

    def get_description(self) -> str:
        return "Pushed ray fillings land on the grid skeleton with mass <= D (k + R^n)"

    def check(self) -> str:
        points = int(self.param("points", 64))
        off_skeleton = 0
        trials = 0
        summary = []
        for n, sizes in GRID_SIZES.items():
            domain = unit_disk(n)
            B = BoundaryBall(south_pole(n), 0.5)
            D_values, displacements = [], []
            for R in sizes:
                rng = self.rng(n, R)
                grid = GridSkeleton.for_domain(1.0 / R, domain)
                apex = pick_generic_point(grid, B, rng=rng)
                z = ZeroChain(sample_domain(domain, points, rng) * 0.9, dim=n)
                rays = ray_fill(z, apex)
                for attempt in range(5):
                    try:
                        _, report = ff_deform(rays, grid, apex, seed=int(rng.integers(1 << 31)))
                        break
                    except DegenerateCenter as e:
                        self.logger.warning(f"R={R}: redrawing push centers ({e})")
                else:
                    raise DegenerateCenter(f"R={R}: push centers degenerate in 5 attempts")
                trials += 1
                if not report.on_skeleton or report.through_apex is False:
                    off_skeleton += 1
                    self.result.add_log(f"n={n}, R={R}: {report.to_dict()}")
                D_values.append(report.D)
                displacements.append(report.displacement)
            self.expect_stable(f"D_n{n}", D_values, float(self.param("factor", 2.0)))
            self.expect_stable(f"displacement_n{n}", displacements,
                               float(self.param("factor", 2.0)))
            summary.append(f"n={n}: D={np.max(D_values):.3g}")
        self.expect_none(off_skeleton, "pushed chains leave the grid skeleton", trials)
        return ", ".join(summary)
