from checks.base_check import BaseCheck
from core.errors import NotFound
from fill.hyperplane import (
    estimate_delta_n,
    find_avoiding_hyperplane,
    random_ball_family,
    random_sphere_points,
    random_spherical_polygon,
    skeleton_cut_holds,
)


class HyperplaneCheck(BaseCheck):
    def get_name(self) -> str:
        return "hyperplane_avoidance"

    def get_description(self) -> str:
        return "Small ball families admit an avoiding plane; plane cuts reach polygon skeleta"

    def check(self) -> str:
        n = int(self.param("n", 3))
        families = int(self.param("families", 1000))
        polygons = int(self.param("polygons", 1000))
        trials = int(self.param("bisection_trials", 200))
        delta_n = estimate_delta_n(n, trials=trials, seed=self.seed)
        budget = float(self.param("fraction", 0.5)) * delta_n
        self.result.add_metric("delta_n", delta_n)
        self.result.add_log(f"estimated diameter budget {delta_n:.4g}, testing at {budget:.4g}")

        rng = self.rng("families")
        not_found = 0
        for i in range(families):
            balls = random_ball_family(n, budget, rng)
            try:
                find_avoiding_hyperplane(balls, n, rng=rng)
            except NotFound as e:
                not_found += 1
                self.result.add_log(f"family {i}: {e}")
        self.expect_none(not_found, "families below the budget have no avoiding plane", families)

        rng = self.rng("polygons")
        broken = 0
        for i in range(polygons):
            polygon = random_spherical_polygon(rng)
            normal = random_sphere_points(1, 3, rng)[0]
            if not skeleton_cut_holds(polygon, normal):
                broken += 1
                self.result.add_log(f"polygon {i}: cut misses the skeleton")
        self.expect_none(broken, "plane cuts miss the polygon skeleton", polygons)
        return f"delta_{n} ~ {delta_n:.4g}; {families} families and {polygons} polygons clean"
