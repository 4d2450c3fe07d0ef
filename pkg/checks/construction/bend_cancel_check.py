from chains import south_pole
from chains.regions import BoundaryBall
from checks.base_check import BaseCheck
from core.errors import HardAssertionError
from core.generators import STATIC, FamilySpec, generate_family
from core.seeds import task_seed
from fill.bend_cancel import bend_cancel_fill, verify_bend_cancel


class BendCancelCheck(BaseCheck):
    def get_name(self) -> str:
        return "bend_cancel_bound"

    def get_description(self) -> str:
        return "Bend-and-cancel fillings end on the sphere with mass <= C (k r + r^(1-n))"

    def check(self) -> str:
        dims = self.param("dims", [2, 3])
        counts = self.param("points", [8, 32, 128, 256])
        widths = self.param("widths", [0.25, 0.125, 0.0625])
        B_radius = float(self.param("ball_radius", 0.5))
        failures = 0
        summary = []
        for n in dims:
            B = BoundaryBall(south_pole(n), B_radius)
            constants = []
            for r in widths:
                fitted = 0.0
                for k in counts:
                    spec = FamilySpec(kind=STATIC, n=n, points=k, d=1, q=1, spread=0.4)
                    F = generate_family(spec, task_seed(self.seed, "bend", n, k))
                    try:
                        G, operator, attempts = bend_cancel_fill(
                            F, r, B, seed=task_seed(self.seed, "push", n, k, repr(r)))
                        report = verify_bend_cancel(F, G, r, B, operator.apex, attempts)
                    except HardAssertionError as e:
                        failures += 1
                        self.result.add_log(f"n={n}, r={r}, k={k}: {e}")
                        continue
                    fitted = max(fitted, report.C)
                constants.append(fitted)
            self.expect_stable(f"C_n{n}", constants, float(self.param("factor", 2.0)))
            summary.append(f"n={n}: C={max(constants):.3g}")
        self.expect_none(failures, "bend-and-cancel runs break a hard assert",
                         len(dims) * len(widths) * len(counts))
        return ", ".join(summary)
