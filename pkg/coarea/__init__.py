from coarea.admissible import (
    AdmissibleFamily,
    certificate,
    cluster_support,
    cover_support,
    enclosing_ball,
    merge_admissible,
    monotone_constant,
)
from coarea.chop import Chopper, chop
from coarea.cover import (
    CoverCenters,
    cover_centers,
    measured_constant,
    support_points,
    verify_coverage,
)
from coarea.grid import Grid
from coarea.localized import LocalizationReport, check_localized, monotonize
from coarea.radii import select_radii, select_radius
