from localize.constants import (
    DELTA_MAX,
    cone_constant,
    coverage_radius,
    localization_constant,
    mass_bound,
    mass_constant,
    mass_exponent,
)
from localize.family import LocalizedFamily, LocalizeReport, localize_family, select_path
from localize.interpolation import EdgeInterpolation, Sample, interpolate_edge
from localize.small_fill import FillReport, SmallFilling, cone_in_balls, fill_small_family
from localize.split import SplitReport, project_chain, split_filling
