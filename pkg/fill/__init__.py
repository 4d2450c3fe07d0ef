from fill.avoid_ball import AvoidBallFamily, AvoidBallReport, avoid_boundary_ball, verify_avoid_ball
from fill.bend_cancel import BendCancel, BendCancelReport, bend_cancel_fill, verify_bend_cancel
from fill.deform import DeformReport, PushMap, ff_deform
from fill.domain import (
    MetricGraph,
    ParametricReport,
    TriangleFill,
    TriangulatedDomain,
    graph_fill,
    parametric_fill,
)
from fill.generic_point import GenericPoint, pick_apex, pick_generic_point
from fill.hyperplane import (
    Hyperplane,
    SphericalPolygon,
    estimate_delta_n,
    find_avoiding_hyperplane,
    random_spherical_polygon,
    skeleton_cut_holds,
)
from fill.rays import far_exit, far_exits, ray_fill
from fill.skeleton import GridSkeleton
