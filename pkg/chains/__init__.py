from chains.one import OneChain
from chains.operations import (
    add_zero,
    boundary_one,
    components,
    cone_fill,
    homothety,
    restrict,
    slice_sphere,
)
from chains.regions import (
    Ball,
    BoundaryArc,
    BoundaryBall,
    Box,
    Complement,
    ConvexPolygon,
    ConvexPolytope,
    HalfSpace,
    Intersection,
    Region,
    Union,
    unit_disk,
)
from chains.tolerance import eps_geom
from chains.two import TwoChain
from chains.zero import ZeroChain

SOUTH_POLE_2D = (0.0, -1.0)
NORTH_POLE_2D = (0.0, 1.0)
SOUTH_POLE_3D = (0.0, 0.0, -1.0)
NORTH_POLE_3D = (0.0, 0.0, 1.0)


def south_pole(n: int) -> tuple:
    return SOUTH_POLE_3D if n == 3 else SOUTH_POLE_2D


def north_pole(n: int) -> tuple:
    return NORTH_POLE_3D if n == 3 else NORTH_POLE_2D
