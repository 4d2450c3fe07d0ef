from cubical.complex import Cell, CubicalComplex, face_closure
from cubical.family import VertexMap, nearest_original, refine_family
from cubical.layered import LayeredFamily, Level, face_of, level_sizes
from cubical.squeeze import center_cell, phi, vertex_metrics, xi
