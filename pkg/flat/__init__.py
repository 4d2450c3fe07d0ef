from flat.fineness import FinenessReport, check_fineness
from flat.norm import (
    ABSOLUTE,
    RELATIVE,
    FlatWitness,
    edge_filling,
    flat_distance,
    flat_norm,
    flat_norm_oracle,
    perfect_matching_filling,
)
