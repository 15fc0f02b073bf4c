import random

from app.core.reference_data import get_row
from app.services.cycles import ActionSpec
from app.services.torsion import PeriodBasis, TorusPoint, parse_point


def random_point(rng: random.Random, max_level: int = 12,
                 basis: PeriodBasis = PeriodBasis.GENERIC) -> TorusPoint:
    level = rng.randint(1, max_level)
    return TorusPoint(level, rng.randrange(level), rng.randrange(level), basis)


def bielliptic(row: int, z: str = "0") -> ActionSpec:
    return ActionSpec.bielliptic(row, parse_point(z, PeriodBasis(get_row(row)["basis"])))
