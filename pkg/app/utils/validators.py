from typing import Optional, Sequence, Tuple, Union
from app.core.config import settings
from app.core.exceptions import InvalidLevelError, PreconditionError


def validate_levels(level_e: int, level_f: int) -> bool:
    """
    Validate model levels

    Args:
        level_e: Torsion level on E
        level_f: Torsion level on F

    Returns:
        True if valid

    Raises:
        InvalidLevelError: If a level is not positive
    """
    if level_e < 1 or level_f < 1:
        raise InvalidLevelError(f"Levels must be positive, got ({level_e}, {level_f})")
    return True


def validate_model_size(level_e: int, level_f: int) -> bool:
    """
    Validate that a point model stays within the enumeration cap

    Raises:
        PreconditionError: If the model has more points than MAX_ENUMERATION
    """
    size = (level_e * level_f) ** 2
    if size > settings.MAX_ENUMERATION:
        raise PreconditionError(
            f"Model with {size} points exceeds maximum {settings.MAX_ENUMERATION}"
        )
    return True


def parse_levels(value: Optional[Union[str, Sequence[int]]]) -> Optional[Tuple[int, int]]:
    """
    Parse "E,F" or a two-element sequence into a level pair

    Raises:
        InvalidLevelError: If the value is not two positive integers
    """
    if value is None:
        return None
    if isinstance(value, str):
        parts = value.replace(" ", "").split(",")
    else:
        parts = list(value)
    try:
        levels = tuple(int(x) for x in parts)
    except ValueError:
        raise InvalidLevelError(f"Levels must be integers, got {value!r}")
    if len(levels) != 2:
        raise InvalidLevelError(f"Expected two levels 'E,F', got {value!r}")
    validate_levels(*levels)
    validate_model_size(*levels)
    return levels
