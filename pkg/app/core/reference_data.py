"""
Reference tables
All published constants are centrally managed here
"""

# Bielliptic actions on E x F.
# "xi" names the complex multiplication acting on F, "basis" the period basis tau_2 of F.
# "kernel" is the generator of the extra translation subgroup, given as
# ((a, b, N) on E, (a, b, N) on F) meaning ((a + b*tau_1)/N, (a + b*tau_2)/N).
BIELLIPTIC_ROWS = {
    1: {"d": 2, "xi": "MINUS_ONE", "basis": "generic", "kernel": None},
    2: {"d": 3, "xi": "OMEGA", "basis": "eisenstein", "kernel": None},
    3: {"d": 4, "xi": "I", "basis": "gauss", "kernel": None},
    4: {"d": 6, "xi": "ZETA", "basis": "eisenstein", "kernel": None},
    5: {"d": 2, "xi": "MINUS_ONE", "basis": "generic", "kernel": ((0, 1, 2), (1, 0, 2))},
    6: {"d": 3, "xi": "OMEGA", "basis": "eisenstein", "kernel": ((0, 1, 3), (1, 1, 3))},
    7: {"d": 4, "xi": "I", "basis": "gauss", "kernel": ((0, 1, 2), (1, 1, 2))},
}

# Freeness conditions as printed for the bielliptic construction
FREENESS_CONDITIONS = {
    2: "(i) d=2: mz not in T",
    3: "(ii) d=3: T=0 and mz not in Z(1+zeta)/3",
    4: "(iii) d=4: T=0 and 2mz not in Z(1+i)/2",
    6: "d=6: no freeness condition (f-component vanishes identically)",
}

LIEBERMAN_CONDITION = "(n+1)a=0 and (n+1)/2*a != 0"

# Possible indices d as tabulated for b2 = 7 (generalized Kummer) and b2 = 23 (Hilbert schemes of K3).
# Stored verbatim; compare with numerics.index_table_diff.
PUBLISHED_INDEX_TABLE = {
    7: sorted(list(range(2, 11)) + [12, 14, 18, 24]),
    23: sorted(list(range(2, 29)) + [30, 32, 33, 34, 36, 38, 40, 42, 44, 46, 50, 54, 66]),
}

# Known hyperkahler families: dim, chi(O_X), b2. "n" marks the Hilbert/Kummer parameter.
FAMILY_TABLE = {
    "hilb_k3": {"dim": "2n", "chi": "n+1", "b2": 23},
    "kummer": {"dim": "2n", "chi": "n+1", "b2": 7},
    "ogrady6": {"n": 3, "dim": 6, "chi": 4, "b2": 8},
    "ogrady10": {"n": 5, "dim": 10, "chi": 6, "b2": 24},
}

# Picard number of the K3 cover of a very general Enriques surface with trivial action on Pic
ENRIQUES_PICARD_NUMBER = 10


def get_row(row: int) -> dict:
    """Get the bielliptic table row, or None"""
    return BIELLIPTIC_ROWS.get(row)
