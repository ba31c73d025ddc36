"""Configuration constants and tabulated reference data."""

# Single-P1 ket labels: nitrogen projection then electron state (u = up, d = down)
P1_LABELS = ("+u", "+d", "0u", "0d", "-u", "-d")

# Column order of the Rabi truth tables
TRUTH_TABLE_COLUMNS = ("+d", "0d", "-d", "-u", "0u", "+u")

NV_LABELS = ("+1", "0", "-1")

# Working field of the reference measurements (G)
REFERENCE_FIELD = (2.43, 1.42, 45.552)

# Listed RF drive frequencies (MHz) with their expected response bits,
# ordered as TRUTH_TABLE_COLUMNS. Paired listings share one row of bits.
REFERENCE_TRUTH_TABLES = {
    "A": [
        ((27.645, 27.715), "110110"),
        ((238.079,), "100001"),
        ((80.127,), "011000"),
        ((189.902,), "110110"),
        ((189.831,), "110110"),
        ((82.06,), "001100"),
        ((20.532,), "000011"),
    ],
    "B": [
        ((28.441,), "110000"),
        ((239.035,), "100001"),
        ((80.119,), "011000"),
        ((189.114,), "010010"),
        ((81.106,), "001100"),
        ((27.89,), "000110"),
        ((21.48,), "000011"),
    ],
    "C": [
        ((29.281,), "110000"),
        ((240.127,), "100001"),
        ((80.128,), "011100"),
        ((79.952,), "011100"),
        ((188.31,), "010010"),
        ((28.23,), "000110"),
        ((22.535,), "000011"),
    ],
    "D": [
        ((257.994,), "100001"),
        ((86.055,), "011000"),
        ((177.2,), "110110"),
        ((177.125,), "010010"),
        ((47.132,), "001100"),
        ((43.938, 44.013), "110110"),
        ((36.856,), "000011"),
    ],
}

# Observed resonances: tau (us) -> (JT axis, candidate flip-flop state pairs).
# Fixed-nitrogen candidates are listed first.
REFERENCE_FLIP_FLOP_CANDIDATES = {
    11.2: ("B", (("+u", "+d"), ("+d", "0u"))),
    14.0: ("A", (("-u", "-d"), ("0d", "-u"))),
    16.4: ("A", (("0u", "0d"),)),
    18.6: ("D", (("+u", "+d"), ("0u", "+d"))),
    29.0: ("B", (("0u", "0d"),)),
}

# Calculated pseudo-spin frequencies (kHz): tau -> (f at m_s = -1, f at m_s = 0)
REFERENCE_RAMSEY_FREQUENCIES = {
    11.2: (22.378, 22.106),
    14.0: (18.323, 18.114),
    16.4: (15.027, 14.837),
    18.6: (13.856, 13.414),
    29.0: (8.892, 8.591),
}

# Measured dephasing inputs
MEASURED_ELECTRON_T2STAR_US = 94.0
CARBON_NUCLEAR_T2STAR_S = 0.66
PAIR_T2STAR_MS = 44.0

# Field-noise regimes (G): typical and worst-case drift
FIELD_NOISE_TYPICAL = (0.030, 0.030, 0.003)
FIELD_NOISE_WORST = (0.100, 0.100, 0.020)

# Single-site z-field noise equivalents (G) for the pseudo-spin dephasing model
CARBON_EQUIVALENT_FIELD_G = 0.0003
P1_BATH_EQUIVALENT_FIELD_G = 0.0008

# Ordered configuration count for two P1 centers (4 JT x 3 mI x 2 electron)^2
ORDERED_PAIR_CONFIGURATIONS = 576
SINGLE_P1_CONFIGURATIONS = 24
