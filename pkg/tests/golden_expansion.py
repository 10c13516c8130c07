"""Golden terms of the symbolic 9x9 determinant, entered by hand.

Each string lists the black endpoints matched to white vertices i, h, g, f,
e, d, c, b, a in that order, so "FEDCBAIHG" is Fi*Eh*Dg*Cf*Be*Ad*Ic*Hb*Ga.
Keys are exponents (X, Y, Z); every term carries sign +1 except under XYZ.
"""

GOLDEN_TERMS = {
    (3, 0, 0): ["FEDCBAIHG"],
    (0, 3, 0): ["GIHDFEACB"],
    (0, 0, 3): ["IHGFEDCBA"],
    (1, 0, 2): ["FHGCEDIBA", "IEGFBDCHA", "IHDFEACBG"],
    (2, 0, 1): ["FEGCBDIHA", "FHDCEAIBG", "IEDFBACHG"],
    (0, 1, 2): ["GIHFEDCBA", "IHGDFECBA", "IHGFEDACB"],
    (0, 2, 1): ["GIHDFECBA", "GIHFEDACB", "IHGDFEACB"],
    (2, 1, 0): ["GEDCFAIHB", "FEHDBAICG", "FIDCBEAHG"],
    (1, 2, 0): ["GEHDFAICB", "GIDCFEAHB", "FIHDBEACG"],
    (1, 1, 1): [
        "GEHCFDIBA", "GHDCFEIBA", "GEHFBDICA",
        "FHGDBEICA", "GHDFBEICA", "FIGDBECHA",
        "GIDFBECHA", "FHGDEAICB", "GHDFEAICB",
        "FIGCEDAHB", "IEGCFDAHB", "FIGDEACHB",
        "GIDFEACHB", "IEGDFACHB", "FIHCEDABG",
        "IEHCFDABG", "IHDCFEABG", "FIHDEACBG",
        "IEHDFACBG", "IEHFBDACG", "IHDFBEACG",
    ],
}


def labels(code: str) -> frozenset:
    return frozenset(b + w for b, w in zip(code, "ihgfedcba"))
