def encode_unary(p: int, q: int | None = None) -> str:
    """
    Unary code of an integer or a pair: a^p b^q, or a^|p| c^q when p < 0.

    Without q, p must be non-negative and the word is a^p. A negative p needs
    q > 0, since a^|p| is already the code of (|p|, 0).
    """
    if q is None:
        if p < 0:
            raise ValueError(f"a single value must be non-negative, got {p}")
        return "a" * p
    if q < 0:
        raise ValueError(f"q must be non-negative, got {q}")
    if p < 0 and q == 0:
        raise ValueError(f"({p}, 0) would share its code with ({-p}, 0)")
    return "a" * abs(p) + ("b" if p >= 0 else "c") * q
