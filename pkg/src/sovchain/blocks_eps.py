"""Local-operator index tuples for m-site elementary blocks.

An m-site block is labelled by eps = (eps_1, ..., eps_2m) over {1,2}: site j
carries the elementary matrix E^{eps_{2j-1}, eps_{2j}}.  Derived data:

    alpha_minus = {j : eps_{2j-1} = 1},  #alpha_minus = s,
    alpha_plus  = {j : eps_{2j}   = 2},  #alpha_plus  = s',

the sets driving both the finite-size multiple sums and the thermodynamic
selection rule (blocks survive the limit only when s + s' = m).
"""
from dataclasses import dataclass


@dataclass(frozen=True)
class EpsTuple:
    eps: tuple

    def __post_init__(self):
        eps = tuple(int(e) for e in self.eps)
        if len(eps) == 0 or len(eps) % 2:
            raise ValueError("eps must have even positive length")
        if any(e not in (1, 2) for e in eps):
            raise ValueError("eps entries must be 1 or 2")
        object.__setattr__(self, "eps", eps)

    @classmethod
    def coerce(cls, value):
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            return cls(tuple(int(ch) for ch in value))
        return cls(tuple(value))

    @property
    def m(self):
        return len(self.eps) // 2

    @property
    def alpha_minus(self):
        """1-based sites j with eps_{2j-1} = 1."""
        return tuple(j for j in range(1, self.m + 1) if self.eps[2 * j - 2] == 1)

    @property
    def alpha_plus(self):
        """1-based sites j with eps_{2j} = 2."""
        return tuple(j for j in range(1, self.m + 1) if self.eps[2 * j - 1] == 2)

    @property
    def s(self):
        return len(self.alpha_minus)

    @property
    def s_prime(self):
        return len(self.alpha_plus)

    @property
    def m_eps(self):
        """sum_j (2 - eps_j)."""
        return sum(2 - e for e in self.eps)

    def complement(self):
        """3 - eps, the global spin flip of the block label."""
        return EpsTuple(tuple(3 - e for e in self.eps))

    def site_pair(self, j):
        """(eps_{2j-1}, eps_{2j}) for 1-based site j."""
        return (self.eps[2 * j - 2], self.eps[2 * j - 1])

    def as_string(self):
        return "".join(str(e) for e in self.eps)
