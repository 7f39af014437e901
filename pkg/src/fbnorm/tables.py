"""Published reference values for Bingham normalizing constants.

Real Bingham tables list ``theta = base + (kappa,)`` (four-dimensional) and
``base + (kappa, kappa)`` (five-dimensional).  Complex Bingham tables list
``base + (kappa,)`` in complex coordinates; the real equivalent repeats every
entry.  ``hg`` (holonomic gradient) and ``ce`` values agree to all printed
digits, ``ex`` is the closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

KAPPAS = (5, 10, 30, 50, 100, 200)

# kappa -> (hg/ce four-dim, hg/ce five-dim)
TABLE1 = {
    5: (4.238950, 3.372017),
    10: (2.985576, 1.689355),
    30: (1.711919, 0.556123),
    50: (1.323994, 0.332661),
    100: (0.935094, 0.165940),
    200: (0.660814, 0.082871),
}
TABLE3 = {
    5: (1.273161, 1.044072),
    10: (0.883394, 0.505223),
    30: (0.503213, 0.163901),
    50: (0.388775, 0.097828),
    100: (0.274375, 0.048725),
    200: (0.193826, 0.024316),
}
# kappa -> ex/hg/ce (identical to printed precision)
TABLE2 = {5: 5.936835, 10: 3.425468, 30: 1.246421, 50: 0.760180, 100: 0.384675, 200: 0.193477}
TABLE4 = {5: 0.921726, 10: 0.506341, 30: 0.177495, 50: 0.107458, 100: 0.054081, 200: 0.027127}


@dataclass(frozen=True)
class Fixture:
    name: str
    theta: tuple
    expected: float
    columns: tuple
    complex_theta: tuple = ()


def fixtures():
    out = []
    for label, table, base in (("table1", TABLE1, (0, 1, 2)), ("table3", TABLE3, (0, 1, 22))):
        for kappa in KAPPAS:
            four, five = table[kappa]
            out.append(Fixture(f"{label}/4d/kappa={kappa}", base + (kappa,), four, ("hg", "ce")))
            out.append(Fixture(f"{label}/5d/kappa={kappa}", base + (kappa, kappa), five, ("hg", "ce")))
    for label, table, base in (("table2", TABLE2, (0, 1, 2)), ("table4", TABLE4, (0, 1, 22))):
        for kappa in KAPPAS:
            theta_c = base + (kappa,)
            real = tuple(v for v in theta_c for _ in range(2))
            out.append(Fixture(f"{label}/kappa={kappa}", real, table[kappa], ("ex", "hg", "ce"), theta_c))
    return out
