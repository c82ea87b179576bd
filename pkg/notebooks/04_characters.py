"""
Character twists
================

The twisted formulas need a primitive, nonprincipal Dirichlet character.
Tables are given explicitly, here the two primitive characters mod 5.
"""

from indexkernel import identities as ids
from indexkernel.series import MOD5_EVEN, MOD5_ODD, CharacterSpec, parse_character

for chi in (MOD5_EVEN, MOD5_ODD):
    g = chi.gauss_sum
    print(chi.parity, chi.values, "G =", g, "|G|^2 =", abs(g) ** 2)

# the same table in the text format read by --char-file
chi = parse_character("5 odd\n0, 1, 0+1i, 0-1i, -1\n")
print(chi == MOD5_ODD)

rep = ids.verify(ids.make_case("CHAR_ODD", mu=0.0, x=1.0, char=chi))
print(rep.lhs, rep.diagnostics.get("lhs_imag"))
print(rep.rhs, rep.diagnostics.get("rhs_imag"))
print(rep.passed, rep.rel_err)

# tables that are not characters are rejected on construction
try:
    CharacterSpec(5, (0, 1, 1, -1, -1), "odd")
except ValueError as exc:
    print("rejected:", exc)

# the principal character is refused by the twisted formulas
principal = CharacterSpec(5, (0, 1, 1, 1, 1), "even")
try:
    ids.verify(ids.make_case("CHAR_EVEN", char=principal))
except ValueError as exc:
    print("rejected:", exc)
