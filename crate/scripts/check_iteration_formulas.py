"""Independent arithmetic check of the golden iteration counts.

Evaluates both closed-form iteration counts with plain Python floats so the
Rust implementation has an external reference. Run with `python3
scripts/check_iteration_formulas.py`; it exits non-zero on mismatch.
"""
import math
import sys


def general(eps, n, g, l, u_tilde, d):
    if n == 1:
        return 1
    root = math.sqrt(2.0 / eps * g * g * math.log(n) / l + u_tilde / l)
    arg = (l * d * d + 2.0 * g * d) / eps
    if arg <= 1.0:
        return 1
    return math.ceil(1.0 + root * math.log(arg))


def meb(eps_rel, n):
    if n == 1:
        return 1
    root = math.sqrt(1.0 + 18.0 * (1.0 + 20.0 / eps_rel) * math.log(n))
    return math.ceil(1.0 + math.log(1.0 + 4.0 / eps_rel) * root)


CASES = [
    ("meb(1, 2)", meb(1.0, 2), 28),
    ("general(0.1, 2, 1, 2, 2, 1)", general(0.1, 2, 1.0, 2.0, 2.0, 1.0), 12),
    ("meb(1, 1)", meb(1.0, 1), 1),
    ("general(0.1, 1, ...)", general(0.1, 1, 1.0, 2.0, 2.0, 1.0), 1),
]

ok = True
for name, got, want in CASES:
    status = "ok" if got == want else "MISMATCH"
    ok &= got == want
    print(f"{name:32s} = {got:6d} (expected {want}) {status}")

# raw values before rounding, for the record
print("meb(1,2) raw    =", 1.0 + math.log(5.0) * math.sqrt(1.0 + 378.0 * math.log(2.0)))
print("general raw     =", 1.0 + math.sqrt(20.0 * math.log(2.0) / 2.0 + 1.0) * math.log(40.0))
sys.exit(0 if ok else 1)
