"""Walk through the exact Pauli-string algebra on a few sites.

Strings are bit-packed (x_mask, z_mask) pairs; products, commutators and
the infinite-temperature inner product all reduce to mask arithmetic.
"""

from lanczos_plateau import (
    OperatorVector,
    PauliString,
    apply_liouvillian,
    commutator_term,
    inner_product,
    multiply,
)

print("== single strings ==")
x0 = PauliString.single("x", 0, 2)
z0 = PauliString.single("z", 0, 2)
prod, k = multiply(x0, z0)
print(f"X_1 * Z_1 = i^{k} * {prod.label()}   (XZ = -iY)")

term = commutator_term(z0, PauliString.from_label("XX"))
print(f"[Z_1, X_1 X_2] = {term[1]} * {term[0].label()}")

print("\n== operator vectors ==")
v = OperatorVector(2, {x0: 0.6, z0: 0.8})
print(f"|0.6 X + 0.8 Z|^2 = {inner_product(v, v).real:.3f}  (orthonormal basis)")

print("\n== Liouvillian action ==")
h = OperatorVector(2, {PauliString.from_label("XX"): 1.0,
                       PauliString.from_label("ZI"): 1.5,
                       PauliString.from_label("IZ"): 1.5})
a = OperatorVector(2, {z0: 1.0})
la = apply_liouvillian(h, a)
print("[H, Z_1] =")
for p, c in la.sorted_items():
    print(f"   {c:+.1f} * {p.label()}")
print(f"Hermitian input -> anti-Hermitian output: {la.is_anti_hermitian()}")

print("\n== Hermiticity alternation under repeated commutators ==")
o = a
for n in range(1, 5):
    o = apply_liouvillian(h, o)
    kind = "anti-Hermitian" if n % 2 else "Hermitian"
    ok = o.is_anti_hermitian(1e-10) if n % 2 else o.is_hermitian(1e-10)
    print(f"  L^{n}[Z_1]: {kind}: {ok}, {len(o)} strings, norm {o.norm():.3f}")
