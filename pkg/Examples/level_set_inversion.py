import math

from rich.console import Console

from hilbert_exceptional import (
    FiniteOpenSet,
    KernelNormalization,
    hilbert_indicator,
    level_set_measure,
    stein_weiss_rhs,
    sublevel_set,
    sum_of_roots,
    verify_bezout,
    verify_roundtrip,
)

console = Console()

F = FiniteOpenSet.from_pairs([(0.0, 1.0), (2.0, 3.0)])
lam = math.log(2.0)

with console.status("Inverting the sublevel set", spinner="dots"):
    config = sublevel_set(F, lam)
    report = verify_roundtrip(config)

print(f"F = {F.to_json()}, lambda = {lam:.6f}, mu = {config.bound.mu:.6f}")
print(f"roots = {[round(c, 12) for c in config.roots]}")
print(f"E = {config.E.to_json()}")
expected = config.bound.measure_ratio * F.measure
print(f"|E| = {config.E.measure:.12f}, expected {expected:.12f}")
print(f"Bezout residual = {verify_bezout(config):.2e}")
print(f"sum of roots = {sum_of_roots(config)}")
print("==" * 25)

# with the bare kernel H1_E >= lambda on F, equal to lambda at the right endpoints
for x in (0.25, 0.5, 1.0, 2.5, 3.0):
    value = hilbert_indicator(config.E, x, KernelNormalization.BARE)
    color = "green" if value >= lam - 1e-9 else "red"
    console.print(f"H1_E({x}) = [{color}]{value:.12f}[/{color}]")
console.print(f"round trip passed: {report.passed}")
print("==" * 25)

for level in (0.1, 0.5, 1.0, 2.0):
    exact = level_set_measure(F, level)
    formula = stein_weiss_rhs(F.measure, level)
    print(
        f"lambda = {level:.1f}: |{{|H1_F| > lambda}}| = {exact:.10f},"
        f" 2|F|/sinh(pi lambda) = {formula:.10f}"
    )
