import numpy as np
from rich.console import Console

from hilbert_exceptional import FiniteOpenSet, kk_construct

console = Console()

F = FiniteOpenSet.from_pairs([(0.0, 0.1)])

with console.status("Building the polynomial", spinner="dots") as status:
    result = kk_construct(F)
    status.update("Checking the partial sums")
    worst = int(np.argmin(result.maxima))

print(f"|F| = {result.alpha:.4f}, lambda = ln(pi/|F|) = {result.lam:.6f}")
print(f"|E| = {result.E.measure:.10f}, pi - |F| = {np.pi - result.alpha:.10f}")
print(f"shrink width = {result.delta:.4e}, m = {result.m}, degree = {result.degree}")
print("==" * 25)

color = "green" if result.passed else "red"
console.print(
    f"min over F of max_m |S_m(x, P)| = [{color}]{result.maxima[worst]:.6f}[/{color}]"
    f" at x = {result.grid[worst]:.6f}, bound = {result.bound:.6f}"
)
console.print(f"nominal bound pi lambda / 3 = {result.nominal_bound:.6f}")
console.print(f"Lipschitz constant = {result.lipschitz:.3e}")
console.print(f"interval margin = {result.interval_margin:.3e}")
