"""Independent Riemann-sum oracle for the classical Fisher information.

Uses the closed-form three-outcome densities directly (no half-angle rewriting,
no adaptive quadrature) on a uniform grid of 10^6 samples over +-8*sqrt(2)*sigma_k.
Prints the frozen values used by the C++ tests.
"""
import numpy as np

SIGMA_K = 0.029e6   # 1/m
D = 0.335           # m


def fisher(dtheta, gamma, nu, sigma_k=SIGMA_K, d=D, n=1_000_000):
    half = 8.0 * np.sqrt(2.0) * sigma_k
    dk = np.linspace(-half, half, n)
    h = dk[1] - dk[0]
    c = np.exp(-dk**2 / (4 * sigma_k**2)) / np.sqrt(4 * np.pi * sigma_k**2)
    x = dk * dtheta * d
    p1 = 0.5 * (1 - gamma) * (1 + 3 * gamma) * c + 0.5 * (1 - gamma)**2 * c * nu * np.cos(x)
    p2 = 0.5 * (1 - gamma)**2 * c * (1 - nu * np.cos(x))
    dp = 0.5 * (1 - gamma)**2 * c * nu * np.sin(x) * dk * d
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.where(p1 > 0, dp**2 / p1, 0.0)
        t2 = np.where(p2 > 0, dp**2 / p2, 0.0)
    return float(np.sum(t1 + t2) * h)


def working_point(gamma, nu, lo, hi):
    grid = np.linspace(lo, hi, 400)
    f = np.array([fisher(t, gamma, nu, n=200_000) for t in grid])
    i = int(np.argmax(f))
    a = grid[max(i - 2, 0)]
    b = grid[min(i + 2, len(grid) - 1)]
    fine = np.arange(a, b, 1e-8)  # 1e-5 mrad spacing
    ff = np.array([fisher(t, gamma, nu) for t in fine])
    j = int(np.argmax(ff))
    return fine[j], ff[j]


if __name__ == "__main__":
    print("F(gamma=0.5, nu=0.85, 1.01 mrad) =", repr(fisher(1.01e-3, 0.5, 0.85)))
    print("F(ideal, 1.01 mrad) =", repr(fisher(1.01e-3, 0.0, 1.0)), "QFI", 2 * SIGMA_K**2 * D**2)
    for g, v in [(0.1, 0.85), (0.0, 0.85), (0.3, 0.85), (0.3, 1.0)]:
        grid = np.linspace(0.1e-3, 2.0e-3, 40)
        print(g, v, [round(fisher(t, g, v, n=100_000) / 1e8, 4) for t in grid])
    t, f = working_point(0.1, 0.85, 0.1e-3, 2.0e-3)
    print("working point gamma=0.1 nu=0.85:", repr(t), repr(f))
