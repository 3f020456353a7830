"""Regenerate the frozen reference tables in tests/data with mpmath (50 digits)."""
import csv
import pathlib

import mpmath as mp

mp.mp.dps = 50
OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"


def bessel_table():
    orders = [0, 1, 2, 3, 5, 10, 20]
    xs = [0.0, 1e-3, 0.1, 0.5, 1.0, 2.5, 5.0, 8.0, 11.9, 12.0, 12.1, 14.5, 16.9, 17.0, 17.1, 25.0, 50.0, 100.0, 500.0, 1000.0]
    with open(OUT / "bessel_reference.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["n", "x", "J"])
        for n in orders:
            for x in xs:
                w.writerow([n, repr(x), mp.nstr(mp.besselj(n, x), 20)])


def c1_table():
    # C_1(r, t) = -(1/4 pi) int_{sqrt(t^2-r^2)}^inf J_1(s)/sqrt(r^2+s^2) ds for t > r
    rows = [(0.5, 1.0), (1.0, 2.0), (1.0, 5.0), (2.0, 10.0), (4.0, 4.5), (8.0, 20.0), (3.0, 60.0)]
    with open(OUT / "c1_reference.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["r", "t", "C1"])
        for r, t in rows:
            s0 = mp.sqrt(mp.mpf(t) ** 2 - mp.mpf(r) ** 2)
            g = lambda s: mp.besselj(1, s) / mp.sqrt(r * r + s * s)
            val = -mp.quadosc(g, [s0, mp.inf], omega=1) / (4 * mp.pi)
            w.writerow([r, t, mp.nstr(val, 20)])


if __name__ == "__main__":
    bessel_table()
    c1_table()
