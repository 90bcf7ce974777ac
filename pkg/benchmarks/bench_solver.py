"""Time the compiled and pure-Python Zielonka backends on random games."""
import argparse
import random
import time

from focusmu import paritygames
from focusmu.paritygames import random_game, solve


def bench(sizes, count, seed):
    rows = []
    for n in sizes:
        rng = random.Random(seed + n)
        games = [random_game(rng, n, max_priority=5) for _ in range(count)]
        times = {}
        for backend in ("python", paritygames.BACKEND):
            t0 = time.perf_counter()
            sols = [solve(g, backend) for g in games]
            times[backend] = time.perf_counter() - t0
            if backend == "python":
                ref = [s.winner for s in sols]
            else:
                assert [s.winner for s in sols] == ref, "backends disagree"
        rows.append((n, times))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 200, 1000, 5000])
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(f"compiled backend available: {paritygames.BACKEND == 'cython'}")
    print(f"{'positions':>9}  {'python s':>9}  {paritygames.BACKEND + ' s':>9}  speedup")
    for n, t in bench(args.sizes, args.count, args.seed):
        fast = t[paritygames.BACKEND]
        print(f"{n:>9}  {t['python']:>9.3f}  {fast:>9.3f}  {t['python'] / fast:>6.1f}x")


if __name__ == "__main__":
    main()
