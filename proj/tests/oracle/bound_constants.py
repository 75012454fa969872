"""Independent reference values for the bound regression tests.

Optimal and pessimal stable matchings come from sequential deferred
acceptance (cross-checked by brute force on small markets) and every bound
is evaluated with mpmath at 40 digits. Run: python3 bound_constants.py
"""
from itertools import permutations

from mpmath import mp, mpf, exp, log, ceil

mp.dps = 40


def stable(mu, prefs, match):
    n, k = len(mu), len(mu[0])
    holder = {a: i for i, a in enumerate(match)}
    for i in range(n):
        for a in range(k):
            if mu[i][a] <= mu[i][match[i]]:
                continue
            h = holder.get(a)
            if h is None or prefs[a].index(i) < prefs[a].index(h):
                return False
    return True


def agent_proposing(mu, prefs):
    n, k = len(mu), len(mu[0])
    order = [sorted(range(k), key=lambda a: -mu[i][a]) for i in range(n)]
    nxt, holder, free = [0] * n, {}, list(range(n))
    while free:
        i = free.pop()
        a = order[i][nxt[i]]
        nxt[i] += 1
        h = holder.get(a)
        if h is None:
            holder[a] = i
        elif prefs[a].index(i) < prefs[a].index(h):
            holder[a] = i
            free.append(h)
        else:
            free.append(i)
    match = [None] * n
    for a, i in holder.items():
        match[i] = a
    return match


def arm_proposing(mu, prefs):
    n, k = len(mu), len(mu[0])
    nxt, held, free = [0] * k, {}, list(range(k))
    while free:
        a = free.pop()
        if nxt[a] == n:
            continue
        i = prefs[a][nxt[a]]
        nxt[a] += 1
        cur = held.get(i)
        if cur is None:
            held[i] = a
        elif mu[i][a] > mu[i][cur]:
            held[i] = a
            free.append(cur)
        else:
            free.append(a)
    return [held[i] for i in range(n)]


def opt_pess(mu, prefs):
    n, k = len(mu), len(mu[0])
    opt, pess = agent_proposing(mu, prefs), arm_proposing(mu, prefs)
    if k <= 6:
        ms = [m for m in permutations(range(k), n) if stable(mu, prefs, m)]
        assert opt == [max((m[i] for m in ms), key=lambda a: mu[i][a]) for i in range(n)]
        assert pess == [min((m[i] for m in ms), key=lambda a: mu[i][a]) for i in range(n)]
    return opt, pess


def gaps(mu, prefs):
    opt, pess = opt_pess(mu, prefs)
    og = [[mu[i][opt[i]] - mu[i][j] for j in range(len(mu[0]))] for i in range(len(mu))]
    pg = [[mu[i][pess[i]] - mu[i][j] for j in range(len(mu[0]))] for i in range(len(mu))]
    delta = min(g for row in og for g in row if g > 0)
    return opt, og, pg, delta


def etc(mu, prefs, h, n):
    _, og, _, d = gaps(mu, prefs)
    N, K = len(mu), len(mu[0])
    return [h * sum(r) + (n - h * K) * max(r) * N * K * exp(-h * d * d / 4) for r in og]


def rec_h(mu, prefs, n):
    _, _, _, d = gaps(mu, prefs)
    return max(1, int(ceil(4 / d**2 * log(1 + n * d**2 * len(mu) / 4))))


def decent(mu, prefs, H, n):
    opt, og, _, d = gaps(mu, prefs)
    N, K = len(mu), len(mu[0])
    rho = (1 - mpf(1) / K) ** (N - 1)
    fail = 2 * exp(-H * rho**2 / 2) + exp(-H * rho * d**2 / 8)
    return [H * K * mu[i][opt[i]] + (n - H * K) * max(og[i]) * N * K * fail for i in range(N)]


def worst(mu, prefs, n):
    _, _, pg, _ = gaps(mu, prefs)
    N, K = len(mu), len(mu[0])
    d = min(abs(r[a] - r[b]) for r in mu for a in range(K) for b in range(a + 1, K))
    return [max(r) * (6 * N * K * K + 12 * N * K * log(n) / d**2) for r in pg]


def global_bound(mu, prefs, n):
    _, _, pg, _ = gaps(mu, prefs)
    N, K = len(mu), len(mu[0])
    out = []
    for i in range(N):
        r = i + 1
        out.append(5 * r * sum(pg[i][l] for l in range(r, K)) +
                   sum(6 * r * log(n) / pg[i][l] for l in range(r, K)))
    return out


def unique_pairs(mu, prefs, n):
    _, _, pg, _ = gaps(mu, prefs)
    N, K = len(mu), len(mu[0])
    return [5 * sum(pg[i][l] for l in range(K) if l != i) +
            sum(6 * log(n) / pg[i][l] for l in range(K) if l != i) for i in range(N)]


def m(x):
    # exact binary values of the doubles the library sees
    return [[mpf(float(v)) for v in row] for row in x]


GAP_HALF = (m([[0.5, 0], [0, 1]]), [[0, 1], [0, 1]])
GAP_ONE = (m([[1, 0], [0, 1]]), [[0, 1], [0, 1]])
SINGLE = (m([[1, 0]]), [[0], [0]])
THREE = (m([[3, 2, 1], [2, 3, 1], [2.95, 1.95, 3.0]]), [[1, 2, 0], [0, 1, 2], [2, 0, 1]])
GLOBAL4 = (m([[0.4, 0.3, 0.2, 0.1]] * 4), [[0, 1, 2, 3]] * 4)
GLOBAL20 = (m([[0.1 * (20 - j) for j in range(20)]] * 20), [list(range(20))] * 20)
UNIQUE5 = (m([[5 - ((j - i) % 5) for j in range(5)] for i in range(5)]),
           [[(j + d) % 5 for d in range(5)] for j in range(5)])


def show(name, values):
    print(name, "{" + ", ".join(mp.nstr(v, 20) for v in values) + "}")


if __name__ == "__main__":
    show("etc single h=10 n=100", etc(*SINGLE, 10, 100))
    show("etc gap0.5 h=rec n=10000", etc(*GAP_HALF, rec_h(*GAP_HALF, 10000), 10000))
    print("rec_h gap0.5 n=10000", rec_h(*GAP_HALF, 10000))
    print("rec_h three n=100000", rec_h(*THREE, 100000))
    show("etc three h=rec n=100000", etc(*THREE, rec_h(*THREE, 100000), 100000))
    show("decent gap1 H=64 n=10000", decent(*GAP_ONE, 64, 10000))
    show("decent three H=500 n=100000", decent(*THREE, 500, 100000))
    show("worst three n=10000", worst(*THREE, 10000))
    show("worst gap0.5 n=400", worst(*GAP_HALF, 400))
    show("global4 n=1000", global_bound(*GLOBAL4, 1000))
    show("global20 n=20000", global_bound(*GLOBAL20, 20000))
    show("unique5 n=10000", unique_pairs(*UNIQUE5, 10000))
