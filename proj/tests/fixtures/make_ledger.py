"""Hand simulation of a 3-client, 2-round censored federation.

Writes hand_ledger.txt, which the engine test replays. Resources are
unconstrained and outage is off, so only the censoring rule decides who
uploads. Client 2 is censored in round 2.
"""
import numpy as np

LAMBDA = 0.1
ETA = 0.25
K = 2
T0 = 50
N = 3

X = [np.array([[1.0, 0.0], [0.0, 1.0]]),
     np.array([[1.0, 1.0], [2.0, 0.0]]),
     np.array([[0.5, -1.0], [0.2, 0.1]])]
Y = [np.array([1.0, 2.0]), np.array([0.0, 1.0]), np.array([0.3, -0.2])]
D = np.array([len(y) for y in Y], dtype=float)
WEIGHTS = D / D.sum()


def grad(i, w):
    return X[i].T @ (X[i] @ w - Y[i]) / len(Y[i]) + LAMBDA * w


def loss(w):
    return sum(WEIGHTS[i] * (0.5 * np.mean((X[i] @ w - Y[i]) ** 2) + 0.5 * LAMBDA * w @ w)
               for i in range(N))


def simulate(delta):
    w = np.zeros(2)
    copies = [w.copy() for _ in range(N)]
    stale_g = [grad(i, w) for i in range(N)]
    clock = [0] * N
    hist = []
    rounds = []
    for t in (1, 2):
        g = [grad(i, w) for i in range(N)]
        rhs = sum(d * h for d, h in zip(delta, hist))
        lhs = [N * N * ETA * ETA * np.sum((g[i] - stale_g[i]) ** 2) for i in range(N)]
        sched = [lhs[i] >= rhs or clock[i] >= T0 - 1 for i in range(N)]
        for i in range(N):
            if sched[i]:
                copies[i] = w - ETA * g[i]
                stale_g[i] = g[i]
                clock[i] = 0
            else:
                clock[i] = min(clock[i] + 1, T0)
        new_w = sum(WEIGHTS[i] * copies[i] for i in range(N))
        hist = [float(np.sum((new_w - w) ** 2))] + hist[:K - 1]
        w = new_w
        rounds.append(dict(t=t, lhs=lhs, rhs=rhs, sched=sched, w=w.copy(),
                           copies=[c.copy() for c in copies], clock=list(clock), loss=loss(w)))
    return rounds


def main():
    # Pick delta between client 2's and the others' round-2 ratio lhs / |dw|^2.
    probe = simulate([1.0, 0.0])
    ratios = [l / probe[1]["rhs"] for l in probe[1]["lhs"]]
    order = np.argsort(ratios)
    assert order[0] == 2, ratios
    d1 = 0.5 * (ratios[order[0]] + ratios[order[1]])
    delta = [d1, 0.0]
    rounds = simulate(delta)
    assert rounds[1]["sched"] == [True, True, False], rounds[1]["sched"]

    out = ["# generated by make_ledger.py", f"delta {float(d1)!r} 0.0", f"eta {ETA!r}", f"lambda {LAMBDA!r}"]
    for r in rounds:
        out.append(f"round {r['t']}")
        out.append("scheduled " + " ".join(str(int(s)) for s in r["sched"]))
        out.append("model " + " ".join(repr(float(v)) for v in r["w"]))
        for i, c in enumerate(r["copies"]):
            out.append(f"copy {i} " + " ".join(repr(float(v)) for v in c))
        out.append("clock " + " ".join(str(c) for c in r["clock"]))
        out.append(f"loss {float(r['loss'])!r}")
    with open("hand_ledger.txt", "w") as f:
        f.write("\n".join(out) + "\n")


if __name__ == "__main__":
    main()
