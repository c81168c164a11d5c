"""Independent NumPy references for the frozen test constants.

Run: python3 tests/oracles/derive.py
Nothing here imports the C++ library.
"""
import numpy as np
from scipy.optimize import minimize_scalar


def neutral1_T(w, t1, t2):
    s = 1j * w
    return (s + 2) / (s * (1 - np.exp(-s * t1) / 16 + np.exp(-s * t2) / 2) + 1)


def dense_peak(f, lo=0.0, hi=60.0, n=600001):
    w = np.linspace(lo, hi, n)
    v = np.abs(f(w))
    i = int(np.argmax(v))
    a, b = w[max(i - 1, 0)], w[min(i + 1, n - 1)]
    r = minimize_scalar(lambda x: -abs(f(x)), bounds=(a, b), method="bounded",
                        options={"xatol": 1e-13})
    return max(v[i], -r.fun), r.x


def neutral1_ta():
    # algebraic row: 0 = -x1 - x2 + x2(t-t1)/16 - x2(t-t2)/2 + w, C V = U^T B = 1
    th = np.linspace(0, 2 * np.pi, 801)
    T1, T2 = np.meshgrid(th, th)
    val = np.abs(1.0 / (1 - np.exp(-1j * T1) / 16 + np.exp(-1j * T2) / 2))
    return val.max(), 1.0 / (1 - 1 / 16 - 1 / 2)


def bench_loop(h, K):
    A = np.array([[2.0, 1], [0, -1]])
    Ad = np.array([[-1.0, 0], [-1, 1]])
    Bw = np.array([[-0.5], [1]])
    Bu = np.array([[3.0], [1]])
    Cz = np.array([[1, -0.5], [0, 0]])
    Dzu = np.array([[0.0], [1]])
    K = np.array([K])

    def T(w):
        w = np.atleast_1d(w)
        out = np.empty(w.shape)
        for k, x in enumerate(w):
            s = 1j * x
            M = s * np.eye(2) - (A + Bu @ K) - Ad * np.exp(-s * h)
            G = (Cz + Dzu @ K) @ np.linalg.solve(M, Bw)
            out[k] = np.linalg.norm(G, 2)
        return out
    return T


def ode_hinf_dense(A, B, C, n=200001):
    w = np.concatenate([[0.0], np.logspace(-3, 3, n)])
    I = np.eye(A.shape[0])
    vals = [np.linalg.norm(C @ np.linalg.solve(1j * x * I - A, B), 2) for x in w[::50]]
    return max(vals)


if __name__ == "__main__":
    for t1 in (1.0, 0.99):
        v, w = dense_peak(lambda x: neutral1_T(x, t1, 2.0))
        print(f"the neutral example tau=({t1},2): plain peak {v:.12f} at omega {w:.6f}")
    g, exact = neutral1_ta()
    print(f"the neutral example T_a: grid {g:.14f}, closed form 16/7 = {exact:.14f}")
    print(f"the neutral example T(0) = {abs(neutral1_T(0.0, 1, 2)):.14f}")
    for h, K in ((0.1, [-17.8065, 9.5915]), (0.5, [-3.5878, 1.5017]), (1.0, [0.1942, -0.4964])):
        T = bench_loop(h, K)
        w = np.linspace(0, 40, 40001)
        v = T(w)
        i = int(np.argmax(v))
        a, b = w[max(i - 1, 0)], w[min(i + 1, len(w) - 1)]
        r = minimize_scalar(lambda x: -T(x)[0], bounds=(a, b), method="bounded",
                            options={"xatol": 1e-12})
        # instability: sign change of the characteristic function on the real axis
        A = np.array([[2.0, 1], [0, -1]]) + np.array([[3.0], [1]]) @ np.array([K])
        Ad = np.array([[-1.0, 0], [-1, 1]])
        s = np.linspace(0, 10, 100001)
        d = np.array([np.linalg.det(x * np.eye(2) - A - Ad * np.exp(-x * h)) for x in s])
        pos_root = bool(np.any(np.sign(d[1:]) != np.sign(d[:-1])))
        print(f"benchmark h={h}: sup sigma1 {max(v[i], -r.fun):.10f} at {r.x:.5f}; "
              f"real root in (0,10]: {pos_root}")
