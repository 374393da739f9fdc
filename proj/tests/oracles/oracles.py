"""Independent oracles for the frozen expected values in the C++ tests.

Brute-force enumeration, exact rationals and mpmath quadrature only; nothing
here shares code with the library.
"""
from fractions import Fraction as F
from itertools import product
from math import comb, log
import mpmath as mp

mp.mp.dps = 30


def H(ps):
    tot = mp.mpf(0)
    for p in ps:
        if p > 0:
            x = mp.mpf(p.numerator) / p.denominator if isinstance(p, F) else mp.mpf(p)
            tot -= x * mp.log(x)
    return float(tot)


def conv(p, q):
    out = {}
    for (x, a), (y, b) in product(p.items(), q.items()):
        out[x + y] = out.get(x + y, 0) + a * b
    return out


print("H(1/4,1/2,1/4) =", repr(H([F(1, 4), F(1, 2), F(1, 4)])))
u4 = {i: F(1, 4) for i in range(4)}
print("H(u4*u4) =", repr(H(conv(u4, u4).values())))
print("gauss h =", repr(float(0.5 * mp.log(2 * mp.pi * mp.e))))
print("h(N(1/(2pi e)) + N(1)) =", repr(float(0.5 * mp.log(2 * mp.pi * mp.e + 1))))
print("subadditivity slack =", repr(float(-(0.5 * mp.log(2 * mp.pi * mp.e + 1) - 0.5 * mp.log(2 * mp.pi * mp.e)))))

# density 2x: exact cell masses at resolution k are ((i+1)^2 - i^2) / 4^k
def power_masses(k):
    n = 2 ** k
    return [F((i + 1) ** 2 - i ** 2, n * n) for i in range(n)]

h2x = 0.5 - mp.log(2)
print("h(2x) =", repr(float(h2x)))
for k in (2, 4, 12):
    g = H(power_masses(k)) - k * log(2) - float(h2x)
    print(f"renyi gap 2x closed-form ref k={k}:", repr(g))

# Quantization-commutation gap for iid uniforms, coefficients (1,1): A_k has masses
# (2j+1)/(2M^2) for j<M and mirrored; B_k is discrete triangular.
def quantgap_uniform(k):
    M = 2 ** k
    A = {}
    for j in range(2 * M):
        t = j if j < M else 2 * M - 1 - j
        A[j] = F(2 * t + 1, 2 * M * M)
    um = {i: F(1, M) for i in range(M)}
    B = conv(um, um)
    return H(A.values()) - H(B.values())

for k in (0, 2, 4, 6, 8, 10):
    print(f"quantgap uniform k={k}:", repr(quantgap_uniform(k)))

# Shift TV of uniform [0,1] by 1/8
print("TV(u, u shifted 1/8) =", 1 / 8)

# Pushforward sanity: simplex lattice counts by enumeration
def simplex(n, L):
    return [x for x in product(range(L + 1), repeat=n) if sum(x) <= L]

A = simplex(2, 4)
S = {tuple(a + b for a, b in zip(x, y)) for x in A for y in A}
D = {tuple(a - b for a, b in zip(x, y)) for x in A for y in A}
print("simplex(2,4)", len(A), len(S), len(D), "C(6,2)=", comb(6, 2))
print("simplex(3,2)", len(simplex(3, 2)))
print("ruzsa(2,4) =", repr(log(len(D) / len(A)) / log(len(S) / len(A))))
print("ln6/ln4 =", repr(log(6) / log(4)))

# Brute-force |A-A| for a few (n, L) to cross-check closed forms in tests
for n, L in ((2, 6), (3, 4), (4, 3)):
    A = simplex(n, L)
    D = {tuple(a - b for a, b in zip(x, y)) for x in A for y in A}
    S = {tuple(a + b for a, b in zip(x, y)) for x in A for y in A}
    print(f"brute n={n} L={L}: |A|={len(A)} |A+A|={len(S)} |A-A|={len(D)}")

# tensor (1/4,3/4) k=2
p = [F(1, 4), F(3, 4)]
print("tensor masses", sorted(a * b for a in p for b in p))

# cyclic conv (1/2,1/2,0,0) with itself on Z/4
c = [F(1, 2), F(1, 2), 0, 0]
out = [sum(c[i] * c[(j - i) % 4] for i in range(4)) for j in range(4)]
print("cyclic", out)

# linear combination 2X+3Y uniform bits
print("2X+3Y", conv({0: F(1, 2), 2: F(1, 2)}, {0: F(1, 2), 3: F(1, 2)}))

# Eq (2) on uniform bits
hb = log(2)
hs = H([F(1, 4), F(1, 2), F(1, 4)])
print("sumdiff weighted sum (uniform bits) =", repr(hs - 3 * hs + hb + hb))

# truncated standard normal on [-1,1]: h by quadrature
Z = mp.erf(1 / mp.sqrt(2))
f = lambda x: mp.npdf(x) / Z
htr = mp.quad(lambda x: -f(x) * mp.log(f(x)), [-1, 1])
print("h(truncated N(0,1) on [-1,1]) =", repr(float(htr)))

# density 2x on [0,1]: int-frac mutual information via exact cell joint
def intfrac_2x(k, r):
    m = power_masses(r)
    M = 2 ** (r - k)
    q = {}
    s = {}
    for i, v in enumerate(m):
        q[i // M] = q.get(i // M, 0) + v
        s[i % M] = s.get(i % M, 0) + v
    return H(q.values()) + H(s.values()) - H(m)

for k in (2, 6):
    print(f"intfrac 2x k={k} r=10:", repr(intfrac_2x(k, 10)))

# Fold-and-compare: TV({2^4 X}, uniform) for 2x density at resolution 10
r, k = 10, 4
m = power_masses(r)
M = 2 ** (r - k)
fold = [0] * M
for i, v in enumerate(m):
    fold[i % M] += v
print("frac TV k=4:", repr(float(sum(abs(v - F(1, M)) for v in fold) / 2)))

# Shift TV for 2x density at resolution 8, shift 2^-3 and 2^-6
def shift_tv(r, s):
    m = power_masses(r)
    n = len(m)
    sh = 2 ** (r - s)
    a = {i: v for i, v in enumerate(m)}
    b = {i + sh: v for i, v in enumerate(m)}
    keys = set(a) | set(b)
    return float(sum(abs(a.get(i, 0) - b.get(i, 0)) for i in keys) / 2)

print("shift tv 2x r=8 a=2^-3:", repr(shift_tv(8, 3)), " a=2^-6:", repr(shift_tv(8, 6)))
