# Independent symbolic oracles used to freeze expected values in the C++ tests.
import sympy as sp
from fractions import Fraction as F

# optimal alpha for the p-power shrinker, evaluated term by term
def alpha_opt(s, p, n, m):
    s = [sp.nsimplify(v) for v in s]
    num = (n - m + p - 1) * sum(v**(p - 2) for v in s)
    num += 2 * sum((s[i]**p - s[j]**p) / (s[i]**2 - s[j]**2)
                   for i in range(m) for j in range(i + 1, m))
    den = sum(v**(2 * p - 2) for v in s)
    return sp.nsimplify(num / den)

a = alpha_opt([3, 2, 1], 1, 5, 3)
print("alpha_opt(p=1,n=5,m=3,s=(3,2,1)) =", a, "=", sp.N(a, 20))

# unbiased risk estimate, differentiating phi symbolically
def sure(phi_fn, svals, n, m):
    S = sp.symbols("s1:%d" % (m + 1), positive=True)
    phis = [phi_fn(S, i, n, m) for i in range(m)]
    expr = n * m
    for i in range(m):
        expr += S[i]**2 * phis[i]**2 - 2 * (n - m + 1) * phis[i] - 2 * S[i] * sp.diff(phis[i], S[i])
    for i in range(m):
        for j in range(i + 1, m):
            expr -= 4 * (S[i]**2 * phis[i] - S[j]**2 * phis[j]) / (S[i]**2 - S[j]**2)
    sub = {S[i]: sp.nsimplify(svals[i]) for i in range(m)}
    return sp.nsimplify(expr.subs(sub))

def nns_phi(S, i, n, m):
    alpha = n * m - sp.Rational(m * (m + 1), 2) - 1
    return alpha * S[i]**(-1) / sum(S)

v = sure(nns_phi, [10, 5, 1], 5, 3)
print("sure(nns, n=5,m=3,s=(10,5,1)) =", v, "=", sp.N(v, 20))

def sure_tuned_phi(p):
    def phi(S, i, n, m):
        p_ = sp.nsimplify(p)
        num = (n - m + p_ - 1) * sum(x**(p_ - 2) for x in S)
        num += 2 * sum((S[a]**p_ - S[b]**p_) / (S[a]**2 - S[b]**2)
                       for a in range(m) for b in range(a + 1, m))
        den = sum(x**(2 * p_ - 2) for x in S)
        return num / den * S[i]**(p_ - 2)
    return phi

v = sure(sure_tuned_phi(1), [10, 5, 1], 5, 3)
print("sure(sure:p=1, n=5,m=3,s=(10,5,1)) =", sp.N(v, 20))
v = sure(sure_tuned_phi(0.5), [10, 5, 1], 5, 3)
print("sure(sure:p=0.5, n=5,m=3,s=(10,5,1)) =", sp.N(v, 20))

def mem_phi(S, i, n, m):
    return sp.Integer(n - m - 1) / S[i]**2 + sp.Integer((m - 1) * (m + 2)) / sum(x**2 for x in S)

v = sure(mem_phi, [10, 5, 1], 5, 3)
print("sure(mem, n=5,m=3,s=(10,5,1)) =", sp.N(v, 20))

# closed-form Laplacian of ||M||_p^-alpha via the singular-coordinate formula,
# differentiating f^beta symbolically
def lap(p, alpha, svals, n, m):
    S = sp.symbols("t1:%d" % (m + 1), positive=True)
    p_ = sp.nsimplify(p); a_ = sp.nsimplify(alpha)
    f = sum(x**p_ for x in S)**(-a_ / p_)
    g = [sp.diff(f, x) for x in S]
    h = [sp.diff(f, x, 2) for x in S]
    expr = 0
    for i in range(m):
        for j in range(i + 1, m):
            expr += 2 * (S[i] * g[i] - S[j] * g[j]) / (S[i]**2 - S[j]**2)
    expr += (n - m) * sum(g[i] / S[i] for i in range(m)) + sum(h)
    sub = {S[i]: sp.nsimplify(svals[i]) for i in range(m)}
    return sp.N(expr.subs(sub), 20)

print("lap(p=1, a=8, n=5,m=3, s=(3,2,1)) =", lap(1, 8, [3, 2, 1], 5, 3))
print("lap(p=1.5, a=4, n=5,m=3, s=(3,2,0.5)) =", lap(1.5, 4, [3, 2, 0.5], 5, 3))
print("lap(p=0.5, a=1, n=3,m=2, s=(2,1)) =", lap(0.5, 1, [2, 1], 3, 2))
