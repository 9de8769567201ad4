"""Independent reference values for the hand-checkable examples.

Run with: python3 tests/oracle/derived_values.py
Every number printed here is frozen into tests/test_examples.cpp.
"""
from fractions import Fraction as Fr
import itertools
import math

from mpmath import mp, mpf, log10

mp.dps = 40


def show(label, value):
    if isinstance(value, Fr):
        value = mpf(value.numerator) / value.denominator
    print(f"{label:48s} {mp.nstr(mpf(value), 17)}")


# energy
k, h = mpf("1e-27"), mpf(1000)
show("E_loc(F=1e9,l=1e6)", k * h * mpf(1e9) ** 2 * mpf(1e6))
show("E_loc(F=0.5e9,l=1e6)", k * h * mpf(0.5e9) ** 2 * mpf(1e6))
show("t_up(Ru=2e6,q=1e5)", mpf(1e5) / mpf(2e6))
show("t_down(Rd=1e6,r=0.2,q=1e5)", mpf(1e5) * mpf("0.2") / mpf(1e6))
show("E_u(q=1e5)", mpf("0.1") * mpf(1e5) / mpf(1e6))
show("E_d(q=1e5)", 1 * mpf(1e5) * mpf("0.2") / mpf(1e6))
show("E_h(0.01,1000,0.2,0.9)", mpf("0.01") * 1000 * mpf("0.2") * mpf("0.9"))
show("E_h(0.02,500,0.2,1.0)", mpf("0.02") * 500 * mpf("0.2") * 1)
show("battery(1.0,1.8,0.3,5)", min(max(mpf(1) + mpf("1.8") - mpf("0.3"), 0), 5))
E_h = mpf("1.8")
l_c = E_h / (k * h * mpf(1e9) ** 2)
B = mpf("0.1") / mpf(1e6) + mpf("0.2") * 1 / mpf(1e6)
show("l_c", l_c)
show("B", B)
show("l_m", E_h / B)
S = k * h * mpf(1e9) ** 2
q_opt = (S * mpf(3e6) - E_h) / (S - B)
show("q_opt(l=3e6)", q_opt)
# residual of the balance at l = 2 l_c
l2 = 2 * l_c
q2 = (S * l2 - E_h) / (S - B)
show("balance residual at 2 l_c", S * (l2 - q2) + B * q2 - E_h)

# pricing
show("t_p(1e6,1e9)", h * mpf(1e6) / mpf(1e9))
show("t_p(1e6,2e9)", h * mpf(1e6) / mpf(2e9))
show("W_ddps(q=1e6,F=1e9,Ft=6e9,d=1)", h * mpf(1e6) / mpf(6e9) * log10(mpf(1e9) + 1))
show("unit_ddps(F=1e9,Ft=6e9,d=1)", mpf(1e9) / mpf(6e9) * log10(mpf(1e9) + 1))
show("differentiated(F_loc=1e9,t=1)", 1 / mpf(1e9))
show("linear(a=0,b=0.5,t=2)", (0 + mpf("0.5")) * 2)
show("linear(a=2,b=0,x=0.5,t=1)", (2 * mpf("0.5") + 0) * 1)
show("nonlinear(a=1,b=0,x=0.5,t=1)", (mpf("0.5") ** 2) * 1)


def uniform_bruteforce(local_cpus, requested, capacity):
    best = None
    for mu in sorted({Fr(1, f) for f in local_cpus}):
        users = [i for i, f in enumerate(local_cpus) if Fr(1, f) >= mu]
        if sum(requested[i] for i in users) >= capacity:
            continue
        key = (mu * len(users), len(users))
        if best is None or key > best[0]:
            best = (key, mu, users)
    return best


b = uniform_bruteforce([10**9, 2 * 10**9], [1, 1], 10**12)
print(f"{'uniform mu* (two users)':48s} 1/{int(1 / b[1])} users={b[2]}")

# offload
den = mpf(1) - mpf("0.4286") - mpf(1e5) / mpf(1e6) - mpf(1e5) * mpf("0.2") / mpf(1e6)
show("required_capacity denominator", den)
show("required_capacity", h * mpf(1e5) / den)

# scheduler
surplus, qs = mpf(1e9), [mpf(2e6), mpf(3e6), mpf(5e6)]
for i, q in enumerate(qs):
    show(f"dF[{i}]", surplus * q / sum(qs))
show("penalty(0.5,[1,0.5])", mpf("0.5") * (1 + mpf("0.5")))
show("utility(10,0.75)", 10 - mpf("0.75"))

# queue
show("mm1(0.3,1)", (mpf("0.3") / 1) / (1 - mpf("0.3")))
show("mm1(0.5,2)", (mpf("0.5") / 4) / (1 - mpf("0.25")))
t_ave = (mpf("0.5") + mpf("0.5") + 1) / 3
show("t_ave", t_ave)
show("mu", 3 / t_ave)
for n, kk in [(4, 2), (6, 2)]:
    show(f"t1 N={n} K={kk}", Fr(1 * 1, 1) / Fr(1, n))
    show(f"t2 N={n} K={kk}", Fr(kk + n, 2))
show("poisson 3 sigma at 1e6", 3 * mp.sqrt(mpf("0.3") / mpf(1e6)))

# batch service simulation for t2: K-sized groups, each user holds F/K
def fcfs_batches(n, kk, hh, L, F):
    t, total = Fr(0), Fr(0)
    for _ in range(n // kk):
        t += Fr(hh * L) / (Fr(F) / kk)
        total += t * kk
    return total / n


ok = all(
    fcfs_batches(n, kk, 1, 1, 1) == Fr(kk + n, 2)
    for n in range(1, 65) for kk in range(1, n + 1) if n % kk == 0
)
print(f"{'exact batch simulation matches t2 for N<=64':48s} {ok}")
