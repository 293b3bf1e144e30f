#!/usr/bin/env python3
"""Recompute the closed-form reference values frozen into the C++ tests.

Everything here is evaluated with mpmath at 60 significant digits and printed
to 15 digits, so the float64 constants asserted in tests/ can be checked
against an independent arbitrary-precision source.

Run:  python3 scripts/derived_values.py
"""

import mpmath as mp

mp.mp.dps = 60


def welch(n, p):
    n, p = mp.mpf(n), mp.mpf(p)
    if p <= n:
        return mp.mpf(0)
    return mp.sqrt((p - n) / (n * (p - 1)))


def mu_threshold(p, c_mu):
    return 1 / (c_mu * mp.sqrt(mp.log(p)))


def b_subgaussian(n, p, ratio):
    return mp.sqrt(8 * mp.log(p) / n) * ratio


def subgauss_logp_cap(n, ratio):
    return (mp.mpf(n) / 16) * (1 / (4 * ratio)) ** 4


def d_n_over_logp(n, p):
    return mp.ceil(n / mp.log(p))


def gaussian_mu_bound(n, p):
    lp = mp.log(p)
    return mp.sqrt(15 * lp) / (mp.sqrt(n) - mp.sqrt(12 * lp))


def gaussian_nu_bound(n, p):
    lp = mp.log(p)
    return mp.sqrt(15 * lp) / (n - mp.sqrt(12 * n * lp))


def noise_event_failure_bound(p):
    # 2 / (p * sqrt(2*pi*log p))
    return 2 / (p * mp.sqrt(2 * mp.pi * mp.log(p)))


def show(label, value):
    print(f"{label:48s} {mp.nstr(value, 15)}")


c_mu = 10 * mp.sqrt(2)

print("# Welch lower bounds")
show("welch(500, 2000)", welch(500, 2000))
show("welch(3000, 21345)", welch(3000, 21345))

print("\n# Coherence-property mu thresholds, c_mu = 10*sqrt(2)")
show("c_mu", c_mu)
show("mu_threshold(p=2000)", mu_threshold(2000, c_mu))
show("mu_threshold(p=21345)", mu_threshold(21345, c_mu))

print("\n# Sub-Gaussian screening parameter")
show("b_subgaussian(800, 1000, ratio=1)", b_subgaussian(800, 1000, 1))
show("log(1000)", mp.log(1000))
show("logp cap (n=800, ratio=1)", subgauss_logp_cap(800, 1))

print("\n# Screened-model-size rules")
show("ceil(500 / log 2000)", d_n_over_logp(500, 2000))
show("500 / log 2000", mp.mpf(500) / mp.log(2000))
show("ceil(3000 / log 21345)", d_n_over_logp(3000, 21345))
show("3000 / log 21345", mp.mpf(3000) / mp.log(21345))
show("ceil(sqrt(500))", mp.ceil(mp.sqrt(500)))

print("\n# Gaussian coherence bounds at n=500, p=2000")
show("mu bound", gaussian_mu_bound(500, 2000))
show("nu bound", gaussian_nu_bound(500, 2000))

print("\n# Noise event")
show("failure bound, p=1000", noise_event_failure_bound(1000))
show("failure bound, p=2000", noise_event_failure_bound(2000))
show("2*sqrt(log 2000)", 2 * mp.sqrt(mp.log(2000)))

print("\n# Half-normal shift: mean of |z| + 2")
show("2 + sqrt(2/pi)", 2 + mp.sqrt(2 / mp.pi))

print("\n# Theorem-based d examples (exact rationals)")
show("ceil(sqrt(4)/(0.5 - 2*0.05))", mp.ceil(mp.sqrt(4) / (mp.mpf(1) / 2 - 2 * mp.mpf("0.05"))))
show("ceil(sqrt(4)/(0.5 - 0.1 - 0.1))", mp.ceil(mp.sqrt(4) / (mp.mpf(1) / 2 - mp.mpf("0.1") - mp.mpf("0.1"))))
show("ceil(sqrt(9)/(0.8 - 2*0.1*3))", mp.ceil(mp.sqrt(9) / (mp.mpf("0.8") - 2 * mp.mpf("0.1") * 3)))

print("\n# Coherence-route sparsity cap: mu=0.01, c_mu=10*sqrt(2), log p = 10")
show("mu^-2 / (c_mu^2 log p)", (1 / mp.mpf("0.01") ** 2) / (c_mu**2 * 10))
