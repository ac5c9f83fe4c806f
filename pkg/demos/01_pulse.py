"""The probing pulse and its autocorrelation.

The pulse is a modulated Gaussian. Its Fourier transform is concentrated
around the carrier frequency, and its autocorrelation is the effective pulse
seen by cross-correlated data and by the sampling test functions.
"""
import numpy as np

from passive_lsm.pulse import Pulse, autocorrelate, fourier_transform

pulse = Pulse()
t = np.linspace(-2, 8, 11)
print("chi(t) on a coarse grid:")
for ti, v in zip(t, pulse(t)):
    print(f"  t = {ti:5.1f}  chi = {v:+.6f}")

# closed form against adaptive quadrature of the transform
k = np.array([1.0, 2.0, 4.0, 6.0, 8.0])
num = fourier_transform(pulse, k)
ref = pulse.spectrum_exact(k)
print("\n|chi^(k)|, quadrature vs closed form:")
for ki, a, b in zip(k, num, ref):
    print(f"  k = {ki:3.1f}  {abs(a):.6e}  {abs(b):.6e}  diff {abs(a - b):.1e}")

ac = autocorrelate(pulse)
lags = np.array([0.0, 0.5, 1.0, 2.0])
print("\nautocorrelation chi~(t), numerical vs closed form:")
a_, w, t0 = pulse.alpha, pulse.omega, pulse.t0
exact = 0.5 * np.sqrt(np.pi / (2 * a_)) * np.exp(-a_ * lags ** 2 / 2) * (
    np.cos(w * lags) - np.cos(2 * w * t0) * np.exp(-w ** 2 / (2 * a_)))
for s, a, b in zip(lags, ac(lags), exact):
    print(f"  t = {s:3.1f}  {a:+.8f}  {b:+.8f}")
