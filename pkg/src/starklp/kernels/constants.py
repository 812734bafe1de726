import math

SQRT_PI = math.sqrt(math.pi)
INV_SQRT_PI = 1.0 / SQRT_PI
TWO_OVER_SQRT_PI = 2.0 / SQRT_PI

# Faddeeva regions in |z| for Im z >= 0; locked by tests/test_cerf.py
SERIES_RADIUS = 2.0
TRAP_RADIUS = 7.0
# trapezoid step: truncation error ~ exp(-pi^2 / h^2) ~ 7e-18
TRAP_H = 0.5
TRAP_TERMS = 16
CF_DEPTH = 32
SERIES_TERMS = 72
