"""
Built-in example systems, coverings and representations, in file format.

The same texts ship as files under ``systems/``.
"""

from __future__ import annotations

BURGERS = """\
# Burgers equation
independent = x, t
dependent = u
equation = u_t = u_xx + u*u_x
"""

KDV = """\
# Korteweg-de Vries equation
independent = x, t
dependent = u
equation = u_t = u*u_x + u_xxx
"""

HEAT = """\
# linear heat equation
independent = x, t
dependent = u
equation = u_t = u_xx
"""

KDV_POTENTIAL = """\
# potential covering of KdV: w_x = u, w_t = u_xx + u^2/2
independent = x, t
dependent = u
equation = u_t = u*u_x + u_xxx
fiber = w
V_x[w] = u
V_t[w] = u_xx + 1/2*u^2
"""

COLE_HOPF = """\
# Cole-Hopf covering of Burgers: h_x = h*v/2, h_t = h*(v^2/4 + v_x/2)
independent = x, t
dependent = v
equation = v_t = v_xx + v*v_x
fiber = h
V_x[h] = h*v/2
V_t[h] = h*v^2/4 + h*v_x/2
"""

WE_ABELIAN = """\
# one fiber coordinate, B = d/dw, A = C = D = 0
fiber = w
B[w] = 1
"""

SYSTEMS = {"burgers": BURGERS, "kdv": KDV, "heat": HEAT}
COVERINGS = {"kdv-potential": KDV_POTENTIAL, "cole-hopf": COLE_HOPF}
REPRESENTATIONS = {"we-abelian": WE_ABELIAN}
