#!/usr/bin/env python3
"""Direct evaluation of the expected values pinned in the unit tests.

Every nontrivial constant asserted by the Rust test suite is computed here
from first principles (plain formula evaluation, no shared code with the
solver) and printed with 17 significant digits so the tests can pin the
exact f64 value.

Run:  python3 tools/reference_values.py
"""

import math


def p(label, value):
    print(f"{label:<44s} {value:.17g}")


print("== wave speeds: u -/+ sqrt(g h) ==")
g = 9.81
p("sqrt(9.81)", math.sqrt(g))
p("c1 (h=1, u=2)", 2.0 - math.sqrt(g * 1.0))
p("c2 (h=1, u=2)", 2.0 + math.sqrt(g * 1.0))

print("== HLL flux, still-water and supercritical ==")
# F(U) = (hu, hu^2 + g h^2 / 2)
p("still water f_q = g/2", 0.5 * g * 1.0 * 1.0)
p("supercritical f_q (h=1,u=10)", 1.0 * 10.0 * 10.0 + 0.5 * g)

print("== HLL flux, middle branch (hL=1,uL=0,hR=2,uR=0) ==")
hl, ul, hr, ur = 1.0, 0.0, 2.0, 0.0
c1 = min(ul - math.sqrt(g * hl), ur - math.sqrt(g * hr))
c2 = max(ul + math.sqrt(g * hl), ur + math.sqrt(g * hr))
fl = (hl * ul, hl * ul * ul + 0.5 * g * hl * hl)
fr = (hr * ur, hr * ur * ur + 0.5 * g * hr * hr)
ql, qr = hl * ul, hr * ur
f_h = (c2 * fl[0] - c1 * fr[0]) / (c2 - c1) + c1 * c2 * (hr - hl) / (c2 - c1)
f_q = (c2 * fl[1] - c1 * fr[1]) / (c2 - c1) + c1 * c2 * (qr - ql) / (c2 - c1)
p("c1", c1)
p("c2", c2)
p("f_h", f_h)
p("f_q", f_q)

print("== MUSCL velocity correction (u=3,Du=1,h=2,hm=1.5,hp=2.5,dx=1) ==")
u, du, h, hm, hp, dx = 3.0, 1.0, 2.0, 1.5, 2.5, 1.0
u_m = u - (hp / h) * (dx / 2.0) * du
u_p = u + (hm / h) * (dx / 2.0) * du
p("u_minus", u_m)
p("u_plus", u_p)
p("discharge hm*um + hp*up", hm * u_m + hp * u_p)
p("2 h u", 2.0 * h * u)

print("== interface source (g/2)(h_face^2 - h_rec^2) ==")
p("(1, 0.5)", 0.5 * g * (1.0 - 0.25))
p("(0.2, 0)", 0.5 * g * (0.04 - 0.0))

print("== centered source -g (hm+hp)/2 (zp - zm) ==")
p("(h=1,1; z=0,0.1)", -g * (1.0 + 1.0) / 2.0 * (0.1 - 0.0))

print("== semi-implicit friction ==")
# Darcy-Weisbach: q_new = q* / (1 + dt (f/8) |q_n| / (h_n h_new))
f = 0.26
p("1D (h=1,q=1,f=0.26,dt=1)", 1.0 / (1.0 + 1.0 * (f / 8.0) * 1.0 / (1.0 * 1.0)))
qx, qy = 3.0, 4.0
div = 1.0 + 1.0 * (f / 8.0) * math.hypot(qx, qy) / (1.0 * 1.0)
p("2D divisor", div)
p("2D qx_new", qx / div)
p("2D qy_new", qy / div)

print("== Green-Ampt capacity ==")
ks, hf, dtheta = 4.4e-6, 0.06, 0.12
v_inf, h_sur = 1.2e-3, 0.0
zf = v_inf / dtheta
p("Z_f", zf)
p("I_C (h_sur=0)", ks * (1.0 + (hf - h_sur) / zf))
p("I_C (h_sur=0.01)", ks * (1.0 + (hf - 0.01) / zf))
p("rain 70 mm/h in m/s", 70.0 / 1000.0 / 3600.0)

print("== CFL dt ==")
# dt = n_cfl * dx / max(|u| + sqrt(g h))
p("dt (u=1,h=1,dx=0.1,n=0.5)", 0.5 * 0.1 / (1.0 + math.sqrt(g * 1.0)))

print("== Heun on dU/dt = -U, dt=0.25, U0=2 ==")
u0, dt = 2.0, 0.25
u1 = u0 + dt * (-u0)
u2 = u1 + dt * (-u1)
p("heun result", (u0 + u2) / 2.0)
p("closed form U0(1-dt+dt^2/2)", u0 * (1.0 - dt + dt * dt / 2.0))

print("== Ritter dam break (h_left=1, x0=0, g=9.81) ==")
hl = 1.0
c0 = math.sqrt(g * hl)
p("c0", c0)
p("h at dam (4 h_l / 9)", 4.0 * hl / 9.0)
p("u at dam (2 c0 / 3)", 2.0 * c0 / 3.0)
# a point inside the fan: x = 1, t = 1
x, t = 1.0, 1.0
p("fan h(x=1,t=1)", (2.0 * c0 - x / t) ** 2 / (9.0 * g))
p("fan u(x=1,t=1)", 2.0 / 3.0 * (x / t + c0))

print("== manufactured steady, normal-depth slope ==")
# uniform flow h'=0: z' = -f q0^2 / (8 g h^3)
q0, hn = 0.5, 1.0
p("z' (q0=0.5,h=1,f=0.26)", -f * q0 * q0 / (8.0 * g * hn ** 3))

print("== total water volume ramp ==")
# h = 0.0,0.1,...,0.9 on 10x1 grid, dx=dy=1
p("ramp volume", sum(i * 0.1 for i in range(10)))
