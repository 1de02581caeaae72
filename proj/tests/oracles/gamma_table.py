import mpmath as mp
mp.mp.dps=50
import random
random.seed(20261014)
pts=[mp.mpc(1,1),mp.mpc(0.5,0),mp.mpc(3,0),mp.mpc(-0.5,0),mp.mpc(-19.7,0.3),mp.mpc(19.5,-49.0),mp.mpc(-10.25,40.0),mp.mpc(0.1,-0.2),mp.mpc(7.3,12.1),mp.mpc(-3.5,-2.5)]
while len(pts)<30:
    x=round(random.uniform(-20,20),3); y=round(random.uniform(-50,50),3)
    if abs(y)<1e-3 and abs(x-round(x))<1e-3: continue
    pts.append(mp.mpc(x,y))
for z in pts:
    g=mp.gamma(z)
    print("    {%s, %s, %s, %s}," % (mp.nstr(z.real,17), mp.nstr(z.imag,17), mp.nstr(g.real,20,min_fixed=-mp.inf,max_fixed=mp.inf) if False else mp.nstr(g.real,20), mp.nstr(g.imag,20)))
