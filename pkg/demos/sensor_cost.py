"""How much does each sensor cost relative to a solver step, and what does
the ten-step update cadence buy?

Run:  python demos/sensor_cost.py          (one to two minutes)
"""

from gmmshock import driver
from gmmshock.cases import preset_config

cfg = preset_config("bench")
print(f"bench case: {cfg.case} {cfg.nx}x{cfg.ny} order {cfg.order}, "
      f"{cfg.stabilization} stabilization, 20 timed steps after warmup\n")
rows = driver.measure_sensor_cost(cfg, n_steps=20)

print(f"{'sensor':>9} {'cadence':>8} {'sensor s':>10} {'total s':>9} {'fraction':>9}")
for row in rows:
    print(f"{row['sensor']:>9} {row['cadence']:>8d} {row['sensor_seconds']:>10.3f} "
          f"{row['total_seconds']:>9.3f} {row['fraction'] * 100:>8.2f}%")

gmm1 = next(r for r in rows if r["sensor"] == "gmm" and r["cadence"] == 1)
gmm10 = next(r for r in rows if r["sensor"] == "gmm" and r["cadence"] == 10)
print(f"\nupdating the clustering sensor every 10 steps cuts its share "
      f"{gmm1['fraction'] / gmm10['fraction']:.1f}x "
      f"({gmm1['fraction'] * 100:.1f}% -> {gmm10['fraction'] * 100:.1f}%)")
print("the modal and integral sensors are an order of magnitude cheaper per "
      "evaluation,\nbut need per-case threshold tuning")
