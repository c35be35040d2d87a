#!/usr/bin/env python3
"""Find the provider's best (K, M, mu, sigma) by exhaustive search.

With a one-MU budget and a strong social reward the money is irrelevant:
the equilibrium fills the top-K list (lightest consumers switch for the
reward alone) and the expected switcher count equals K.
"""
import numpy as np

from greenstream import PopulationConfig, StrategyGrid, generate, stackelberg_search

pop = generate(PopulationConfig(seed=1))
grid = StrategyGrid(budget=1.0, h=1000.0)
res = stackelberg_search(pop, grid, base_seed=1)

print(f"grid: K,M in {grid.k_values}, mu in {grid.mu_values}, "
      f"sigma in {grid.sigma_values}, budget {grid.budget} MU, H={grid.h}")
print(f"evaluated {len(res.sweep)} strategy points\n")
print(f"equilibrium: K*={res.k_star} M*={res.m_star} "
      f"mu*={res.mu_star} sigma*={res.sigma_star}")
m = res.metrics
print(f"  energy reduction {m.expected_energy_reduction / 1000:.1f} kW, "
      f"traffic {m.traffic_reduction_pct:.1f}%, "
      f"switchers {m.expected_switchers:.0f}, spend {m.expected_spend:.2f} MU")

moved = res.per_user_bitrates < pop.x_h
print(f"\nbitrate shifts: {moved.sum()} users move, "
      f"mean {pop.x_h[moved].mean():.0f} -> {res.per_user_bitrates[moved].mean():.0f} kbps")
top5 = sorted(res.sweep, key=lambda r: -r["energy_w"])[:5]
print("\ntop five strategy points by expected energy reduction:")
for row in top5:
    print(f"  K={row['k']:<4} M={row['m']:<4} mu={row['mu']:<4} sigma={row['sigma']:<4} "
          f"-> {row['energy_w'] / 1000:7.1f} kW, spend {row['spend']:.2f} MU")
