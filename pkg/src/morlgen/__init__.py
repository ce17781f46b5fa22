"""Generalization evaluation toolkit for multi-objective RL agents.

Submodules:
    fronts   - Pareto dominance, hypervolume, NHGR/EUM/EUGR metrics
    stats    - seeded streams, simplex sampling, IQM, optimality gap
    momdp    - environment contract and discounted vector rollout
    lavagrid - the deterministic lava-and-goals gridworld domain
    oracle   - exact optimal fronts by backward induction + brute force
    agents   - tabular scalarized Q-learning baselines and archives
    harness  - end-to-end evaluation protocol and reports
    cli      - reproducible command-line pipeline
"""

__version__ = "0.1.0"
