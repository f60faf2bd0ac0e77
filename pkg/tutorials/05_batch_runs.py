"""Seeded sweeps from Python, the same engine the command line uses.

Rows come out in a fixed order, so two runs of one config are
byte-identical regardless of the worker count.
"""

from padicount.experiments import ExperimentConfig, execute

config = ExperimentConfig("count", grid={"N": [2**8, 2**10]}, seeds=[0, 1, 2], budget_ops=10**6)
result = execute(config)
print(result.csv)
print("exit code:", result.exit_code)

again = execute(ExperimentConfig("count", grid={"N": [2**8, 2**10]}, seeds=[0, 1, 2], budget_ops=10**6, parallel=2))
print("identical with two workers:", again.csv == result.csv)

# A split that breaks the weight constraints is recorded, not fatal.
bad = execute(ExperimentConfig("dimension", grid={"tau_d": [["3/2"]], "tau_m": [["3"]]}))
print(bad.rows[0]["status"], bad.rows[0]["flags"], "exit", bad.exit_code)
