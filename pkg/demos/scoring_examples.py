"""
Scoring the three box-opening examples
======================================

Each example pits the principal opening boxes on its own reach against an
agent opening boxes on the agent's reach. Lower scores are better.
"""

from delegation._rational import fmt
from delegation.reports import compare_golden, table_lines
from delegation.scenarios import SCENARIOS, run_scenario

for name in SCENARIOS:
    res = run_scenario(name)
    p, a = res.principal_report, res.agent_report
    print(f"== {name} ({res.convention.value} convention)")
    print("\n".join(table_lines(res)))
    print(f"principal: loss {fmt(p.loss)}, gain {fmt(p.gain)}, score {fmt(p.score)}")
    print(f"agent:     loss {fmt(a.loss)}, gain {fmt(a.gain)}, score {fmt(a.score)}")
    print("verdict:", "delegate" if res.delegate else "do not delegate")
    # Published aggregates that disagree with the per-state table are listed, not hidden.
    for d in res.discrepancies:
        print(f"  published {d.quantity} {fmt(d.stated)}; the table gives {fmt(d.derived)}")
    print("matches the stored table:", not compare_golden(res))
    print()

# Without credit for correctly shut boxes the noisy agent falls further behind.
strict = run_scenario("noisy-expert", "strict")
print("noisy expert under the strict convention:",
      fmt(strict.principal_report.score), "vs", fmt(strict.agent_report.score))
