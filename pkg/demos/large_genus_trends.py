"""
Large-genus trends
==================

The limits themselves are out of reach at computable genus; what can be
checked is that each deviation shrinks as g grows. Volumes come from the
recursion route, which is the fast one for large g.
"""

from wpvol.verify import run_suite

# about 20 seconds: volumes up to genus 12
report = run_suite("ratio_trends", threads=4, g_max=12)

for table in report.tables:
    print(table["name"])
    for g, value in table["rows"]:
        print(f"  g={g:>2}  {value}")
    print()

for case in report.cases:
    print(case.verdict, case.params["quantity"], "|", case.claim)
