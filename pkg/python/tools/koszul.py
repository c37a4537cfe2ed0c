import json
import os
from typing import Any

from python.helpers import files
from python.helpers.errors import NotFiniteError, PrecisionExhaustedError
from python.helpers.lambda_mod import (
    CohomologyGroup,
    ModulePresentation,
    SequenceFlavor,
    adjoint_E,
    exact_sequence_check,
    koszul_cohomology_all,
    nu_prime_sequence,
    nu_sequence,
    omega_prime_sequence,
    omega_sequence,
    pseudo_null_test,
)
from python.helpers.print_style import PrintStyle
from python.helpers.tool import Tool, Response


def group_report(group: CohomologyGroup) -> dict[str, Any]:
    return {
        "order": str(group.order),
        "rank": group.rank,
        "invariant_factors": [str(d) for d in group.invariant_factors()],
    }


def level_report(X: ModulePresentation, n: int, flavor: SequenceFlavor) -> dict[str, Any]:
    full, primed = (
        (omega_sequence, omega_prime_sequence)
        if flavor is SequenceFlavor.OMEGA
        else (nu_sequence, nu_prime_sequence)
    )
    x_n = full(X.algebra, n)
    x_prime = primed(X.algebra, n)
    report: dict[str, Any] = {"level": n}
    try:
        report["x"] = {str(i): group_report(g) for i, g in koszul_cohomology_all(x_n, X).items()}
        report["x_prime"] = {
            str(i): group_report(g) for i, g in koszul_cohomology_all(x_prime, X).items()
        }
        checks = []
        for i in range(len(x_n) + 1):
            check = exact_sequence_check(x_n, x_prime, X, i)
            checks.append(
                {"i": i, "left": check.left, "middle": check.middle, "right": check.right, "ok": check.ok}
            )
            if not check.ok:
                PrintStyle.error(f"level {n}, degree {i}: exact sequence cardinalities disagree")
        report["exact_sequence"] = checks
        report["status"] = "certified"
    except PrecisionExhaustedError as e:
        PrintStyle.warning(f"level {n}: {e}")
        report["status"] = "indeterminate"
        report["reason"] = str(e)
    return report


class Koszul(Tool):

    async def execute(self, **kwargs) -> Response:
        X = ModulePresentation.from_json(files.read_file(os.path.abspath(self.args["input_file"])))
        flavor = SequenceFlavor(self.args.get("flavor", "omega"))
        first, last = self.config.koszul_level, self.config.koszul_max_level

        report: dict[str, Any] = {
            "p": X.algebra.p,
            "precision": X.algebra.N,
            "r": X.algebra.r,
            "degree_cap": X.algebra.D,
            "generators": X.generators,
            "flavor": flavor.value,
            "module_invariant_factors": [str(X.algebra.p**e) for e in X.invariants()],
            "levels": [level_report(X, n, flavor) for n in range(first, last + 1)],
            "pseudo_null": pseudo_null_test(X).value,
        }

        try:
            estimate = adjoint_E(X, first, max(last, first + 2), flavor)
            report["adjoint"] = {
                "status": estimate.status.value,
                "level": estimate.level,
                "group": group_report(estimate.group) if estimate.group else None,
            }
        except NotFiniteError as e:
            PrintStyle.warning(str(e))
            report["adjoint"] = {"status": "NOT_FINITE", "level": None, "group": None}

        return Response(message=json.dumps(report, indent=4))
