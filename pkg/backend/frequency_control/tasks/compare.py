"""
Compare Task
Runs a scenario under several controllers and returns the comparison table.
"""

from pathlib import Path

import pandas as pd

from backend.frequency_control.harness.compare import compare_controllers, parse_controllers
from backend.frequency_control.harness.scenarios import load_scenario
from backend.shared.utils.common import domain_error_payload, error_payload, require, success_payload, to_builtin


def run(params: dict, file_bytes: bytes | None = None) -> tuple[dict, int]:
    """
    Compare controllers on one scenario.

    Args:
        params: Dictionary containing scenario, controllers and optional workers, seed, dt, horizon, out
        file_bytes: Optional file data (not used in this task)

    Returns:
        Tuple of (response_dict, status_code)
    """
    service, subtask = "grid", "compare"

    try:
        require(params, ["scenario", "controllers"])
        controllers = params["controllers"]
        if isinstance(controllers, str):
            controllers = [controllers]
        if not controllers:
            raise ValueError("controllers must name at least one preset or controller file")
        overrides = {key: params.get(key) for key in ("seed", "dt", "horizon", "out")}
        base = load_scenario(params["scenario"], overrides)
        variants = parse_controllers(list(controllers), base)
        comparison = compare_controllers(base, variants, workers=params.get("workers"), write_outputs=bool(params.get("out")))

        table = comparison.table
        if params.get("out"):
            out = Path(params["out"])
            out.mkdir(parents=True, exist_ok=True)
            table.to_csv(out / f"{base.id}-comparison.csv", index=False, float_format="%.17g", lineterminator="\n")

        failed = table["error"].notna()
        insights = [f"{int((~failed).sum())} of {len(table)} controllers ran to completion"]
        for _, row in table[~failed].iterrows():
            if pd.isna(row["settling_time"]):
                insights.append(f"{row['label']} did not settle")

        data = {
            "scenario": base.id,
            "rows": to_builtin(table.astype(object).where(table.notna(), None).to_dict(orient="records")),
            "table_text": table.to_string(index=False),
        }
        return success_payload(service, subtask, params, data, insights), 200

    except ValueError as e:
        return domain_error_payload(service, subtask, e)
    except Exception as e:
        return error_payload(service, subtask, f"Internal error: {str(e)}", 500)
