"""JSON / CSV writers for reports, grids and tables."""
import csv
import io
import json
import math

import numpy as np


def _clean(obj):
    # NaN/inf are not valid JSON; emit null instead
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def to_json(obj):
    return json.dumps(_clean(obj), indent=2, sort_keys=False) + "\n"


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def to_csv(columns, rows):
    """``rows`` are dicts (keyed by ``columns``) or sequences in column order."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        vals = [r.get(c) for c in columns] if isinstance(r, dict) else list(r)
        w.writerow([_fmt(v) for v in vals])
    return buf.getvalue()


def region_rows(alpha_grid, beta_grid, mask):
    return [{"alpha": float(a), "beta": float(b), "stable": bool(mask[i, j])}
            for i, a in enumerate(alpha_grid) for j, b in enumerate(beta_grid)]


def region_json(alpha_grid, beta_grid, mask, theta):
    return {"theta": int(theta), "alpha_grid": list(map(float, alpha_grid)),
            "beta_grid": list(map(float, beta_grid)),
            "stable": np.asarray(mask, dtype=bool).tolist()}


def sweep_csv(sweep):
    return to_csv(["beta", "optimal_theta", "h2"], sweep.rows)


def param_rows(res):
    rows = []
    for i, a in enumerate(res.alpha_grid):
        for j, b in enumerate(res.beta_grid):
            v = float(res.grid_values[i, j])
            rows.append({"alpha": float(a), "beta": float(b), "h2": v, "stable": not math.isnan(v)})
    return rows


def disagreement_csv(norms):
    """``t,disagreement`` table from :func:`simulate_noise_free` output."""
    return to_csv(["t", "disagreement"], [(t, float(v)) for t, v in enumerate(norms)])
