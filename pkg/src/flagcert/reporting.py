"""Plain-text rendering of operation results.

Human-readable lines are free-form; machine-readable lines start with
``@<kind>`` and carry space-separated exact values so they can be grepped
out of the output independently of the narration.
"""

from flagcert.formatting import MACHINE_PREFIX


def _machine(kind: str, *fields) -> str:
    return " ".join([f"{MACHINE_PREFIX}{kind}", *(str(f) for f in fields)])


def _value(entry: dict) -> str:
    """``num/den`` with the decimal annotation when present."""
    if "approx" in entry:
        return f"{entry['exact']} ({entry['approx']})"
    return entry["exact"]


def _ref(ref: int | None) -> str:
    return f" [ref H{ref}]" if ref else ""


def render_hosts(data: dict) -> list[str]:
    """One graph6 per line."""
    return [h["graph6"] for h in data["hosts"]]


def render_flags(data: dict) -> list[str]:
    lines = [f"# type {data['typeName']} ({data['type']}), m = {data['m']}: {data['count']} flags"]
    for f in data["flags"]:
        neighbours = " ".join("{" + ",".join(map(str, n)) + "}" for n in f["neighbourLabels"])
        labels = ",".join(map(str, f["labels"]))
        lines.append(f"{f['index']} {f['graph']}:{labels} {neighbours}".rstrip())
    return lines


def render_tables(data: dict) -> list[str]:
    lines = []
    for host in data["hosts"]:
        lines.append(f"# host H{host['index']} {host['graph6']}{_ref(host['ref'])}")
        for i, table in enumerate(host["types"], start=1):
            lines.append(
                f"## type {i} ({table['type']}): {table['configurations']} configurations, "
                f"total {table['total']}"
            )
            lines.extend(" ".join(entry) for entry in table["entries"])
    return lines


def render_expressions(data: dict) -> list[str]:
    den = data["denominator"]
    return [
        f"H{h['index']} {h['graph6']}{_ref(h['ref'])}: ({h['expression']})/{den}"
        for h in data["hosts"]
    ]


def render_verification(data: dict) -> list[str]:
    """Verification narrative followed by ``@host``, ``@bound`` and ``@verdict`` lines."""
    lines = [
        f"target {data['target']}, forbidden {' '.join(data['family'])}, l = {data['l']}",
    ]
    for i, p in enumerate(data["psd"], start=1):
        status = "PSD" if p["psd"] else f"NOT PSD, witness {p['witness']} gives {p['witnessValue']}"
        lines.append(f"type {i} ({p['type']}, m = {p['m']}, {p['dim']}x{p['dim']}): {status}")
        if "charpoly" in p:
            agrees = "agrees" if p["descartes"] == p["psd"] else "DISAGREES"
            lines.append(f"  det(xI - M) = {p['charpoly']}  (sign check {agrees})")
    lines.append("")
    for h in data["hosts"]:
        parts = " + ".join([h["density"], *h["contributions"]])
        lines.append(f"H{h['index']} {h['graph6']}{_ref(h['ref'])}: {parts} = {_value(h['total'])}")
    lines.append("")
    maxima = ", ".join(f"H{i}" for i in data["maximizers"])
    lines.append(f"bound {_value(data['bound'])} attained at {maxima}; claimed {data['claimedBound']}")

    for h in data["hosts"]:
        lines.append(_machine("host", h["index"], h["graph6"], h["density"], *h["contributions"], h["total"]["exact"]))
    lines.append(_machine("bound", data["bound"]["exact"]))
    lines.append(_machine("verdict", "pass" if data["passed"] else "fail"))
    return lines


def render_trend(data: dict) -> list[str]:
    return [f"{row['N']} {_value(row['density'])}" for row in data["densities"]]


def render_round(data: dict) -> list[str]:
    lines = []
    for a in data["attempts"]:
        status = "verified" if a["failure"] is None else a["failure"]
        label = f"denominator {a['denominator']}"
        if a["method"] != "ladder":
            label = f"{a['method']}, {label}"
        lines.append(f"{label}: bound {a['bound']}: {status}")
        for w in a["witnesses"]:
            lines.append(f"  type {w['type']}: witness {w['witness']} gives {w['value']}")
    if data["success"]:
        lines.append(_machine("bound", data["bound"]))
        lines.append(_machine("verdict", "pass"))
    else:
        lines.append(_machine("best-uncertified", data.get("bestUncertifiedBound")))
        lines.append(_machine("verdict", "fail"))
    return lines
