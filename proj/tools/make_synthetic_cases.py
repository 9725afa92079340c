"""Generates the synthetic benchmark networks under data/cases/.

ring16 and ring64 are uniform-degree cycles whose per-node subproblem size is
identical (every bus has two lines, generator buses host one machine), so they
isolate network-size effects from node-size effects in benchmarks. mesh120 and
mesh300 are rectangular grids with a few diagonal chords.

Deterministic by construction, no RNG. Run: python3 tools/make_synthetic_cases.py
"""
import json
import os

PROJ = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def bus(i, typ, pd, qd, vmax=1.06, vmin=0.94):
    return {
        "id": i,
        "type": typ,
        "pd": pd,
        "qd": qd,
        "gs": 0.0,
        "bs": 0.0,
        "vmax": vmax,
        "vmin": vmin,
        "base_kv": 135.0,
    }


def branch(f, t, r, x, b, rate):
    return {
        "from": f,
        "to": t,
        "r": r,
        "x": x,
        "b": b,
        "rate_a": rate,
        "tap": 1.0,
        "shift_deg": 0.0,
    }


def gen(b, pmax, pmin, qmax, qmin, c2, c1, c0):
    return {
        "bus": b,
        "pmax": pmax,
        "pmin": pmin,
        "qmax": qmax,
        "qmin": qmin,
        "cost": {"c2": c2, "c1": c1, "c0": c0},
    }


def ring(name, nb, gen_buses, pd0, pd_step, costs):
    buses = []
    gset = set(gen_buses)
    for i in range(1, nb + 1):
        if i in gset:
            typ = 3 if i == gen_buses[0] else 2
            pd = qd = 0.0
        else:
            typ = 1
            pd = pd0 + pd_step * (i % 4)
            qd = 0.3 * pd
        buses.append(bus(i, typ, pd, qd))
    branches = []
    for l in range(nb):
        f = l + 1
        t = 1 + (l + 1) % nb
        r = 0.008 + 0.002 * (l % 3)
        x = 0.05 + 0.01 * (l % 4)
        rate = 0.0 if l % 8 == 5 else 3.0
        branches.append(branch(f, t, r, x, 0.02, rate))
    gens = []
    for k, b in enumerate(gen_buses):
        c2, c1 = costs[k % len(costs)]
        gens.append(gen(b, 5.0, 0.2, 3.0, -3.0, c2, c1, 60.0))
    total_pd = sum(b["pd"] for b in buses)
    total_cap = sum(g["pmax"] for g in gens)
    assert total_cap > 1.3 * total_pd, (name, total_pd, total_cap)
    return {
        "name": name,
        "base_mva": 100.0,
        "buses": buses,
        "branches": branches,
        "generators": gens,
    }


def mesh(name, rows, cols, gen_buses, pd0):
    nb = rows * cols
    bid = lambda r, c: 1 + r * cols + c
    gset = set(gen_buses)
    buses = []
    for r in range(rows):
        for c in range(cols):
            i = bid(r, c)
            if i in gset:
                typ = 3 if i == gen_buses[0] else 2
                pd = qd = 0.0
            else:
                typ = 1
                load_on = (r + 2 * c) % 3 != 0
                pd = (pd0 + 0.02 * ((r + c) % 4)) if load_on else 0.0
                qd = 0.35 * pd
            buses.append(bus(i, typ, pd, qd))
    branches = []

    def add(f, t, l):
        r = 0.01
        x = 0.06 + 0.01 * (l % 3)
        rate = 4.0 if l % 5 == 0 else 0.0
        branches.append(branch(f, t, r, x, 0.02, rate))

    l = 0
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                add(bid(r, c), bid(r, c + 1), l)
                l += 1
            if r + 1 < rows:
                add(bid(r, c), bid(r + 1, c), l)
                l += 1
    for r in range(0, rows - 1, 3):
        for c in range(0, cols - 1, 4):
            add(bid(r, c), bid(r + 1, c + 1), l)
            l += 1
    gens = []
    for k, b in enumerate(gen_buses):
        c2 = 0.02 + 0.005 * (k % 4)
        c1 = 18.0 + 2.0 * (k % 5)
        gens.append(gen(b, 6.0, 0.1, 4.0, -4.0, c2, c1, 50.0))
    total_pd = sum(b["pd"] for b in buses)
    total_cap = sum(g["pmax"] for g in gens)
    assert total_cap > 1.3 * total_pd, (name, total_pd, total_cap)
    return {
        "name": name,
        "base_mva": 100.0,
        "buses": buses,
        "branches": branches,
        "generators": gens,
    }


def main():
    outdir = os.path.join(PROJ, "data", "cases")
    os.makedirs(outdir, exist_ok=True)
    cases = [
        ring("ring16", 16, [1, 9], 0.35, 0.05, [(0.02, 18.0), (0.035, 24.0)]),
        ring(
            "ring64",
            64,
            [1, 17, 33, 49],
            0.18,
            0.03,
            [(0.02, 18.0), (0.03, 22.0), (0.025, 20.0), (0.04, 26.0)],
        ),
        mesh("mesh120", 10, 12, [1, 6, 61, 66, 115, 120, 55, 72], 0.30),
        mesh(
            "mesh300",
            15,
            20,
            [1, 10, 20, 141, 150, 160, 281, 290, 300, 75, 226, 135],
            0.22,
        ),
    ]
    for c in cases:
        path = os.path.join(outdir, c["name"] + ".json")
        with open(path, "w") as fh:
            json.dump(c, fh, indent=2)
            fh.write("\n")
        print(
            f"{c['name']}: {len(c['buses'])} buses, {len(c['branches'])} branches, "
            f"{len(c['generators'])} gens -> {path}"
        )


if __name__ == "__main__":
    main()
