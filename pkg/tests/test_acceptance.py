"""Acceptance gate: one check per criterion, each printing PASS/FAIL.

Run with ``pytest tests/test_acceptance.py`` (summary lines appear at the
end of the session) or directly with ``python tests/test_acceptance.py``.
"""

import itertools
import json
import math
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_RESULTS, PARAMS  # noqa: E402
from infoprop.cli import main as cli_main  # noqa: E402
from infoprop.generators import FIXTURE_NAMES, paper_fixture, random_corpus  # noqa: E402
from infoprop.mechanisms import (  # noqa: E402
    SPLIT_FUNCTIONS,
    MechanismConfig,
    SchemeConfig,
    StarterConfig,
    baseline_fixed_reward,
    replay_trace,
    run_scheme,
    run_starter,
    scheme_layer_total,
    starter_layer_budget,
)
from infoprop.network import (  # noqa: E402
    AncestorCase,
    LeafCase,
    Network,
    compute_layering,
    dump_network,
    single_layer_context,
)
from infoprop.properties import check_pic, check_time_efficiency  # noqa: E402

COMBOS = list(itertools.product(PARAMS, PARAMS))


def near(a, b, tol):
    return abs(a - b) <= tol


def ac1():
    start = time.perf_counter()
    r = run_starter(paper_fixture("example1"), StarterConfig(0.5, "identity", 10.0))
    want = {"A": 2.0, "B": 3.0, "C": 2.5, "D": 0.0, "F": 0.0}
    elapsed = time.perf_counter() - start
    ok = all(near(r[a], v, 1e-12) for a, v in want.items()) and elapsed < 1.0
    got = ", ".join(f"{a}={r[a]:.12g}" for a in want)
    return ok, f"{got}; {elapsed * 1000:.1f} ms"


def ac2():
    start = time.perf_counter()
    r = run_scheme(paper_fixture("example2"), SchemeConfig(0.2, 0.2, 30.0))
    transfers = [t for t in r.trace if getattr(t, "rule", None) == "adjacent"]
    by_child = {}
    for t in transfers:
        gain = by_child.setdefault(t.child, [0.0, 0.0])
        gain[0] += t.parent_gain
        gain[1] += t.child_gain
    tol = 1e-9
    checks = [
        near(by_child["D"][0], 0.8, tol),
        near(by_child["D"][1], 3.2, tol),
        near(by_child["E"][0], 0.72, tol),
        near(by_child["E"][1], 2.88, tol),
        all(near(r.layers[0].vb_after[a], v, tol) for a, v in zip("ABC", (8.0, 8.0, 6.4))),
        all(near(r[a], v, tol) for a, v in zip("ABCDE", (8.8, 8.72, 6.4, 3.2, 2.88))),
        near(r.total, 30.0, tol),
    ]
    elapsed = time.perf_counter() - start
    ok = all(checks) and elapsed < 1.0
    finals = ", ".join(f"{r[a]:.6g}" for a in "ABCDE")
    return ok, f"finals ({finals}), sum {r.total:.12g}; {sum(checks)}/{len(checks)} checks; {elapsed * 1000:.1f} ms"


def ac3():
    start = time.perf_counter()
    r = run_scheme(paper_fixture("figure3"), SchemeConfig(0.2, 0.2, 30.0))
    tol = 1e-9
    after_l1 = r.layers[0].vb_after
    c_in = r.layers[1].b_prime["C"]
    anc = [t for t in r.trace if getattr(t, "rule", None) == "ancestor"]
    c_vh = math.fsum(t.parent_gain for t in anc)
    e_gain = math.fsum(t.child_gain for t in anc)
    parents_vb = {a: after_l1[a] - math.fsum(t.parent_gain + t.child_gain for t in anc if t.payer == a) for a in "ABD"}
    checks = [
        near(c_in, 8.64, tol),
        all(near(after_l1[a], 6.4, tol) for a in "ABD"),
        near(c_vh, 0.128, tol),
        near(e_gain, 0.512, tol),
        all(near(v, 6.4 * 29 / 30, tol) and round(v, 5) == 6.18667 for v in parents_vb.values()),
        near(r.total, 30.0, tol),
    ]
    elapsed = time.perf_counter() - start
    ok = all(checks) and elapsed < 1.0
    return ok, f"C.V_b={c_in:.6g}, C.V_h={c_vh:.6g}, E={e_gain:.6g}, parents V_b={parents_vb['A']:.6g}; {elapsed * 1000:.1f} ms"


def corpus(count=1000, max_agents=50, seed=2024):
    return list(random_corpus(count, max_agents=max_agents, seed=seed))


def ac4(nets=None):
    nets = nets or corpus()
    start = time.perf_counter()
    bad = 0
    for k, net in enumerate(nets):
        alpha, beta = COMBOS[k % len(COMBOS)]
        budget = 1.0 + k % 7
        r = run_scheme(net, SchemeConfig(alpha, beta, budget))
        balanced = r.sponsor_remainder == 0.0 and abs(math.fsum(r.rewards.values()) - budget) <= 1e-9 * budget
        if not balanced or min(r.rewards.values()) < 0:
            bad += 1
    elapsed = time.perf_counter() - start
    ok = bad == 0 and len(nets) >= 1000 and elapsed < 30.0
    return ok, f"{len(nets)} networks, {bad} violations, {elapsed:.2f} s"


def ac5(nets=None):
    nets = nets or corpus()
    fs = sorted(SPLIT_FUNCTIONS)
    bad = exact = 0
    for k, net in enumerate(nets):
        beta = PARAMS[k % len(PARAMS)]
        cfg = StarterConfig(beta, fs[k % len(fs)], 1.0 + k % 5)
        lay = compute_layering(net)
        r = run_starter(net, cfg, lay)
        tol = 1e-9 * cfg.budget
        if r.sponsor_remainder < -tol:
            bad += 1
            continue
        weights = [[SPLIT_FUNCTIONS[cfg.f](lay.informed(i)) for i in layer] for layer in lay.layers]
        reverted = [l for l, w in enumerate(weights, start=1) if math.fsum(w) == 0]
        if not reverted:
            exact += 1
            if not near(r.sponsor_remainder, beta**lay.max_depth * cfg.budget, tol):
                bad += 1
        else:
            expected = beta**lay.max_depth * cfg.budget + math.fsum(starter_layer_budget(l, cfg) for l in reverted)
            if not near(r.sponsor_remainder, expected, tol):
                bad += 1
    return bad == 0, f"{len(nets)} networks ({exact} without reverted layers), {bad} violations"


def ac6(count=240):
    start = time.perf_counter()
    nets = list(random_corpus(count, max_agents=8, seed=77, max_out_degree=4))
    cases = {"leaf": 0, "ancestor": 0}
    for net in nets:
        lay = compute_layering(net)
        for layer in lay.layers:
            if len(layer) == 1 and lay.informed(layer[0]):
                ctx = single_layer_context(lay, net, layer[0])
                cases["leaf" if isinstance(ctx, LeafCase) else "ancestor"] += 1
    weak = strict = instances = 0
    for net in nets:
        for alpha, beta in COMBOS:
            rep = check_pic(net, MechanismConfig("scheme", alpha, beta, 1.0), strict=True)
            instances += rep.instances_checked
            weak += sum(v.note == "weak" for v in rep.violations)
            strict += sum(v.note == "strict" for v in rep.violations)
    elapsed = time.perf_counter() - start
    ok = (
        weak == 0 and strict == 0 and len(nets) >= 200 and all(cases.values())
        and max(len(n.agents) for n in nets) <= 8 and elapsed < 300
    )
    return ok, (
        f"{len(nets)} networks x {len(COMBOS)} parameter pairs, {instances} deviations, "
        f"{weak} weak / {strict} strict violations, single-agent layers leaf={cases['leaf']} "
        f"ancestor={cases['ancestor']}; {elapsed:.1f} s"
    )


def ac7(nets=None):
    nets = (nets or corpus())[:120]
    delays = retimes = violations = 0
    for k, net in enumerate(nets):
        alpha, beta = COMBOS[k % len(COMBOS)]
        cfg = MechanismConfig("scheme", alpha, beta, 1.0)
        rep = check_time_efficiency(net, cfg, perturbations=6, seed=k, per_edge=bool(k % 2))
        retimes += 2
        delays += rep.instances_checked - 2
        violations += len(rep.violations)
    ok = violations == 0 and delays >= 500
    return ok, f"{delays} delays + {retimes} re-timings over {len(nets)} networks, {violations} violations"


def ac8():
    budget, reward = 10.0, 3.0
    n = math.ceil(budget / reward) + 1
    star = Network.from_pairs([("S", f"X{k}") for k in range(n)])
    rs = baseline_fixed_reward(star, reward, budget).sponsor_remainder
    rep = check_pic(paper_fixture("example2"), MechanismConfig("uniform", budget=30.0))
    witness = [v for v in rep.violations if v.agent == "A" and v.deviation == [["A", "D"]]]
    found = bool(witness) and near(witness[0].reward_before, 6.0, 1e-9) and near(witness[0].reward_after, 7.5, 1e-9)
    ok = rs < 0 and found
    pair = f"{witness[0].reward_before:g} -> {witness[0].reward_after:g}" if witness else "missing"
    return ok, f"fixed n={n}: r_S={rs:g}; uniform witness (A, {{(A,D)}}): {pair}"


def ac9(orders=100):
    mismatches = checked = 0
    vh_differs = set()
    for name in FIXTURE_NAMES:
        net = paper_fixture(name)
        lay = compute_layering(net)
        budget = 30.0
        tol = 1e-9 * budget
        first_vh = None
        for seed in range(orders):
            cfg = SchemeConfig(0.2, 0.2, budget, ordering="random", seed=seed)
            r = run_scheme(net, cfg, lay)
            vh = {}
            for t in r.trace:
                if hasattr(t, "parent_gain"):
                    vh[t.parent] = vh.get(t.parent, 0.0) + t.parent_gain
            first_vh = first_vh or vh
            if any(not near(vh.get(a, 0.0), first_vh.get(a, 0.0), tol) for a in set(vh) | set(first_vh)):
                vh_differs.add(name)
            for acc in r.layers:
                members = lay.layer(acc.l)
                if len(members) < 2:
                    continue
                checked += 1
                total = scheme_layer_total(lay, acc.l, acc.b_prime, None, 0.2, 0.2)
                good = near(total.retained, acc.retained, tol) and near(total.passed_down, acc.passed_down, tol)
                good = good and all(
                    near(acc.vb_after[i], 0.8 ** lay.informed_by_others(i) * acc.b_prime[i], tol) for i in members
                )
                mismatches += not good
    return mismatches == 0, (
        f"{orders} orders x {len(FIXTURE_NAMES)} fixtures, {checked} multi-agent layer checks, "
        f"{mismatches} mismatches; V_h differs across orders on {sorted(vh_differs) or 'none'}"
    )


def ac10(tmp_dir=None):
    import contextlib
    import io
    import tempfile

    worst = 0.0
    steps = 0
    failures = []
    with tempfile.TemporaryDirectory(dir=tmp_dir) as tmp:
        for name in FIXTURE_NAMES:
            path = Path(tmp) / f"{name}.json"
            path.write_text(dump_network(paper_fixture(name)))
            out = io.StringIO()
            with contextlib.redirect_stdout(out):
                code = cli_main(["run", "-i", str(path), "--trace", "--budget", "30", "--alpha", "0.2", "--beta", "0.2"])
            doc = json.loads(out.getvalue())
            trace = doc["trace"]
            seeds = sum(rec["event"] == "seed" for rec in trace)
            sums = replay_trace(trace, 30.0)[seeds - 1 :]
            steps += len(sums) - 1
            gap = max(abs(s - 30.0) for s in sums)
            worst = max(worst, gap)
            if code != 0 or gap > 1e-9 * 30.0:
                failures.append(name)
    return not failures, f"{steps} transfers replayed on {len(FIXTURE_NAMES)} fixtures, max |sum - B| = {worst:.3g}"


CRITERIA = {f"AC{k}": fn for k, fn in enumerate([ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9, ac10], start=1)}


def _gate(key, *args):
    ok, detail = CRITERIA[key](*args)
    ACCEPTANCE_RESULTS[key] = (ok, detail)
    print(f"{'PASS' if ok else 'FAIL'} {key}: {detail}")
    assert ok, detail


_CORPUS = []


def shared_corpus():
    if not _CORPUS:
        _CORPUS.extend(corpus())
    return _CORPUS


def test_ac1_example1_starter():
    _gate("AC1")


def test_ac2_example2_scheme():
    _gate("AC2")


def test_ac3_figure3_scheme():
    _gate("AC3")


def test_ac4_budget_balance():
    _gate("AC4", shared_corpus())


def test_ac5_starter_remainder():
    _gate("AC5", shared_corpus())


def test_ac6_exhaustive_spic():
    _gate("AC6")


def test_ac7_time_efficiency():
    _gate("AC7", shared_corpus())


def test_ac8_baseline_refutations():
    _gate("AC8")


def test_ac9_order_independence():
    _gate("AC9")


def test_ac10_trace_conservation():
    _gate("AC10")


if __name__ == "__main__":
    failed = 0
    for key, fn in CRITERIA.items():
        ok, detail = fn()
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'} {key}: {detail}")
    sys.exit(1 if failed else 0)
