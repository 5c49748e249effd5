"""The acceptance battery: one callable per criterion, a deterministic
runner, and the corpus generators shared with the command line front end.

Structured output never contains wall-clock data, so identical seeds give
byte-identical documents; timings are returned separately for display.
"""

from __future__ import annotations

import itertools
import json
import math
import random
import time

from .certs import (
    Certificate,
    LevelViolation,
    MalformedTree,
    PayloadMismatch,
    decompose_weakly_cotorsion,
    embed_two_obtainable,
    instantiate_and_check,
    orthogonality_battery,
    verify_certificate,
)
from .ext import ext1_order, ext1_order_oracle
from .fpmod import FPModule
from .poset import build_mu_family, build_pair_dim2, mu, verify_distinguishing
from .randomgen import (
    antichain_poset,
    chain_poset,
    coprime_split,
    diamond_poset,
    projective_test_modules,
    random_certificate,
    random_ranked_poset,
)
from .rings import (
    NotInS2,
    Poly,
    artinian_quadruple_check,
    is_projective_over_Z_mod_s,
    projectivity_oracle_direct_summand,
)
from .towers import (
    MultSubsetSeq,
    delta_truncated,
    five_term_check,
    is_weakly_cotorsion_fg,
    telescope_homology_check,
    weakly_cotorsion_report,
)

RULE_REFS = {
    1: "closest-integer-subset-count",
    2: "distinguishing-family-pairwise-antichain-equivalence",
    3: "two-subset-exact-height-intersection",
    4: "constant-and-primitive-polynomial-artinian-quadruple",
    5: "telescope-two-term-reduction-homology",
    6: "completion-torsion-limit-exact-sequence",
    7: "weakly-cotorsion-free-rank-rule",
    8: "cyclic-projectivity-coprimality-rule",
    9: "obtainability-certificate-soundness",
    10: "seed-orthogonality-propagation",
    11: "seeded-run-determinism",
}


def abelian_groups_upto(n: int) -> list[tuple[int, ...]]:
    """Invariant-factor tuples of all abelian groups of order 2..n."""

    def parts(e, mx):
        if e == 0:
            yield []
        for k in range(min(e, mx), 0, -1):
            for rest in parts(e - k, k):
                yield [k] + rest

    out = []
    for order in range(2, n + 1):
        m = order
        fac: dict[int, int] = {}
        d = 2
        while d * d <= m:
            while m % d == 0:
                fac[d] = fac.get(d, 0) + 1
                m //= d
            d += 1
        if m > 1:
            fac[m] = fac.get(m, 0) + 1
        choices = [[[p ** k for k in q] for q in parts(e, e)]
                   for p, e in sorted(fac.items())]
        for combo in itertools.product(*choices):
            out.append(tuple(sorted(f for grp in combo for f in grp)))
    return out


GENERATOR_SETS = [tuple(sorted(s)) for r in range(1, 5)
                  for s in itertools.combinations((2, 3, 5, 6), r)]


def poset_corpus(seed: int, per_dimension: int):
    """Seeded ranked-poset corpus per dimension 1..6, at most 200 primes."""
    corpus = {}
    for d in range(1, 7):
        rng = random.Random(f"{seed}:poset:{d}")
        items = []
        for i in range(per_dimension):
            if i % 10 == 9:
                size = rng.randint(40, min(200, 40 + 25 * d))
            else:
                size = rng.randint(d + 1, 30)
            items.append(random_ranked_poset(rng, d, size))
        corpus[d] = items
    return corpus


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------


def criterion_1() -> dict:
    t0 = time.perf_counter()
    listed = [mu(d) for d in range(5)]
    closed_form = all(mu(d) == (d + 1) ** 2 // 4 for d in range(101))
    elapsed = time.perf_counter() - t0
    ok = listed == [0, 1, 2, 4, 6] and closed_form and elapsed < 1e-3
    return {"criterion": 1, "pass": ok,
            "details": {"listed": listed, "closed_form_to_100": closed_form,
                        "under_1ms": elapsed < 1e-3},
            "_elapsed": elapsed}


def criterion_2(seed: int, per_dimension: int = 100, corpus=None) -> dict:
    t0 = time.perf_counter()
    corpus = corpus or poset_corpus(seed, per_dimension)
    runs = 0
    failures = []
    for d, posets in corpus.items():
        for idx, poset in enumerate(posets):
            fam = build_mu_family(poset)
            runs += 1
            if fam.count != mu(d):
                failures.append({"dimension": d, "index": idx, "why": "size"})
                continue
            rep = verify_distinguishing(poset, fam)
            if not (rep.passed() and rep.agreement):
                failures.append({"dimension": d, "index": idx, "why": "verify"})
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 5.0
    return {"criterion": 2, "pass": ok,
            "details": {"runs": runs, "failures": failures,
                        "under_5s": elapsed < 5.0},
            "_elapsed": elapsed}


def criterion_3(seed: int, per_dimension: int = 100, corpus=None) -> dict:
    t0 = time.perf_counter()
    corpus = corpus or poset_corpus(seed, per_dimension)
    posets = list(corpus.get(1, ())) + list(corpus.get(2, ()))
    posets += [diamond_poset(), chain_poset(1), chain_poset(2), antichain_poset(5)]
    rng = random.Random(f"{seed}:dim2-extra")
    for _ in range(20):
        d = rng.randint(0, 2)
        posets.append(random_ranked_poset(rng, d, rng.randint(d + 1, 25)))
    checked = 0
    failures = []
    for idx, poset in enumerate(posets):
        s, t = build_pair_dim2(poset)
        for p in poset.primes:
            hits = sum(1 for sub in (s, t) if sub.intersects(p))
            checked += 1
            if hits != poset.height[p]:
                failures.append({"index": idx, "prime": p,
                                 "hits": hits, "height": poset.height[p]})
    elapsed = time.perf_counter() - t0
    return {"criterion": 3, "pass": not failures,
            "details": {"posets": len(posets), "primes_checked": checked,
                        "failures": failures},
            "_elapsed": elapsed}


def criterion_4() -> dict:
    t0 = time.perf_counter()
    s_values = [2, 3, 4, 6, 12]
    primes = [p for p in range(2, 50) if all(p % q for q in range(2, p))]
    for p in primes:
        for q in primes:
            if p <= q and p * q <= 50 and p * q not in s_values:
                s_values.append(p * q)
    s_values = sorted(set(s_values))
    t_polys = [[1, 1], [3, 2], [1, 1, 1], [15, 10, 6]]
    passes = 0
    failures = []
    for sv in s_values:
        for tc in t_polys:
            rep = artinian_quadruple_check(Poly.over_z([sv]), Poly.over_z(tc))
            if rep.verdict:
                passes += 1
            else:
                failures.append({"s": sv, "t": tc})
    bad_polys = [[4, 2], [6, 3], [0, 2], [15, 10, 5]]
    rejected = 0
    for tc in bad_polys:
        try:
            artinian_quadruple_check(Poly.over_z([3]), Poly.over_z(tc))
        except NotInS2:
            rejected += 1
    elapsed = time.perf_counter() - t0
    ok = (not failures and rejected == len(bad_polys) and elapsed < 2.0)
    return {"criterion": 4, "pass": ok,
            "details": {"grid_size": len(s_values) * len(t_polys),
                        "passes": passes, "failures": failures,
                        "content_rejections": rejected,
                        "under_2s": elapsed < 2.0},
            "_elapsed": elapsed}


def criterion_5(groups=None) -> dict:
    t0 = time.perf_counter()
    groups = groups if groups is not None else abelian_groups_upto(64)
    failures = []
    checks = 0
    for g in groups:
        module = FPModule.from_invariants(list(g))
        for gens in GENERATOR_SETS:
            seq = MultSubsetSeq(generators=gens)
            for n in range(1, 9):
                rep = telescope_homology_check(seq, n, module)
                checks += 1
                if not rep.passed():
                    failures.append({"group": list(g), "generators": list(gens),
                                     "n": n, "report": rep.to_document()})
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 10.0
    return {"criterion": 5, "pass": ok,
            "details": {"checks": checks, "failures": failures,
                        "under_10s": elapsed < 10.0},
            "_elapsed": elapsed}


def criterion_6(groups=None) -> dict:
    t0 = time.perf_counter()
    groups = groups if groups is not None else abelian_groups_upto(64)
    failures = []
    checks = 0
    for g in groups:
        module = FPModule.from_invariants(list(g))
        for gens in GENERATOR_SETS:
            seq = MultSubsetSeq(generators=gens)
            delta = delta_truncated(module, seq)
            five = five_term_check(module, seq)
            checks += 1
            ok = (delta.lim1.is_zero() and delta.lim1.certificate_kind is not None
                  and delta.delta_equals_lambda
                  and five.exact_everywhere() and five.lim1.is_zero()
                  and five.delta_invariants == delta.lambda_invariants)
            if not ok:
                failures.append({"group": list(g), "generators": list(gens)})
    elapsed = time.perf_counter() - t0
    return {"criterion": 6, "pass": not failures,
            "details": {"checks": checks, "failures": failures},
            "_elapsed": elapsed}


def criterion_7(groups=None) -> dict:
    t0 = time.perf_counter()
    groups = groups if groups is not None else abelian_groups_upto(64)
    failures = []
    checks = 0
    for g in groups:
        module = FPModule.from_invariants(list(g))
        for m in (2, 3, 6, 10):
            seq = MultSubsetSeq(generators=(m,))
            decided = is_weakly_cotorsion_fg(module, m)
            oracle = five_term_check(module, seq).ext_invariants == ()
            checks += 1
            if not (decided and oracle):
                failures.append({"group": list(g), "m": m})
    free_cases = [(0,), (0, 6), (0, 0)]
    for inv in free_cases:
        module = FPModule.from_invariants(list(inv))
        for m in (2, 3, 6, 10):
            rep = weakly_cotorsion_report(module, m)
            checks += 1
            if rep["decision"] or not rep["oracle_agrees"] or \
                    not rep.get("free_part_growth"):
                failures.append({"group": list(inv), "m": m})
    elapsed = time.perf_counter() - t0
    return {"criterion": 7, "pass": not failures,
            "details": {"checks": checks, "failures": failures},
            "_elapsed": elapsed}


def criterion_8() -> dict:
    t0 = time.perf_counter()
    mismatches = []
    checked = 0
    for s in range(1, 61):
        for d in range(1, s + 1):
            if s % d:
                continue
            checked += 1
            if is_projective_over_Z_mod_s(d, s) != \
                    projectivity_oracle_direct_summand(d, s):
                mismatches.append({"d": d, "s": s})
    elapsed = time.perf_counter() - t0
    ok = not mismatches and elapsed < 5.0
    return {"criterion": 8, "pass": ok,
            "details": {"pairs": checked, "mismatches": mismatches,
                        "under_5s": elapsed < 5.0},
            "_elapsed": elapsed}


def _embed_corpus(max_modulus: int = 36):
    out = []
    for n in range(2, max_modulus + 1):
        divs = [d for d in range(2, n + 1) if n % d == 0]
        for d in divs:
            out.append((n, (d,)))
        for i, d in enumerate(divs):
            for e in divs[i:]:
                out.append((n, (d, e)))
        for combo in itertools.combinations_with_replacement(divs, 3):
            if math.prod(combo) <= 64:
                out.append((n, combo))
    return out


def _mutate_level(cert_doc: dict, rng: random.Random, embed_class: bool):
    """Corrupt a level field; returns (mutated document, expected error)."""
    doc = json.loads(json.dumps(cert_doc))
    if embed_class and rng.random() < 0.5:
        doc["root"]["level"] = 1          # below the derivable level 2
        return doc, LevelViolation
    # invalid level value somewhere in the tree
    node = doc["root"]
    while node.get("children") and rng.random() < 0.6:
        node = rng.choice(node["children"])
    node["level"] = rng.choice([0, 3])
    return doc, MalformedTree


def _growth_factor(node: dict, is_root: bool) -> int | None:
    """A cyclic order whose addition to the node module must be rejected."""
    mod = node["payload"]["module"]
    n = mod["modulus"]
    tag = node.get("tag") or {}
    if node["kind"] == "Seed":
        kind = tag.get("kind")
        if kind in ("LocalizedRingModule", "AlmostCotorsionLocalized"):
            gens = tag.get("generators") or []
            if not gens:
                return None
            g = gens[0]
            if n == 0:
                return abs(g) if abs(g) > 1 else None
            e = math.gcd(abs(g), n)
            return e if e > 1 else None
        if kind in ("QuotientRingModule", "AlmostCotorsionQuotient"):
            s = abs(tag.get("s", 0))
            if n == 0:
                return s + 1 if s >= 1 else None
            for e in range(2, n + 1):
                if n % e == 0 and s % e != 0:
                    return e
            return None
        # opaque tag: only a parent's shape check can catch the growth
        if is_root:
            return None
        return 2 if n == 0 else next(e for e in range(2, n + 1) if n % e == 0)
    return 2 if n == 0 else next(e for e in range(2, n + 1) if n % e == 0)


def _mutate_payload(cert_doc: dict, rng: random.Random):
    """Corrupt a payload; returns (mutated document, expected error)."""
    doc = json.loads(json.dumps(cert_doc))
    nodes = []

    def collect(node, is_root):
        nodes.append((node, is_root))
        for c in node.get("children", []):
            collect(c, False)

    collect(doc["root"], True)
    candidates = []
    for node, is_root in nodes:
        if not node.get("payload"):
            continue
        extra = _growth_factor(node, is_root)
        if extra is not None:
            candidates.append((node, extra))
    node, extra = rng.choice(candidates)
    mod = node["payload"]["module"]
    mod["gens"] += 1
    mod["relations"] = [r + [0] for r in mod["relations"]]
    row = [0] * mod["gens"]
    row[-1] = extra
    mod["relations"].append(row)
    return doc, PayloadMismatch


def _check_mutation(doc: dict, expected) -> bool:
    try:
        cert = Certificate.from_document(doc)
        verify_certificate(cert)
        instantiate_and_check(cert)
    except expected:
        return True
    except (MalformedTree, LevelViolation, PayloadMismatch):
        return False
    except Exception:
        return False
    return False


def criterion_9(seed: int, groups=None, quick: bool = False) -> dict:
    t0 = time.perf_counter()
    groups = groups if groups is not None else abelian_groups_upto(64)
    failures = []

    decompose_certs = []
    ms = (2, 3, 6)
    for g in groups:
        module = FPModule.from_invariants(list(g))
        for m in ms:
            try:
                cert = decompose_weakly_cotorsion(module, m)
                if verify_certificate(cert) != 1 or \
                        not instantiate_and_check(cert)["ok"]:
                    failures.append({"kind": "decompose", "group": list(g), "m": m})
                else:
                    decompose_certs.append(cert)
            except Exception as exc:
                failures.append({"kind": "decompose", "group": list(g), "m": m,
                                 "error": repr(exc)})

    embed_certs = []
    corpus = _embed_corpus(18 if quick else 36)
    for n, inv in corpus:
        try:
            cert = embed_two_obtainable(FPModule.from_invariants(list(inv), modulus=n))
            if verify_certificate(cert) != 2 or not instantiate_and_check(cert)["ok"]:
                failures.append({"kind": "embed", "modulus": n, "inv": list(inv)})
            else:
                embed_certs.append(cert)
        except Exception as exc:
            failures.append({"kind": "embed", "modulus": n, "inv": list(inv),
                             "error": repr(exc)})

    rng = random.Random(f"{seed}:mutations")
    mutation_fails = []
    for label, pool, embed_class in (("decompose", decompose_certs, False),
                                     ("embed", embed_certs, True)):
        accepted = 0
        for i in range(50):
            cert = rng.choice(pool)
            doc = cert.to_document()
            if i % 2 == 0:
                mutated, expected = _mutate_level(doc, rng, embed_class)
            else:
                mutated, expected = _mutate_payload(doc, rng)
            if not _check_mutation(mutated, expected):
                accepted += 1
                mutation_fails.append({"class": label, "index": i,
                                       "expected": expected.__name__})
        if accepted:
            failures.append({"kind": f"mutations-{label}", "accepted": accepted})

    elapsed = time.perf_counter() - t0
    return {"criterion": 9, "pass": not failures,
            "details": {"decompose_certs": len(decompose_certs),
                        "embed_certs": len(embed_certs),
                        "mutations_per_class": 50,
                        "failures": failures,
                        "mutation_failures": mutation_fails},
            "_elapsed": elapsed}


def criterion_10(seed: int, runs: int = 200) -> dict:
    t0 = time.perf_counter()
    rng = random.Random(f"{seed}:orthogonality")
    failures = []
    for i in range(runs):
        n = rng.choice([4, 6, 8, 9, 12, 16, 18, 20, 24, 27, 28, 32, 36])
        a, b = coprime_split(rng, n)
        cert = random_certificate(rng, n, a, depth=rng.randint(1, 4))
        tests = projective_test_modules(rng, n, b, count=rng.randint(1, 3))
        try:
            rep = orthogonality_battery(cert, tests)
            if not rep["pass"]:
                failures.append({"run": i, "modulus": n, "report": rep})
        except Exception as exc:
            failures.append({"run": i, "modulus": n, "error": repr(exc)})

    oracle_mismatches = []
    pairs_checked = 0
    pool_z = [(2,), (3,), (4,), (2, 2), (6,), (8,), (2, 4), (12,), (3, 3), (16,)]
    for a_inv in pool_z:
        for b_inv in pool_z:
            if math.prod(a_inv) * math.prod(b_inv) > 64:
                continue
            pairs_checked += 1
            engine = ext1_order(FPModule.from_invariants(list(a_inv)),
                                FPModule.from_invariants(list(b_inv)))
            if engine != ext1_order_oracle(list(a_inv), list(b_inv)):
                oracle_mismatches.append({"ring": 0, "a": list(a_inv),
                                          "b": list(b_inv)})
    for n in (4, 6, 8, 9, 12, 16, 18, 24, 36):
        divs = [d for d in range(2, n + 1) if n % d == 0]
        pool = [(d,) for d in divs] + [(d, e) for d in divs for e in divs if d <= e]
        for a_inv in pool:
            for b_inv in pool:
                if math.prod(a_inv) * math.prod(b_inv) > 64:
                    continue
                pairs_checked += 1
                engine = ext1_order(FPModule.from_invariants(list(a_inv), modulus=n),
                                    FPModule.from_invariants(list(b_inv), modulus=n))
                if engine != ext1_order_oracle(list(a_inv), list(b_inv), modulus=n):
                    oracle_mismatches.append({"ring": n, "a": list(a_inv),
                                              "b": list(b_inv)})

    elapsed = time.perf_counter() - t0
    ok = not failures and not oracle_mismatches
    return {"criterion": 10, "pass": ok,
            "details": {"runs": runs, "failures": failures,
                        "oracle_pairs": pairs_checked,
                        "oracle_mismatches": oracle_mismatches},
            "_elapsed": elapsed}


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------


def _strip_timing(results: list[dict]) -> list[dict]:
    return [{k: v for k, v in r.items() if not k.startswith("_")} for r in results]


def run_criteria_1_to_10(seed: int, quick: bool = False) -> list[dict]:
    per_dim = 10 if quick else 100
    groups = abelian_groups_upto(24 if quick else 64)
    corpus = poset_corpus(seed, per_dim)
    return [
        criterion_1(),
        criterion_2(seed, per_dim, corpus=corpus),
        criterion_3(seed, per_dim, corpus=corpus),
        criterion_4(),
        criterion_5(groups=groups),
        criterion_6(groups=groups),
        criterion_7(groups=groups),
        criterion_8(),
        criterion_9(seed, groups=groups, quick=quick),
        criterion_10(seed, runs=40 if quick else 200),
    ]


def run_battery(seed: int = 42, quick: bool = False) -> tuple[dict, list[float]]:
    """Run the full battery; returns (structured document, per-criterion timings).

    Criterion 11 re-runs the other ten criteria with the same seed and
    compares the serialized bytes.
    """
    first = run_criteria_1_to_10(seed, quick=quick)
    second = run_criteria_1_to_10(seed, quick=quick)
    bytes_first = json.dumps(_strip_timing(first), sort_keys=True).encode()
    bytes_second = json.dumps(_strip_timing(second), sort_keys=True).encode()
    det = {"criterion": 11, "pass": bytes_first == bytes_second,
           "details": {"bytes": len(bytes_first),
                       "identical": bytes_first == bytes_second},
           "_elapsed": 0.0}
    results = first + [det]
    timings = [r.get("_elapsed", 0.0) for r in results]
    doc = {
        "seed": seed,
        "quick": quick,
        "criteria": _strip_timing(results),
        "all_pass": all(r["pass"] for r in results),
        "rule_refs": {str(k): v for k, v in RULE_REFS.items()},
    }
    return doc, timings
