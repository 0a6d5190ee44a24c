"""Command-line front end: JSON in, JSON out, with an on-disk result cache.

Exit codes: 0 success, 1 verification failure, 2 invalid input, 3 resource
bound exceeded.  All numeric output is exact ("num/den" strings), never
floats; figures and CSV files are side outputs of the report paths.
"""

from __future__ import annotations

import hashlib
import json
import os
import sys
import tempfile
from fractions import Fraction

import click

from .covers import count_covers_by_degree, enumerate_covers_up_to, \
    export_floor_diagram
from .feynman import FeynmanRequest, all_orders, feynman, generating_series, \
    refined_feynman
from .pearls import EnumerationLimitError, automorphism_count, \
    enumerate_pearl_chains, leaking_vectors
from .quasimod import InsufficientPrecisionError, NotQuasimodularError, \
    decompose, weight_profile
from .series import format_rational, parse_rational

EXIT_VERIFY = 1
EXIT_INVALID = 2
EXIT_RESOURCE = 3


def _fail(code, msg):
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


def _parse_delta(text, d2):
    try:
        delta = tuple(int(x) for x in text.split(","))
    except ValueError:
        _fail(EXIT_INVALID, f"cannot parse delta {text!r}")
    if len(delta) != d2:
        _fail(EXIT_INVALID, f"delta has {len(delta)} entries, expected d2={d2}")
    if sum(delta) != 0:
        _fail(EXIT_INVALID, f"delta {delta} does not sum to zero")
    return delta


def _parse_order(text, n):
    try:
        omega = tuple(int(x) for x in text.split(","))
    except ValueError:
        _fail(EXIT_INVALID, f"cannot parse order {text!r}")
    if sorted(omega) != list(range(1, n + 1)):
        _fail(EXIT_INVALID, f"order must be a permutation of 1..{n}")
    return omega


def _emit(payload, out):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _chain(d2, g, index):
    try:
        chains = enumerate_pearl_chains(d2, g)
    except EnumerationLimitError as e:
        _fail(EXIT_RESOURCE, str(e))
    except ValueError as e:
        _fail(EXIT_INVALID, str(e))
    if not chains:
        _fail(EXIT_INVALID, f"no pearl chains of type ({d2}, {g})")
    if not 0 <= index < len(chains):
        _fail(EXIT_INVALID,
              f"chain index {index} out of range, {len(chains)} chains exist")
    return chains[index]


# ---------------------------------------------------------------- caching

def _cache_dir(flag_value):
    return flag_value or os.environ.get("PEARL_CACHE_DIR")


def _cache_key(config):
    blob = json.dumps(config, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def _cache_load(cdir, key):
    if not cdir:
        return None
    path = os.path.join(cdir, key + ".json")
    if not os.path.exists(path):
        return None
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        click.echo(f"warning: ignoring corrupt cache entry {path}: {e}",
                   err=True)
        return None


def _cache_store(cdir, key, payload):
    if not cdir:
        return
    os.makedirs(cdir, exist_ok=True)
    path = os.path.join(cdir, key + ".json")
    fd, tmp = tempfile.mkstemp(dir=cdir, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------- figures

def _plot_series(coeffs, title, path):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    xs = list(range(len(coeffs)))
    ys = [float(c) for c in coeffs]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(xs, ys, color="#35608d")
    ax.set_xlabel("power of q")
    ax.set_ylabel("coefficient")
    ax.set_title(title)
    if any(y > 0 for y in ys) and all(y >= 0 for y in ys):
        ax.set_yscale("symlog")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _plot_decomposition(dec, title, path):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    labels = []
    ys = []
    for (a, b, c), x in dec.terms:
        mono = "".join(f"$E_{k}^{e}$" if e > 1 else f"$E_{k}$"
                       for k, e in ((2, a), (4, b), (6, c)) if e) or "1"
        labels.append(mono)
        ys.append(float(x))
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(range(len(ys)), ys, color="#8d3560")
    ax.axhline(0, color="black", linewidth=0.8)
    ax.set_xticks(range(len(ys)))
    ax.set_xticklabels(labels, rotation=45, ha="right")
    ax.set_ylabel("coefficient")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _write_series_csv(coeffs, path):
    with open(path, "w") as fh:
        fh.write("degree,coefficient\n")
        for d, c in enumerate(coeffs):
            fh.write(f"{d},{format_rational(c)}\n")


def _write_decomposition_csv(dec, path):
    with open(path, "w") as fh:
        fh.write("e2,e4,e6,weight,coefficient\n")
        for (a, b, c), x in dec.terms:
            fh.write(f"{a},{b},{c},{2 * a + 4 * b + 6 * c},"
                     f"{format_rational(x)}\n")


# ---------------------------------------------------------------- commands

@click.group()
def main():
    """Exact curve-counting series via pearl chains, covers and propagators."""


@main.command("pearls")
@click.option("--d2", type=int, required=True)
@click.option("--genus", type=int, required=True)
@click.option("--out", type=click.Path(), default=None)
def cmd_pearls(d2, genus, out):
    """List the pearl chains of a given type, with automorphism counts."""
    try:
        chains = enumerate_pearl_chains(d2, genus)
    except EnumerationLimitError as e:
        _fail(EXIT_RESOURCE, str(e))
    except ValueError as e:
        _fail(EXIT_INVALID, str(e))
    payload = {
        "d2": d2,
        "g": genus,
        "count": len(chains),
        "chains": [dict(P.to_json_dict(), aut=automorphism_count(P))
                   for P in chains],
    }
    _emit(payload, out)


@main.command("series")
@click.option("--d2", type=int, required=True)
@click.option("--genus", type=int, required=True)
@click.option("--delta", default=None, help="comma-separated, defaults to all zero")
@click.option("--max-degree", "max_degree", type=int, default=11)
@click.option("--normalized/--unnormalized", default=True)
@click.option("--jobs", type=int, default=1)
@click.option("--cache-dir", default=None)
@click.option("--out", type=click.Path(), default=None)
@click.option("--csv", "csv_path", type=click.Path(), default=None)
@click.option("--plot", "plot_path", type=click.Path(), default=None)
def cmd_series(d2, genus, delta, max_degree, normalized, jobs, cache_dir, out,
               csv_path, plot_path):
    """Generating series of curve counts via the Feynman route."""
    delta = _parse_delta(delta, d2) if delta else (0,) * d2
    if max_degree < 0:
        _fail(EXIT_INVALID, "max-degree must be >= 0")
    config = {"command": "series", "d2": d2, "g": genus,
              "delta": sorted(delta), "D": max_degree,
              "normalized": normalized}
    cdir = _cache_dir(cache_dir)
    key = _cache_key(config)
    payload = _cache_load(cdir, key)
    if payload is None:
        try:
            total, breakdown = generating_series(
                d2, genus, delta, max_degree, aut_normalize=normalized,
                jobs=jobs)
        except EnumerationLimitError as e:
            _fail(EXIT_RESOURCE, str(e))
        except ValueError as e:
            _fail(EXIT_INVALID, str(e))
        payload = {
            "config": config,
            "series": total.to_json_dict(),
            "breakdown": [{"chain": P.to_json_dict(),
                           "aut": automorphism_count(P),
                           "series": s.to_json_dict()}
                          for P, s in breakdown],
        }
        _cache_store(cdir, key, payload)
    coeffs = [parse_rational(c) for c in payload["series"]["coeffs"]]
    if csv_path:
        _write_series_csv(coeffs, csv_path)
    if plot_path:
        _plot_series(coeffs,
                     f"counts for (d2, g) = ({d2}, {genus}), delta {delta}",
                     plot_path)
    _emit(payload, out)


@main.command("feynman")
@click.option("--d2", type=int, required=True)
@click.option("--genus", type=int, required=True)
@click.option("--chain-index", type=int, default=0)
@click.option("--order", default=None, help="comma-separated positions, identity if omitted")
@click.option("--leak", default=None, help="comma-separated leaks of the white vertices")
@click.option("--max-degree", "max_degree", type=int, default=11)
@click.option("--refined/--unrefined", default=False)
@click.option("--out", type=click.Path(), default=None)
def cmd_feynman(d2, genus, chain_index, order, leak, max_degree, refined, out):
    """One (refined) Feynman integral for a single pearl chain and order."""
    P = _chain(d2, genus, chain_index)
    omega = _parse_order(order, P.n) if order else tuple(range(1, P.n + 1))
    leaks = _parse_delta(leak, d2) if leak else (0,) * d2
    leaking = {lab: 0 for lab, _ in P.vertices}
    for lab, L in zip(P.white_labels, leaks):
        leaking[lab] = L
    try:
        req = FeynmanRequest(P, omega, leaking, max_degree)
    except ValueError as e:
        _fail(EXIT_INVALID, str(e))
    s = refined_feynman(req) if refined else feynman(req)
    payload = {
        "chain": P.to_json_dict(),
        "order": list(omega),
        "leak": list(leaks),
        "refined": refined,
        "series": s.to_json_dict(),
    }
    _emit(payload, out)


@main.command("covers")
@click.option("--d2", type=int, required=True)
@click.option("--genus", type=int, required=True)
@click.option("--delta", default=None)
@click.option("--max-degree", "max_degree", type=int, default=3)
@click.option("--normalized/--unnormalized", default=False)
@click.option("--aut-weighting", is_flag=True, default=False,
              help="also report unlabeled counts by automorphism orbits")
@click.option("--out", type=click.Path(), default=None)
def cmd_covers(d2, genus, delta, max_degree, normalized, aut_weighting, out):
    """Generating series via brute-force cover enumeration."""
    delta = _parse_delta(delta, d2) if delta else (0,) * d2
    payload = {"d2": d2, "g": genus, "delta": sorted(delta), "D": max_degree,
               "chains": []}
    try:
        chains = enumerate_pearl_chains(d2, genus)
    except EnumerationLimitError as e:
        _fail(EXIT_RESOURCE, str(e))
    except ValueError as e:
        _fail(EXIT_INVALID, str(e))
    total = [Fraction(0)] * (max_degree + 1)
    for P in chains:
        s, report = count_covers_by_degree(P, delta, max_degree,
                                           aut_normalize=normalized,
                                           aut_weighting=aut_weighting)
        entry = {"chain": P.to_json_dict(), "aut": automorphism_count(P),
                 "series": s.to_json_dict()}
        if report is not None:
            entry["orbit_report"] = report.to_json_dict()
        payload["chains"].append(entry)
        for d in range(max_degree + 1):
            total[d] += s.coeffs[d]
    payload["total"] = [format_rational(c) for c in total]
    _emit(payload, out)


@main.command("verify")
@click.option("--d2", type=int, required=True)
@click.option("--genus", type=int, required=True)
@click.option("--delta", default=None)
@click.option("--max-degree", "max_degree", type=int, default=3)
@click.option("--out", type=click.Path(), default=None)
def cmd_verify(d2, genus, delta, max_degree, out):
    """Cross-check cover counts against refined Feynman coefficients."""
    delta = _parse_delta(delta, d2) if delta else (0,) * d2
    try:
        chains = enumerate_pearl_chains(d2, genus)
    except EnumerationLimitError as e:
        _fail(EXIT_RESOURCE, str(e))
    except ValueError as e:
        _fail(EXIT_INVALID, str(e))
    cells = 0
    mismatches = []
    for ci, P in enumerate(chains):
        for leaking in leaking_vectors(P, delta):
            for omega in all_orders(P.n):
                req = FeynmanRequest(P, omega, leaking, max_degree)
                ref = refined_feynman(req)
                counts = enumerate_covers_up_to(P, omega, leaking, max_degree)
                keys = set(counts)
                keys.update(qe for (_, qe) in ref.terms)
                for a in sorted(keys):
                    cells += 1
                    lhs = counts.get(a, 0)
                    rhs = ref.coefficient((), a)
                    if lhs != rhs:
                        mismatches.append({
                            "chain_index": ci,
                            "order": list(omega),
                            "leak": [leaking[w] for w in P.white_labels],
                            "multidegree": list(a),
                            "covers": lhs,
                            "feynman": format_rational(rhs),
                        })
    payload = {"d2": d2, "g": genus, "delta": sorted(delta), "D": max_degree,
               "chains": len(chains), "cells": cells,
               "mismatches": mismatches, "ok": not mismatches}
    _emit(payload, out)
    if mismatches:
        m = mismatches[0]
        click.echo(f"FIRST MISMATCH: {json.dumps(m, sort_keys=True)}", err=True)
        sys.exit(EXIT_VERIFY)


@main.command("quasimod")
@click.option("--in", "in_path", type=click.Path(exists=True), default=None,
              help="series JSON (defaults to stdin)")
@click.option("--max-weight", "max_weight", type=int, default=None)
@click.option("--out", type=click.Path(), default=None)
@click.option("--csv", "csv_path", type=click.Path(), default=None)
@click.option("--plot", "plot_path", type=click.Path(), default=None)
def cmd_quasimod(in_path, max_weight, out, csv_path, plot_path):
    """Decompose a q-series into a polynomial in E2, E4, E6."""
    if in_path:
        with open(in_path) as fh:
            doc = json.load(fh)
    else:
        doc = json.load(sys.stdin)
    if "series" in doc:
        doc = doc["series"]
    try:
        coeffs = [parse_rational(str(c)) for c in doc["coeffs"]]
    except (KeyError, ValueError) as e:
        _fail(EXIT_INVALID, f"cannot read series coefficients: {e}")
    if max_weight is None:
        d2, g = doc.get("d2"), doc.get("g")
        if d2 is None or g is None:
            _fail(EXIT_INVALID, "need --max-weight for series without (d2, g)")
        max_weight = 4 * (d2 + g - 1)
    try:
        dec = decompose(coeffs, max_weight)
    except InsufficientPrecisionError as e:
        _fail(EXIT_INVALID, str(e))
    except NotQuasimodularError as e:
        _fail(EXIT_VERIFY, str(e))
    homogeneous, weight, split = weight_profile(dec)
    payload = dec.to_json_dict()
    payload["weight_split"] = {
        str(w): [{"e2": a, "e4": b, "e6": c, "c": format_rational(x)}
                 for (a, b, c), x in terms]
        for w, terms in split.items()}
    if csv_path:
        _write_decomposition_csv(dec, csv_path)
    if plot_path:
        _plot_decomposition(dec, f"decomposition, max weight {max_weight}",
                            plot_path)
    _emit(payload, out)


@main.command("export-floor-diagram")
@click.option("--d2", type=int, required=True)
@click.option("--genus", type=int, required=True)
@click.option("--chain-index", type=int, default=0)
@click.option("--order", default=None)
@click.option("--leak", default=None)
@click.option("--max-degree", "max_degree", type=int, default=3)
@click.option("--out", type=click.Path(), default=None)
def cmd_export_floor_diagram(d2, genus, chain_index, order, leak, max_degree,
                             out):
    """Floor diagrams of all covers for one chain, order and leak."""
    P = _chain(d2, genus, chain_index)
    omega = _parse_order(order, P.n) if order else tuple(range(1, P.n + 1))
    leaks = _parse_delta(leak, d2) if leak else (0,) * d2
    leaking = {lab: 0 for lab, _ in P.vertices}
    for lab, L in zip(P.white_labels, leaks):
        leaking[lab] = L
    buckets = enumerate_covers_up_to(P, omega, leaking, max_degree,
                                     with_covers=True)
    diagrams = [export_floor_diagram(P, omega, c, leak=leaking)
                for a in sorted(buckets)
                for c in buckets[a][1]]
    payload = {
        "chain": P.to_json_dict(),
        "order": list(omega),
        "leak": list(leaks),
        "max_degree": max_degree,
        "diagrams": diagrams,
    }
    _emit(payload, out)


if __name__ == "__main__":
    main()
