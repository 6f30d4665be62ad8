"""Command line entry point: ``soergel-kit {homfly,hhh,verify}``.

Exit codes: 0 pass, 1 some compared cell failed, 2 usage error,
3 internal invariant violation (d^2 != 0, inconsistent ranks, ...).
"""

from __future__ import annotations

import argparse
import itertools
import logging
import sys
from dataclasses import dataclass, replace

import gmpy2

from . import bimod as bm
from . import hecke as hk
from . import invariants as iv
from . import rouquier as rq
from .errors import (CacheCorrupted, ChainConditionViolated, CutoffTooLow, IndexOutOfRange,
                     ParseError, SoergelKitError, UnknownCheck)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

CHECKS = ("serre", "kalman-cat", "relative-serre", "lw", "bruhat", "duality", "markov", "kalman-decat")

log = logging.getLogger("soergelkit")


class UsageError(SoergelKitError):
    pass


@dataclass(frozen=True)
class Config:
    n: int = 1
    braid: str = ""
    cutoff: int = 14
    field: str = "q"
    workers: int = 1
    cache_dir: str | None = None
    output: str = "json"
    normalized: bool = False
    verify_q: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise UsageError("-n must be at least 1")
        if self.cutoff < 0 or self.cutoff % 2:
            raise UsageError(f"-D must be even and >= 0 (got {self.cutoff})")
        if self.workers < 1:
            raise UsageError("--workers must be positive")
        self.prime  # validates the field string

    @property
    def prime(self) -> int | None:
        if self.field == "q":
            return None
        if not self.field.startswith("fp:"):
            raise UsageError(f"field must be 'q' or 'fp:PRIME', got {self.field!r}")
        try:
            p = int(self.field[3:])
        except ValueError:
            raise UsageError(f"not an integer prime: {self.field[3:]!r}") from None
        if p < 3 or not gmpy2.is_prime(p):
            raise UsageError(f"{p} is not an odd prime")
        return p

    def request(self, **kw) -> iv.SliceRequest:
        return iv.SliceRequest(self.cutoff, self.prime, normalized=self.normalized, workers=self.workers, **kw)

    def braid_word(self) -> hk.BraidWord:
        return hk.BraidWord.parse(self.n, self.braid)


# ---------------------------------------------------------------------------
# commands


def cmd_homfly(cfg: Config) -> dict:
    b = cfg.braid_word()
    p = hk.homfly(b, normalized=cfg.normalized)
    return {"tables": {"homfly": {str(k): str(v) for k, v in sorted(p.items())}},
            "comparisons": [], "pass": True, "braid": cfg.braid, "n": cfg.n,
            "homfly": hk.apoly_str(p), "normalized": cfg.normalized}


def _with_q_reverification(cfg: Config, compute):
    """Run ``compute(request)``; in fp mode with --verify-q, compare against Q."""
    out = compute(cfg.request())
    if cfg.prime is None or not cfg.verify_q:
        return out, None
    exact = compute(replace(cfg.request(), p=None))
    return out, exact


def cmd_hhh(cfg: Config) -> dict:
    b = cfg.braid_word()

    def compute(req):
        return iv.hhh(rq.cached_braid_complex(b), req)

    table, exact = _with_q_reverification(cfg, compute)
    raw = table if not table.normalized else iv.hhh(rq.cached_braid_complex(b), replace(cfg.request(), normalized=False))
    euler = iv.check_euler(b, raw)
    body = {"tables": {"hhh": table.to_json()}, "comparisons": euler["comparisons"],
            "pass": euler["pass"], "braid": cfg.braid, "n": cfg.n, "normalized": table.normalized,
            "euler": {"pass": euler["pass"], "homfly": hk.apoly_str(hk.homfly(b))}}
    if exact is not None:
        body["bad_prime"] = exact.entries != table.entries
        body["pass"] = body["pass"] and not body["bad_prime"]
    return body


def _merge(reports: list) -> dict:
    """Concatenate several check reports into one body, tagging cells by group."""
    cells, tables, extras = [], {}, {}
    for label, rep in reports:
        cells += [dict(c, group=label) for c in rep["comparisons"]]
        tables[label] = rep.get("tables", {})
        extra = {k: v for k, v in rep.items() if k not in ("comparisons", "tables", "pass")}
        if extra:
            extras[label] = extra
    return {"tables": tables, "comparisons": cells, "pass": all(r["pass"] for _, r in reports),
            "groups": {label: {"pass": rep["pass"], **extras.get(label, {})} for label, rep in reports}}


def _bs_word(n: int, text: str) -> tuple:
    word = hk.BraidWord.parse(n, text).letters
    if any(k < 0 for k in word):
        raise ParseError("a Bott-Samelson word takes positive indices only", 1 + next(
            j for j, k in enumerate(word) if k < 0))
    return word


def cmd_verify(cfg: Config, check: str, word: str | None = None, samples: int = 20, seed: int = 0) -> dict:
    if check not in CHECKS:
        raise UnknownCheck(f"unknown check {check!r}; expected one of {', '.join(CHECKS)}")
    n = cfg.n
    if check == "kalman-decat":
        return iv.check_kalman_decat(n, samples, seed)
    req = cfg.request()
    b = cfg.braid_word()
    if check == "serre":
        return iv.check_serre(b, req)
    if check == "kalman-cat":
        return iv.check_kalman_cat(b, req)
    if check == "relative-serre":
        return iv.check_relative_serre(rq.cached_braid_complex(b), req, label=str(b))
    if check == "lw":
        return iv.check_lw(n, req)
    if check == "bruhat":
        return iv.check_bruhat(n, req)
    if check == "markov":
        return iv.check_markov(b, req)
    # duality
    if word is not None:
        words = [_bs_word(n, word)]
    else:
        words = [w for L in range(3) for w in itertools.product(range(1, n), repeat=L)]
    reports = [(f"word:{' '.join(map(str, w)) or 'e'}", iv.check_hh_duality(bm.BSBimodule(n, w), req))
               for w in words]
    if b.letters:
        reports.append((f"complex:{b}", iv.check_complex_duality(b, req)))
    return _merge(reports)


# ---------------------------------------------------------------------------
# output


def render_table(doc: dict) -> str:
    lines = [f"# {doc['schema']}  cutoff={doc['cutoff']}  pass={'yes' if doc['pass'] else 'NO'}"]
    for k, v in sorted(doc["conventions"].items()):
        lines.append(f"#   {k}: {v}")
    for k in ("command", "check", "braid", "n", "homfly"):
        if k in doc:
            lines.append(f"{k}: {doc[k]}")
    tables = doc.get("tables") or {}
    for name, table in sorted(tables.items()):
        if not table:
            continue
        lines.append(f"[{name}]")
        if all(isinstance(v, (int, str)) for v in table.values()):
            for key, v in table.items():
                lines.append(f"  {key:>14}  {v}")
        else:
            for sub, val in table.items():
                lines.append(f"  {sub}: {val}")
    bad = [c for c in doc.get("comparisons", []) if not c.get("pass", True)]
    total = len(doc.get("comparisons", []))
    lines.append(f"comparisons: {total - len(bad)}/{total} pass")
    for c in bad:
        lines.append("  FAIL " + " ".join(f"{k}={c[k]}" for k in sorted(c) if k != "pass"))
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-n", type=int, default=None, help="number of strands")
    common.add_argument("-D", "--cutoff", type=int, default=14, help="internal-degree cutoff (even)")
    common.add_argument("--braid", default=None, help='signed generator indices, e.g. "1 -2 1"')
    common.add_argument("--field", default="q", help="q (exact rationals) or fp:PRIME")
    common.add_argument("--verify-q", action="store_true", help="in fp mode, recompute over Q and compare")
    common.add_argument("-j", "--workers", type=int, default=1, help="processes for per-degree slices")
    common.add_argument("--cache-dir", default=None,
                        help=f"complex cache directory (default ${rq.CACHE_ENV}; unset disables caching)")
    common.add_argument("--output", choices=("json", "table"), default="json")
    common.add_argument("--normalized", action="store_true",
                        help="homfly: Markov-invariant normalisation; hhh: report HH~^k = HH^k(-2k)")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="soergel-kit", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, helptext in (("homfly", "Jones-Ocneanu trace of a braid"),
                           ("hhh", "triply graded homology table of a braid closure")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("word", nargs="?", default=None, help="braid word (alternative to --braid)")
    p = sub.add_parser("verify", parents=[common], help="run one of the duality / vanishing checks")
    p.add_argument("check", help=" | ".join(CHECKS))
    p.add_argument("--word", default=None, help="duality: a single Bott-Samelson word (default: all of length <= 2)")
    p.add_argument("--samples", type=int, default=20, help="kalman-decat: random Hecke elements")
    p.add_argument("--seed", type=int, default=0)
    return ap


def _config(args) -> Config:
    braid = args.braid if args.braid is not None else (getattr(args, "word", None) or "")
    n = args.n
    if n is None:
        letters = [abs(int(t)) for t in braid.split() if t.lstrip("-").isdigit()]
        n = max(letters, default=0) + 1
    return Config(n=n, braid=braid, cutoff=args.cutoff, field=args.field, workers=args.workers,
                  cache_dir=args.cache_dir, output=args.output, normalized=args.normalized,
                  verify_q=args.verify_q)


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_PASS if e.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        if cfg.cache_dir is not None:
            rq.set_cache_dir(cfg.cache_dir)
        if args.command == "homfly":
            body, cutoff = cmd_homfly(cfg), None
        elif args.command == "hhh":
            body, cutoff = cmd_hhh(cfg), cfg.cutoff
        else:
            body = cmd_verify(cfg, args.check, args.word, args.samples, args.seed)
            cutoff = None if args.check == "kalman-decat" else cfg.cutoff
    except (ParseError, UnknownCheck, UsageError, CutoffTooLow, IndexOutOfRange) as e:
        where = f" (token {e.position})" if getattr(e, "position", None) else ""
        print(f"soergel-kit: error: {e}{where}", file=sys.stderr)
        return EXIT_USAGE
    except (ChainConditionViolated, CacheCorrupted, AssertionError) as e:
        print(f"soergel-kit: internal invariant violated: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    doc = iv.report_document(body, cutoff, cfg.field)
    doc["command"] = args.command if args.command != "verify" else f"verify {args.check}"
    print(iv.canonical_json(doc) if cfg.output == "json" else render_table(doc))
    return EXIT_PASS if doc["pass"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
