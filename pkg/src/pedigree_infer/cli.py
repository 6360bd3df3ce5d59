"""Command-line interface.

Subcommands: validate, predict, smooth, simulate, serve. Exit codes: 0 on
success, 1 on a domain error (invalid pedigree, impossible evidence with
nothing to rank, bad evidence spec), 2 on usage errors. With --json, stdout
carries exactly one canonical JSON document.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .engine import EvidenceError, ImpossibleEvidenceError
from .jsonio import canonical_json
from .mendel import Pattern, SimulationError
from .pedigree import Pedigree, PedigreeError, parse_pedigree
from .workflows import (
    evidence_from_spec,
    predict_document,
    simulate_document,
    smooth_document,
    violations_document,
)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


@dataclass
class RunConfig:
    """Parsed invocation; defaults follow the standard protocol values."""

    command: str
    input: str | None = None
    pattern: str | None = None
    evidence: str | None = None
    force: list[str] | None = None
    samples: int = 100
    prior_strength: float = 1_000_000.0
    threshold: float = 0.8
    seed: int = 0
    output: str | None = None
    port: int = 8000
    host: str = "127.0.0.1"
    json: bool = False
    pairwise: bool = False
    latents: bool = False
    carrier_evidence: bool = True


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pedigree-infer",
        description="Genotype smoothing and inheritance-pattern prediction "
                    "on family pedigrees.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, with_evidence: bool = True,
                   samples_default: int | None = None) -> None:
        p.add_argument("--input", required=True, help="pedigree JSON file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--prior-strength", type=float, default=1_000_000.0,
                       dest="prior_strength")
        p.add_argument("--json", action="store_true",
                       help="emit canonical JSON on stdout")
        p.add_argument("--output", help="write the JSON document here as well")
        if samples_default is not None:
            p.add_argument("--samples", type=int, default=samples_default)
        if with_evidence:
            p.add_argument("--evidence", help="evidence JSON file "
                           "({person id: [state label, ...]})")
            p.add_argument("--force", action="append", default=[],
                           metavar="ID=STATE[,STATE...]",
                           help="inline evidence; repeatable")
            p.add_argument("--no-carrier-evidence", action="store_true",
                           help="do not restrict affected persons to "
                           "disease-expressing genotypes")

    p_validate = sub.add_parser("validate", help="check pedigree invariants")
    p_validate.add_argument("--input", required=True)
    p_validate.add_argument("--json", action="store_true")
    p_validate.add_argument("--output")

    p_predict = sub.add_parser("predict",
                               help="rank AD/AR/XL by Monte Carlo marginal likelihood")
    add_common(p_predict, samples_default=100)
    p_predict.add_argument("--threshold", type=float, default=0.8)
    p_predict.add_argument("--evidence-pattern", dest="evidence_pattern",
                           choices=[p.value for p in Pattern],
                           help="pattern the evidence labels belong to; "
                           "enables dose translation to the other patterns")

    p_smooth = sub.add_parser("smooth",
                              help="per-person genotype posteriors under one pattern")
    add_common(p_smooth, samples_default=1)
    p_smooth.add_argument("--pattern", required=True,
                          choices=[p.value for p in Pattern])
    p_smooth.add_argument("--pairwise", action="store_true",
                          help="include child-given-parents tables")
    p_smooth.add_argument("--dump-params", dest="dump_params", metavar="FILE",
                          help="write the sampled parameter tables (audit)")

    p_simulate = sub.add_parser("simulate",
                                help="forward-sample phenotypes onto the structure")
    add_common(p_simulate, with_evidence=False)
    p_simulate.add_argument("--pattern", required=True,
                            choices=[p.value for p in Pattern])
    p_simulate.add_argument("--latents", action="store_true",
                            help="include sampled genotype labels")
    p_simulate.add_argument("--dump-params", dest="dump_params", metavar="FILE",
                            help="write the sampled parameter tables (audit)")

    p_serve = sub.add_parser("serve", help="run the HTTP JSON API")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")
    return parser


def _load_pedigree(path: str) -> Pedigree:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise PedigreeError(f"cannot read {path}: {exc}") from exc
    return parse_pedigree(data)


def _evidence_spec(args: argparse.Namespace) -> dict[str, list[str]] | None:
    spec: dict[str, list[str]] = {}
    if getattr(args, "evidence", None):
        import json
        try:
            raw = json.loads(Path(args.evidence).read_text())
        except (OSError, ValueError) as exc:
            raise EvidenceError(f"cannot read evidence file: {exc}") from exc
        if not isinstance(raw, dict):
            raise EvidenceError("evidence file must map person id to state labels")
        for pid, labels in raw.items():
            if isinstance(labels, str):
                labels = [s for s in labels.split(",") if s]
            spec[pid] = list(labels)
    for item in getattr(args, "force", []) or []:
        if "=" not in item:
            raise EvidenceError(f"--force needs ID=STATE[,STATE...], got {item!r}")
        pid, _, states = item.partition("=")
        labels = [s for s in states.split(",") if s]
        if not labels:
            raise EvidenceError(f"--force {item!r} names no states")
        spec.setdefault(pid, [])
        spec[pid].extend(labels)
    return spec or None


def _emit(args: argparse.Namespace, doc: dict, human: str) -> None:
    text = canonical_json(doc)
    if getattr(args, "json", False):
        print(text)
    else:
        print(human)
    output = getattr(args, "output", None)
    if output:
        Path(output).write_text(text + "\n")


def _human_validate(doc: dict) -> str:
    rows = doc["violations"]
    if not rows:
        return "ok: no violations"
    return "\n".join(f"[{v['severity']}] {v['rule']}: {v['message']}" for v in rows)


def _human_predict(doc: dict) -> str:
    if doc.get("error"):
        return "impossible: evidence has zero probability under every pattern"
    lines = [f"predicted: {doc['predicted']} "
             f"({'confident' if doc['confident'] else 'inconclusive'})"]
    for name, value in doc["posterior"].items():
        lines.append(f"  {name}: {value:.4f}")
    return "\n".join(lines)


def _human_smooth(doc: dict) -> str:
    if doc["log_marginal"] == float("-inf"):
        return "impossible: evidence has zero probability under this pattern"
    lines = [f"log marginal: {doc['log_marginal']:.6f} "
             f"(anchor spread {doc['audit']['anchor_spread']:.2e}, "
             f"fvs {doc['audit']['fvs']})"]
    for pid, states in doc["posteriors"].items():
        body = ", ".join(f"{label}={p:.4f}" for label, p in states.items())
        lines.append(f"  {pid}: {body}")
    return "\n".join(lines)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except (PedigreeError, EvidenceError, SimulationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ImpossibleEvidenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "validate":
        # validate must report violations rather than refuse to parse
        import json as _json
        try:
            raw = Path(args.input).read_bytes()
            doc = _json.loads(raw)
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_DOMAIN
        from .pedigree import pedigree_from_document
        try:
            pedigree = pedigree_from_document(doc)
        except PedigreeError as exc:
            payload = {"violations": [{
                "rule": "malformed-document", "ids": [],
                "message": str(exc), "severity": "error"}]}
            _emit(args, payload, _human_validate(payload))
            return EXIT_DOMAIN
        payload, has_errors = violations_document(pedigree)
        _emit(args, payload, _human_validate(payload))
        return EXIT_DOMAIN if has_errors else EXIT_OK

    if args.command == "serve":
        from .service import run_server
        run_server(host=args.host, port=args.port)
        return EXIT_OK

    pedigree = _load_pedigree(args.input)

    if args.command == "predict":
        spec = _evidence_spec(args)
        evidence_pattern = Pattern(args.evidence_pattern) if args.evidence_pattern else None
        doc, possible = predict_document(
            pedigree, spec, evidence_pattern, samples=args.samples,
            strength=args.prior_strength, threshold=args.threshold,
            seed=args.seed,
            carrier_evidence=not args.no_carrier_evidence)
        _emit(args, doc, _human_predict(doc))
        return EXIT_OK if possible else EXIT_DOMAIN

    if args.command == "smooth":
        pattern = Pattern(args.pattern)
        evidence = evidence_from_spec(pedigree, pattern, _evidence_spec(args))
        doc = smooth_document(
            pedigree, pattern, evidence, samples=args.samples,
            strength=args.prior_strength, seed=args.seed,
            carrier_evidence=not args.no_carrier_evidence,
            pairwise=args.pairwise)
        _dump_params(args, pattern)
        _emit(args, doc, _human_smooth(doc))
        return EXIT_OK if doc["log_marginal"] != float("-inf") else EXIT_DOMAIN

    if args.command == "simulate":
        doc = simulate_document(
            pedigree, Pattern(args.pattern), strength=args.prior_strength,
            seed=args.seed, with_latents=args.latents)
        _dump_params(args, Pattern(args.pattern))
        human = canonical_json(doc)
        _emit(args, doc, human)
        return EXIT_OK

    raise AssertionError(f"unhandled command {args.command!r}")


def _dump_params(args: argparse.Namespace, pattern: Pattern) -> None:
    path = getattr(args, "dump_params", None)
    if not path:
        return
    from .mendel import build_priors, parameters_to_document, sample_parameters
    from .predictor import _draw_seed
    params = sample_parameters(build_priors(pattern, args.prior_strength),
                               _draw_seed(args.seed, pattern, 0))
    Path(path).write_text(canonical_json(parameters_to_document(params)) + "\n")


if __name__ == "__main__":
    sys.exit(main())
