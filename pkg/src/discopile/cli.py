"""``discopile`` command line.

Exit codes: 0 ok, 1 unknown token or I/O/parse failure, 2 ungrammatical
or incompatible input, 3 NaN loss. Output files are written to a
temporary sibling and renamed into place, so a failed run leaves none.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Sequence

from . import __version__
from .ansatz import AnsatzConfig, ParamStore
from .corpus import EXPERIMENT_ANSATZ, builtin_corpus, load_corpus
from .errors import (
    IncompatibleShapes,
    NanLoss,
    NotGrammatical,
    ParseError,
    UnboundParam,
    UnknownToken,
)
from .experiment import run_experiment
from .mixer import prediction_plan
from .pregroup import Lexicon, builtin_lexicon, is_grammatical, reduce, type_of_sentence
from .semantics import RHO_FALSE, RHO_TRUE, fidelity, von_neumann_entropy
from .train import SpsaConfig, train

EXIT_OK, EXIT_IO, EXIT_GRAMMAR, EXIT_NAN = 0, 1, 2, 3


def tokenize(sentence: str) -> list[str]:
    return sentence.lower().replace(".", " ").split()


def atomic_write(path: str | Path, data: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data.encode("utf-8"))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _lexicon(path: str | None) -> Lexicon:
    return Lexicon.load(path) if path else builtin_lexicon()


def _ansatz(args) -> AnsatzConfig:
    return AnsatzConfig(layers=args.layers)


def cmd_parse(args) -> int:
    lex = _lexicon(args.lexicon)
    tokens = tokenize(" ".join(args.sentence))
    t = type_of_sentence(tokens, lex)
    trace = reduce(t)
    ok = is_grammatical(t)
    print(f"type: {t.pretty()}")
    print("cups: " + " ".join(f"({i},{j})" for i, j in trace.cups))
    print(f"residue: {trace.residue.pretty()}")
    print("grammatical" if ok else "not grammatical")
    return EXIT_OK if ok else EXIT_GRAMMAR


def cmd_train(args) -> int:
    corpus = load_corpus(args.corpus) if args.corpus else builtin_corpus()
    spsa = SpsaConfig(iterations=args.iters, seed=args.seed, shots=args.shots, a=args.a, c=args.c)
    params, log = train(corpus.sentences, _ansatz(args), spsa, _lexicon(args.lexicon))
    atomic_write(args.out, params.dumps())
    atomic_write(args.log, log.to_csv())
    acc, kappa, f1 = log.final
    print(json.dumps({"accuracy": acc, "kappa": kappa, "f1": f1}))
    return EXIT_OK


def cmd_mix(args) -> int:
    lex = _lexicon(args.lexicon)
    params = ParamStore.load(args.params)
    a, b = tokenize(args.sentence_a), tokenize(args.sentence_b)
    res = prediction_plan(a, b, lex, _ansatz(args), (args.p, 1.0 - args.p)).run(params)
    rho = res.rho.matrix
    print(json.dumps({
        "entropy": von_neumann_entropy(rho),
        "fid_true": fidelity(rho, RHO_TRUE),
        "fid_false": fidelity(rho, RHO_FALSE),
        "branch_weights": list(res.branch_weights),
    }))
    return EXIT_OK


def cmd_experiment(args) -> int:
    corpus = load_corpus(args.corpus) if args.corpus else builtin_corpus()
    params = ParamStore.load(args.params)
    report = run_experiment(corpus, params, _ansatz(args), _lexicon(args.lexicon))
    atomic_write(args.out, report.dumps())
    print(json.dumps({k: v for k, v in report.to_dict().items() if k != "pairs"}))
    return EXIT_OK


def read_log(text: str) -> list[tuple[int, float, float]]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["iter", "loss", "accuracy"]:
        raise ParseError("expected header 'iter,loss,accuracy'", 1)
    out = []
    for n, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        try:
            i, loss, acc = row
            out.append((int(i), float(loss), float(acc)))
        except ValueError:
            raise ParseError(f"bad row {','.join(row)!r}", n) from None
    if not out:
        raise ParseError("log has no rows", 1)
    return out


W, H, ML, MR, MT, MB = 640, 400, 60, 60, 20, 40
N_TICKS = 5


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def render_svg(rows: Sequence[tuple[int, float, float]]) -> str:
    """Loss (left axis) and accuracy (right axis, 0..1) against iteration."""
    iters = [r[0] for r in rows]
    x0, x1 = min(iters), max(iters)
    xspan = (x1 - x0) or 1
    lmax = max(max(r[1] for r in rows), 1e-12)
    pw, ph = W - ML - MR, H - MT - MB

    def px(i):
        return ML + pw * (i - x0) / xspan

    def py(frac):
        return MT + ph * (1.0 - frac)

    loss_pts = " ".join(f"{_fmt(px(i))},{_fmt(py(l / lmax))}" for i, l, _ in rows)
    acc_pts = " ".join(f"{_fmt(px(i))},{_fmt(py(a))}" for i, _, a in rows)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<line class="axis" x1="{ML}" y1="{MT + ph}" x2="{ML + pw}" y2="{MT + ph}" stroke="black"/>',
        f'<line class="axis" x1="{ML}" y1="{MT}" x2="{ML}" y2="{MT + ph}" stroke="black"/>',
        f'<line class="axis" x1="{ML + pw}" y1="{MT}" x2="{ML + pw}" y2="{MT + ph}" stroke="black"/>',
    ]
    for k in range(N_TICKS):
        frac = k / (N_TICKS - 1)
        xi = x0 + xspan * frac
        x, y = _fmt(px(xi)), _fmt(py(frac))
        out.append(f'<text class="xtick" x="{x}" y="{H - MB + 16}" font-size="11" text-anchor="middle">{xi:g}</text>')
        out.append(f'<text class="ltick" x="{ML - 6}" y="{y}" font-size="11" text-anchor="end">{lmax * frac:.3g}</text>')
        out.append(f'<text class="rtick" x="{ML + pw + 6}" y="{y}" font-size="11">{frac:.2f}</text>')
    out += [
        f'<text x="{ML + pw / 2:g}" y="{H - 4}" font-size="12" text-anchor="middle">iteration</text>',
        f'<polyline id="loss" fill="none" stroke="#c0392b" stroke-width="1.5" points="{loss_pts}"/>',
        f'<polyline id="accuracy" fill="none" stroke="#2471a3" stroke-width="1.5" points="{acc_pts}"/>',
        f'<text x="{ML + 8}" y="{MT + 14}" font-size="12" fill="#c0392b">loss</text>',
        f'<text x="{ML + 8}" y="{MT + 30}" font-size="12" fill="#2471a3">accuracy</text>',
        "</svg>",
    ]
    return "\n".join(out) + "\n"


def cmd_plot(args) -> int:
    rows = read_log(Path(args.log).read_text(encoding="utf-8"))
    atomic_write(args.out, render_svg(rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="discopile", description="Compile, train and mix DisCoCat circuits.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, layers=True):
        sp.add_argument("--lexicon", help="TSV lexicon (default: bundled)")
        if layers:
            sp.add_argument("--layers", type=int, default=EXPERIMENT_ANSATZ.layers,
                            help="IQP layers for multi-qubit words (default: %(default)s)")

    sp = sub.add_parser("parse", help="type a sentence and report its reduction")
    sp.add_argument("sentence", nargs="+")
    common(sp, layers=False)
    sp.set_defaults(fn=cmd_parse)

    sp = sub.add_parser("train", help="fit word parameters with SPSA")
    sp.add_argument("--corpus", help="TSV corpus (default: bundled)")
    sp.add_argument("--out", required=True, help="parameter JSON to write")
    sp.add_argument("--log", required=True, help="loss CSV to write")
    sp.add_argument("--iters", type=int, default=300)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--shots", type=int, default=None, help="shot count (default: exact)")
    sp.add_argument("--a", type=float, default=SpsaConfig.a, help="SPSA step scale")
    sp.add_argument("--c", type=float, default=SpsaConfig.c, help="SPSA perturbation scale")
    common(sp)
    sp.set_defaults(fn=cmd_train)

    sp = sub.add_parser("mix", help="mixture over the predictions for two sentences")
    sp.add_argument("--sentence-a", required=True)
    sp.add_argument("--sentence-b", required=True)
    sp.add_argument("--params", required=True)
    sp.add_argument("--p", type=float, default=0.5, help="prior of sentence A")
    common(sp)
    sp.set_defaults(fn=cmd_mix)

    sp = sub.add_parser("experiment", help="entropy and fidelity over cross-category pairs")
    sp.add_argument("--corpus", help="TSV corpus (default: bundled)")
    sp.add_argument("--params", required=True)
    sp.add_argument("--out", required=True, help="report JSON to write")
    common(sp)
    sp.set_defaults(fn=cmd_experiment)

    sp = sub.add_parser("plot", help="render a loss CSV as SVG")
    sp.add_argument("--log", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=cmd_plot)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (UnknownToken, UnboundParam) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except (NotGrammatical, IncompatibleShapes) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_GRAMMAR
    except NanLoss as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NAN
    except (OSError, ParseError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
