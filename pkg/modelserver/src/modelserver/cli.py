"""Command line: pick a model, pick a transport, serve.

    regionlogic-modelserver --mode stdio --formula spec.json
    regionlogic-modelserver --mode http --port 8765 --constant cat
    regionlogic-modelserver --mode http --classifier resnet18 --vocab classes.txt
"""

from __future__ import annotations

import argparse
import sys

from .models import ConstantModel, FormulaModel, TorchvisionClassifier, load_vocab
from .server import ServerConfig, serve


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regionlogic-modelserver",
        description="Reference prediction server for the regionlogic remote protocol",
    )
    parser.add_argument("--mode", choices=("stdio", "http"), default="stdio")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8765)
    kind = parser.add_mutually_exclusive_group(required=True)
    kind.add_argument("--formula", metavar="SPEC_JSON", help="boolean-formula test model")
    kind.add_argument("--constant", metavar="LABEL", help="always answer this label")
    kind.add_argument("--classifier", metavar="ARCH", help="torchvision architecture name")
    parser.add_argument("--weights", help="state-dict file for --classifier")
    parser.add_argument("--vocab", help="class-name file for --classifier, one per line")
    return parser


def build_model(args):
    if args.formula:
        return FormulaModel(args.formula)
    if args.constant:
        return ConstantModel(args.constant)
    if not args.vocab:
        raise ValueError("--classifier requires --vocab")
    return TorchvisionClassifier(args.classifier, load_vocab(args.vocab), args.weights)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        model = build_model(args)
    except (ValueError, OSError, RuntimeError) as exc:
        sys.stderr.write(f"modelserver: {exc}\n")
        return 2
    serve(model, ServerConfig(mode=args.mode, host=args.host, port=args.port))
    return 0


if __name__ == "__main__":
    sys.exit(main())
