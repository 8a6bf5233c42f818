"""Command line entry point: ``hmfg-plot --spec <json>``."""

from __future__ import annotations

import argparse
import json
import sys

from .plots import PlotError, PlotSpec, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hmfg-plot",
        description="Render solver CSV artifacts as PNG and SVG figures")
    parser.add_argument("--spec", required=True,
                        help="JSON plot spec (inputs, kind, output, labels)")
    args = parser.parse_args(argv)
    try:
        try:
            with open(args.spec) as fh:
                doc = json.load(fh)
        except FileNotFoundError:
            raise PlotError(f"spec file not found: {args.spec}")
        except json.JSONDecodeError as exc:
            raise PlotError(f"malformed spec JSON in {args.spec}: {exc}")
        for path in render(PlotSpec.from_dict(doc)):
            print(path)
        return 0
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
