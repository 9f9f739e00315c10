"""Shared helpers for the experiment scripts."""
import argparse
from pathlib import Path

from bubble_upg import report


def out_dir(description: str) -> Path:
    ap = argparse.ArgumentParser(description=description)
    ap.add_argument("--out-dir", default="results", help="directory for CSV/Markdown/SVG output")
    d = Path(ap.parse_args().out_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d


def save_study(result, d: Path, stem: str, title: str):
    (d / f"{stem}.csv").write_text(report.to_csv(result))
    (d / f"{stem}.md").write_text(report.to_markdown(result, title))
    (d / f"{stem}.svg").write_text(report.to_svg(result))
    print(report.to_markdown(result, title))
