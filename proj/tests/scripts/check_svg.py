"""Builds a mesh through the CLI and checks the SVG parses with one polygon per cell per panel."""

import json
import pathlib
import subprocess
import sys
import xml.etree.ElementTree as ET

NS = "{http://www.w3.org/2000/svg}"


def main() -> int:
    tool, workdir = sys.argv[1], pathlib.Path(sys.argv[2])
    workdir.mkdir(parents=True, exist_ok=True)
    profile = workdir / "profile.csv"
    profile.write_text("t_end,xi1,xi2\n1,2,0\n2,0,2\n3,2,0\n")
    mesh, svg = workdir / "mesh.json", workdir / "mesh.svg"
    subprocess.run([tool, "build", "--profile", str(profile), "--slip", "0,1", "--h", "0.05",
                    "--out", str(mesh), "--svg", str(svg)], check=True, stdout=subprocess.DEVNULL)
    cells = len(json.loads(mesh.read_text())["cells"])
    root = ET.parse(svg).getroot()
    failures = 0
    for panel in ("reference", "deformed"):
        group = root.find(f".//{NS}g[@id='{panel}']")
        count = 0 if group is None else len(group.findall(f"{NS}polygon"))
        if count != cells:
            print(f"{panel}: {count} polygons, expected {cells}")
            failures += 1
    print(f"{cells} cells, {'ok' if failures == 0 else 'mismatch'}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
