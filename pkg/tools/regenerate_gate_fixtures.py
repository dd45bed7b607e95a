"""Regenerate the calibrated gate fixtures shipped with the package.

Runs the exhaustive calibration search for each gate kind and commits
the winning placement (RLE body plus key=value sidecar) under the
package fixture directory.  Calibration is deterministic, so rerunning
this script on an unchanged engine reproduces the files byte for byte.
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from lifelogic.components import GATE_KINDS, calibrate, save_gate_fixture


def main() -> None:
    for kind in GATE_KINDS:
        start = time.time()
        template = calibrate(kind)
        save_gate_fixture(template)
        print(
            f"{kind}: probe_generation={template.probe_generation} "
            f"components={len(template.components)} ({time.time() - start:.1f}s)"
        )


if __name__ == "__main__":
    main()
