import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
GOLDEN_DIR = ROOT / "protocol" / "golden"

sys.path.insert(0, str(ROOT / "tools"))
