import sys
from pathlib import Path

# Make tests/reference.py and friends importable as plain modules.
sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent.parent / "fixtures"
