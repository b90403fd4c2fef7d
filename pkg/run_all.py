"""
run_all.py

The Master Switch.
1. Clears old figure datasets.
2. Regenerates every figure bundle into data/figures/.
3. Runs the verification suite.
"""

import os
import subprocess
import sys
from pathlib import Path

# CONFIG
PROJECT_ROOT = Path(__file__).parent
DATA_DIR = PROJECT_ROOT / "data"
FIGURES_DIR = DATA_DIR / "figures"


def clean_old_results():
    """Deletes old CSV files to avoid mixing runs."""
    if FIGURES_DIR.exists():
        print("🧹 Cleaning old figure datasets...")
        for f in os.listdir(FIGURES_DIR):
            if f.endswith(".csv") or f == "INDEX.md":
                os.remove(FIGURES_DIR / f)


def generate_figures():
    print("🚀 Generating figure datasets...")
    cmd = ["uv", "run", "python", "-m", "src.main", "figures", "all", "--out", str(FIGURES_DIR)]
    subprocess.run(cmd, check=True)


def run_verification():
    print("🔎 Running verification suite...")
    cmd = ["uv", "run", "python", "-m", "src.main", "verify"]
    subprocess.run(cmd, check=True)


if __name__ == "__main__":
    print("=== MAGNON SQUEEZE COOLING BATCH RUNNER ===")

    # 1. Cleanup
    clean_old_results()

    # 2. Datasets
    try:
        generate_figures()
    except subprocess.CalledProcessError:
        print("❌ Figure generation failed. Stopping.")
        sys.exit(1)

    # 3. Acceptance
    try:
        run_verification()
    except subprocess.CalledProcessError:
        print("❌ Verification failed.")
        sys.exit(1)

    print(f"\n✅ DONE! Datasets are in {FIGURES_DIR}, see INDEX.md.")
