"""CLI invocations covered by golden files; run this module to regenerate them."""

from pathlib import Path

GOLDEN = Path(__file__).parent / "golden"

CASES = {
    "simulate.csv": ["simulate", "--graph", "line", "--n", "3", "--m", "3", "--s", "3/2", "--replicas", "3",
                     "--sample-times", "0.5,2,5", "--seed", "4"],
    "mabb.csv": ["mabb", "--graph", "cycle", "--n", "3", "--m", "3", "--s", "1", "--replicas", "3",
                 "--sample-times", "1,4", "--seed", "4", "--start", "1,1,1", "--marked", "2"],
    "cham_summary.csv": ["cham", "--n", "3", "--m", "3", "--s", "1", "--replicas", "5", "--seed", "4",
                         "--start", "2,1,0"],
    "cham_samples.csv": ["cham", "--n", "4", "--m", "4", "--s", "1/2", "--replicas", "2", "--seed", "1",
                         "--sample-times", "1,10", "--mode", "modified", "--T", "5"],
    "meet.csv": ["meet", "--graph", "cycle", "--n", "4"],
    "meet_mc.json": ["meet", "--graph", "line", "--n", "3", "--replicas", "500", "--seed", "2"],
    "mix_exact.json": ["mix-exact", "--n", "2", "--m", "2", "--sample-times", "0,1,2"],
    "mix_mc.csv": ["mix-mc", "--n", "2", "--m", "2", "--replicas", "200", "--sample-times", "0.5,1"],
    "lower_bound.json": ["lower-bound", "--n", "10", "--m", "10", "--s", "1"],
    "bounds.json": ["bounds", "--n", "3", "--m", "3", "--s", "2"],
    "replay.json": ["replay-appendix-c"],
}


def strip_version(text: str) -> str:
    return "\n".join(line for line in text.splitlines()
                     if not line.startswith("# version=") and not line.strip().startswith('"version"'))


def regenerate():
    from bbsplit.cli import main
    GOLDEN.mkdir(exist_ok=True)
    for name, argv in CASES.items():
        assert main(argv + ["--out", str(GOLDEN / name)]) == 0


if __name__ == "__main__":
    regenerate()
