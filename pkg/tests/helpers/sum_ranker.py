"""Test ranker: reads `id,<attrs>` CSV on stdin, prints ids by descending attribute sum (ties by id).

`--fail` exits non-zero, `--drop` leaves out the last id, `--sleep S` stalls first.
`--centered` ranks by closeness of the sum to the mean sum, so every tuple
matters to every other tuple's place.
"""
import sys
import time

import pandas as pd


def main(argv):
    if "--sleep" in argv:
        time.sleep(float(argv[argv.index("--sleep") + 1]))
    if "--fail" in argv:
        print("ranker failed on purpose", file=sys.stderr)
        return 4
    frame = pd.read_csv(sys.stdin, dtype={"id": str})
    frame["score"] = frame.drop(columns=["id"]).sum(axis=1)
    if "--centered" in argv:
        frame["score"] = -(frame["score"] - frame["score"].mean()).abs()
    frame = frame.sort_values(["score", "id"], ascending=[False, True], kind="stable")
    ids = list(frame["id"])
    if "--drop" in argv:
        ids = ids[:-1]
    sys.stdout.write("\n".join(ids) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
