"""Run one verification suite over a seeded corpus and write JSON and CSV reports.

    python scripts/run_corpus.py --suite section2 --family perturbed_ball --count 100 --seed 7 --cf 1
"""

import argparse
from pathlib import Path

from baryiso.corpus import FAMILIES
from baryiso.harness import SUITES, HarnessConfig, dumps, family_jobs, report_document, reports_csv, run_batch


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--suite", choices=SUITES, default="section2")
    ap.add_argument("--family", choices=FAMILIES, default="perturbed_ball")
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--cf", type=float, required=True)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()

    config = HarnessConfig(cf=args.cf)
    jobs = family_jobs(args.suite, args.family, args.count, args.seed, args.n, config)
    reports = list(run_batch(jobs, args.workers))
    run = {"suite": args.suite, "family": args.family, "count": args.count, "seed": args.seed, "n": args.n,
           "config": config.to_dict()}
    doc = report_document(reports, run)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{args.suite}-{args.family}-n{args.n}-s{args.seed}"
    (out / f"{stem}.json").write_text(dumps(doc))
    (out / f"{stem}.csv").write_text(reports_csv(reports))

    s = doc["summary"]
    print(f"{s['passed']}/{s['items']} passed, {s['errors']} errors")
    for name, k in sorted(s["failing_checks"].items()):
        print(f"  {name}: {k}")
    for key in ("branch_frequency", "atlo_orientation"):
        if key in s:
            print(f"{key}: {s[key]}")
    print(f"wrote {out / stem}.json and .csv")


if __name__ == "__main__":
    main()
