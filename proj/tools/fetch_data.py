#!/usr/bin/env python3
"""Builds data/adult.csv and data/german.csv from the UCI files.

The UCI files are taken from the `responsibly` wheel, which bundles them.
Pass --wheel to use an already downloaded wheel; otherwise pip fetches it.
"""
import argparse
import csv
import io
import pathlib
import subprocess
import sys
import tempfile
import zipfile

ADULT_COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education_num", "marital_status",
    "occupation", "relationship", "race", "sex", "capital_gain", "capital_loss",
    "hours_per_week", "native_country", "income",
]
GERMAN_COLUMNS = [
    "status", "duration", "credit_history", "purpose", "credit_amount", "savings",
    "employment", "installment_rate", "personal_status", "other_debtors",
    "present_residence", "property", "age", "installment_plans", "housing",
    "existing_credits", "job", "people_liable", "telephone", "foreign_worker",
    "credit",
]


def fetch_wheel(dest):
    subprocess.run([sys.executable, "-m", "pip", "download", "responsibly==0.1.2",
                    "--no-deps", "-d", str(dest)], check=True)
    return next(pathlib.Path(dest).glob("responsibly-*.whl"))


def adult_rows(text):
    for line in text.splitlines():
        if not line.strip() or line.startswith("|"):
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != len(ADULT_COLUMNS):
            raise ValueError("bad Adult line: " + line)
        yield fields


def write_csv(path, header, rows):
    with open(path, "w", newline="") as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        count = 0
        for row in rows:
            writer.writerow(row)
            count += 1
    return count


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--wheel", type=pathlib.Path)
    parser.add_argument("--out", type=pathlib.Path,
                        default=pathlib.Path(__file__).resolve().parent.parent / "data")
    args = parser.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        wheel = args.wheel or fetch_wheel(tmp)
        with zipfile.ZipFile(wheel) as z:
            read = lambda name: z.read("responsibly/dataset/" + name).decode()
            adult = list(adult_rows(read("adult/adult.data")))
            adult += list(adult_rows(read("adult/adult.test")))
            german = [line.split() for line in read("german/german.data").splitlines()
                      if line.strip()]

    args.out.mkdir(parents=True, exist_ok=True)
    n_adult = write_csv(args.out / "adult.csv", ADULT_COLUMNS, adult)
    n_german = write_csv(args.out / "german.csv", GERMAN_COLUMNS, german)
    print(f"adult.csv: {n_adult} rows, german.csv: {n_german} rows")


if __name__ == "__main__":
    main()
