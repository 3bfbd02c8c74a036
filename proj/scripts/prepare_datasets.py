#!/usr/bin/env python3
# Copyright 2026 The rffgam Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the benchmark CSVs consumed by the rffgam CLI and acceptance run.

california_housing.csv: the 20640-row StatLib table with columns MedInc,
HouseAge, AveRooms, AveBedrms, Population, AveOccup, Latitude, Longitude and
target MedHouseVal (units of 100k USD).

airfoil_self_noise.csv: the 1503-row NASA table with columns log_frequency,
angle_of_attack, chord_length, free_stream_velocity,
suction_side_displacement_thickness and target scaled_sound_pressure (dB).
The frequency column is stored as its natural logarithm.
"""

import argparse
import glob
import io
import logging
import os
import subprocess
import sys
import tempfile
import urllib.request
import zipfile

import numpy as np
import pandas as pd

CALIFORNIA_COLUMNS = [
    "MedInc", "HouseAge", "AveRooms", "AveBedrms", "Population", "AveOccup",
    "Latitude", "Longitude", "MedHouseVal",
]
AIRFOIL_URL = ("https://archive.ics.uci.edu/ml/machine-learning-databases/"
               "00291/airfoil_self_noise.dat")
AIRFOIL_COLUMNS = [
    "log_frequency", "angle_of_attack", "chord_length", "free_stream_velocity",
    "suction_side_displacement_thickness", "scaled_sound_pressure",
]

log = logging.getLogger("prepare_datasets")


def california_from_sklearn():
    from sklearn.datasets import fetch_california_housing
    bunch = fetch_california_housing(as_frame=True)
    return bunch.frame


def california_from_wheel():
    # pytorch-widedeep ships the same table as a parquet file.
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps",
                        "-q", "-d", tmp, "pytorch-widedeep"], check=True)
        wheel = glob.glob(os.path.join(tmp, "pytorch_widedeep-*.whl"))[0]
        blob = zipfile.ZipFile(wheel).read(
            "pytorch_widedeep/datasets/data/california_housing.parquet.brotli")
    return pd.read_parquet(io.BytesIO(blob))


def prepare_california(out_dir):
    try:
        df = california_from_sklearn()
    except Exception as e:  # network or cache failure
        log.warning("sklearn fetch failed (%s); trying the pytorch-widedeep wheel", e)
        df = california_from_wheel()
    df = df[CALIFORNIA_COLUMNS]
    if len(df) != 20640:
        raise RuntimeError(f"expected 20640 California rows, got {len(df)}")
    path = os.path.join(out_dir, "california_housing.csv")
    df.to_csv(path, index=False, float_format="%.10g")
    log.info("wrote %s (%d rows)", path, len(df))


def prepare_airfoil(out_dir, source=None):
    if source:
        with open(source, "rb") as f:
            raw = f.read()
    else:
        with urllib.request.urlopen(AIRFOIL_URL, timeout=60) as r:
            raw = r.read()
    table = np.loadtxt(io.BytesIO(raw))
    if table.shape != (1503, 6):
        raise RuntimeError(f"unexpected Airfoil shape {table.shape}")
    table[:, 0] = np.log(table[:, 0])
    df = pd.DataFrame(table, columns=AIRFOIL_COLUMNS)
    path = os.path.join(out_dir, "airfoil_self_noise.csv")
    df.to_csv(path, index=False, float_format="%.10g")
    log.info("wrote %s (%d rows)", path, len(df))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default=os.path.join(
        os.path.dirname(os.path.abspath(__file__)), "..", "data"))
    parser.add_argument("--airfoil-source",
                        help="local copy of airfoil_self_noise.dat")
    parser.add_argument("--only", choices=["california", "airfoil"])
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    os.makedirs(args.out, exist_ok=True)
    failed = False
    if args.only in (None, "california"):
        prepare_california(args.out)
    if args.only in (None, "airfoil"):
        try:
            prepare_airfoil(args.out, args.airfoil_source)
        except Exception as e:
            log.error("Airfoil preparation failed: %s", e)
            failed = True
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
