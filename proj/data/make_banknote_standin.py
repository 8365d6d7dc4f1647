# Copyright 2026 The admmdfo Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates data/banknote.csv, a synthetic stand-in for the banknote
authentication dataset (same schema: variance, skewness, curtosis, entropy,
class; 1372 rows, 762 negatives / 610 positives; class-conditional moments
close to the published ones). Deterministic for a fixed seed."""

import numpy as np

rng = np.random.default_rng(1372)

# class 0: 762 rows; class 1: 610 rows
SPECS = [
    (762, np.array([2.78, 5.86, 0.80, -1.15]),
     np.array([1.52, 3.84, 3.24, 2.12]), 0),
    (610, np.array([-2.37, -2.09, 2.15, -1.25]),
     np.array([1.50, 4.10, 4.26, 2.07]), 1),
]

rows = []
for count, mean, std, label in SPECS:
    feats = rng.normal(mean, std, size=(count, 4))
    # mild skew in the second and third features, as in the original
    feats[:, 1] += 0.15 * feats[:, 0] ** 2 - 0.4
    feats[:, 2] -= 0.12 * feats[:, 1] * np.sign(feats[:, 0])
    for f in feats:
        rows.append((f, label))

order = rng.permutation(len(rows))
with open("banknote.csv", "w") as out:
    for idx in order:
        f, label = rows[idx]
        out.write(f"{f[0]:.5f},{f[1]:.5f},{f[2]:.5f},{f[3]:.5f},{label}\n")
print(f"wrote {len(rows)} rows")
