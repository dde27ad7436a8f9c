# Copyright 2026 The qnet Authors
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
"""Independent composition of the end-to-end fidelity chain.

Usage: python3 fidelity_chain.py [distance_m ...]
"""

import math
import sys

XI_PER_KM = 0.2
COHERENCE_TIME_S = 2.43e-3
PROCESSING_DELAY_S = 4e-6
LIGHT_SPEED = 3e8


def end_to_end_fidelity(d):
    f0 = max(math.exp(-XI_PER_KM * d / 1000.0), 0.25)
    w = (4.0 * f0 - 1.0) / 3.0
    w *= math.exp(-(d / LIGHT_SPEED + PROCESSING_DELAY_S) / COHERENCE_TIME_S)
    return (3.0 * w + 1.0) / 4.0


if __name__ == "__main__":
    distances = [float(a) for a in sys.argv[1:]] or [150.0, 500.0, 550.0]
    for d in distances:
        print(f"d={d:g} F={end_to_end_fidelity(d):.12f}")
