"""Compare the compiled kernels against the pure-numpy fallback.

Times the two hot loops (split-operator propagation and instantaneous-frame
sweeps) on a default-sized workload and prints per-backend timings plus the
speedup.  Run as:  python benchmarks/bench_kernels.py [repeats]
"""

import sys
import time

import numpy as np

from dimerhhg import ModelSpec, PulseSpec, build_geometry, build_h0, solve_static
from dimerhhg.kernels import _pykernels
from dimerhhg.laser import electric_field, time_grid
from dimerhhg.propagator import half_step_exponential

try:
    from dimerhhg.kernels import _ckernels
except ImportError:
    _ckernels = None


def workload():
    model = ModelSpec()
    pulse = PulseSpec()
    geometry = build_geometry(model)
    h0 = build_h0(model)
    eig = solve_static(h0)
    times = time_grid(pulse)
    efield_mid = electric_field(pulse, times[:-1] + 0.5 * pulse.dt)
    efield = electric_field(pulse, times)
    psi0 = eig.states[:, :2].astype(complex)
    exp_half = half_step_exponential(eig, pulse.dt)
    return {
        "propagate": (psi0, exp_half, geometry.sites, efield_mid, pulse.dt),
        "frames": (h0, geometry.sites, efield, eig.states),
    }


def best_of(fn, args, repeats):
    timings = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        timings.append(time.perf_counter() - start)
    return min(timings)


def main():
    repeats = int(sys.argv[1]) if len(sys.argv) > 1 else 10
    args = workload()
    backends = [("python", _pykernels)]
    if _ckernels is not None:
        backends.append(("compiled", _ckernels))
    else:
        print("compiled backend not built; timing the fallback only")

    results = {}
    for label, mod in backends:
        t_prop = best_of(mod.propagate_states, args["propagate"], repeats)
        t_frames = best_of(mod.instantaneous_frames, args["frames"], repeats)
        results[label] = (t_prop, t_frames)
        print(f"{label:>9}: propagate {1e3 * t_prop:8.3f} ms   "
              f"frames {1e3 * t_frames:8.3f} ms   (best of {repeats})")

    if len(results) == 2:
        py, cy = results["python"], results["compiled"]
        print(f"  speedup: propagate x{py[0] / cy[0]:.1f}   "
              f"frames x{py[1] / cy[1]:.1f}")

    # both backends must agree on the physics
    if _ckernels is not None:
        hist_py = _pykernels.propagate_states(*args["propagate"])
        hist_cy = _ckernels.propagate_states(*args["propagate"])
        print(f"  max |state difference|: "
              f"{np.max(np.abs(hist_py - hist_cy)):.2e}")


if __name__ == "__main__":
    main()
