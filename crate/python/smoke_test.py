#!/usr/bin/env python3
"""Smoke test for the slabsim_py extension module.

Builds nothing itself: run `cargo build -p slabsim-py --release` first, then
`python3 python/smoke_test.py`. The script copies the built cdylib next to a
temp directory under the name Python expects and imports it from there.
"""

import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def import_module():
    candidates = [
        REPO / "target" / "release" / "libslabsim_py.so",
        REPO / "target" / "debug" / "libslabsim_py.so",
        REPO / "target" / "release" / "libslabsim_py.dylib",
        REPO / "target" / "debug" / "libslabsim_py.dylib",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit(
            "extension not built; run `cargo build -p slabsim-py --release` first"
        )
    staging = Path(tempfile.mkdtemp(prefix="slabsim_py_"))
    shutil.copy2(built, staging / "slabsim_py.so")
    sys.path.insert(0, str(staging))
    import slabsim_py

    return slabsim_py


def main():
    m = import_module()
    print(f"slabsim_py {m.__version__}")

    # Geometry: degree-5 boundary levels on a free slab, doubled vertical
    # edge on the thin periodic slab.
    free = m.Geometry(2, 16, "free")
    assert free.site_count() == 16 * 16 * 2
    assert free.degree((3, 3, 0)) == 5
    periodic = m.Geometry(2, 16, "periodic")
    assert periodic.neighbors((3, 3, 0)).count((3, 3, 1)) == 2

    # Energies on handcrafted configurations.
    config = m.Config.constant(free, 1)
    assert config.local_energy((4, 4, 0)) == -5
    assert config.hamiltonian() == -5 * 16 * 16
    assert config.is_absorbing()
    config.set((4, 4, 0), -1)
    assert config.local_energy((4, 4, 0)) == 5
    assert not config.is_absorbing()

    # Snapshot round trip.
    text = config.snapshot(t=2.5)
    parsed, t = m.Config.from_snapshot(text)
    assert t == 2.5 and parsed.snapshot(t=2.5) == text

    # Dynamics: a seeded product state at k=2 free absorbs, and the run is
    # reproducible.
    def absorb(seed):
        c = m.Config.product(free, 0.5, seed)
        d = m.Dynamics(c, seed)
        assert d.run_to_absorption()
        return d

    a, b = absorb(7), absorb(7)
    assert a.total_flips == b.total_flips and a.t == b.t
    assert a.is_absorbed() and a.config().is_absorbing()
    assert a.total_flips <= 5 * 16 * 16
    print(f"absorbed after {a.sweeps:.2f} sweeps, {a.total_flips} flips")

    # Column projection statistics. Absorbed states on a small torus may
    # keep grey columns (a layer-split stripe is absorbing); just report.
    stats = a.config().grey_stats()
    assert sum(stats.values()) == 16 * 16
    print(f"absorbed column classes: {stats}")
    assert a.config().tau_snapshot().startswith("tau L=16")

    # Certificates: a monochromatic 2x2x2 block in a hostile background.
    hostile = m.Config.constant(free, -1)
    block = [(2 + dx, 2 + dy, dz) for dx in (0, 1) for dy in (0, 1) for dz in (0, 1)]
    for s in block:
        hostile.set(s, 1)
    assert m.is_stable_set(hostile, block)
    assert len(m.certify(hostile, block)) == 8
    assert m.certify(hostile, [(9, 9, 0)]) == []

    # Flip-sequence legality.
    lone = m.Config.constant(free, 1)
    lone.set((5, 5, 0), -1)
    assert lone.is_legal_flip_sequence([(5, 5, 0)])
    assert not lone.is_legal_flip_sequence([(0, 0, 0)])

    # The scaffold construction certifies in full and the blinker pair keeps
    # flipping.
    g3 = m.Geometry(3, 48, "free")
    seeded = m.Config.product(g3, 0.5, 11)
    written = seeded.apply_construction("event-a")
    cert = m.certify(seeded, written)
    assert len(cert) == len(written) == 2198
    d = m.Dynamics(seeded, 11)
    d.run_sweeps(64)
    b0, b1 = seeded.blinker_sites()
    flips = d.flip_count(b0) + d.flip_count(b1)
    assert flips > 0
    print(f"blinker pair flips over 64 sweeps: {flips}")

    # Bootstrap percolation: perpendicular growth and closure.
    eta = m.Eta.sample(64, 0.2, seed=5)
    closed, steps = eta.closure()
    assert closed.occupation_fraction() >= eta.occupation_fraction()
    assert closed.snapshot().startswith("eta L=64")
    print(
        f"bootstrap closure: {eta.occupation_fraction():.3f} -> "
        f"{closed.occupation_fraction():.3f} in {steps} steps"
    )
    extracted = m.Eta.extract(a.config())
    assert extracted.side == 8

    print("smoke test passed")


if __name__ == "__main__":
    main()
