#!/usr/bin/env python3
"""Smoke test for the nlsgi_py extension module.

Builds nothing itself: expects `cargo build -p nlsgi-py` (or --release) to
have produced the cdylib, copies it under an importable name, and runs a
small end-to-end check: zero potential, a sech round trip, and the IST
evolution against the direct reference solver.
"""

import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def locate_cdylib() -> pathlib.Path:
    candidates = [
        ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libnlsgi_py.so", "nlsgi_py.so", "libnlsgi_py.dylib")
    ]
    for path in candidates:
        if path.exists():
            return path
    raise SystemExit(
        "nlsgi_py cdylib not found; run `cargo build -p nlsgi-py` first"
    )


def import_module():
    src = locate_cdylib()
    tmp = tempfile.mkdtemp(prefix="nlsgi-py-")
    dst = pathlib.Path(tmp) / "nlsgi_py.so"
    shutil.copy2(src, dst)
    sys.path.insert(0, tmp)
    import nlsgi_py  # noqa: E402

    return nlsgi_py


def cnorm(pair):
    return math.hypot(pair[0], pair[1])


def main() -> None:
    nlsgi = import_module()
    L, N, Z, M = 20.0, 512, 20.0, 512

    # zero potential -> identity scattering data
    data = nlsgi.scatter("zero", L, N, Z, M)
    assert data.min_abs_a == 1.0
    assert all(abs(a[0] - 1.0) < 1e-15 and abs(a[1]) < 1e-15 for a in data.a())
    assert all(cnorm(r) == 0.0 for r in data.r_plus())
    print("zero preset: a == 1, r == 0")

    # sech round trip
    amp = 0.2
    data = nlsgi.scatter(f"sech({amp})", L, N, Z, M)
    assert data.unitarity_max_err < 1e-6, data.unitarity_max_err
    rec = nlsgi.invert(data, L, N)
    xs = rec.x_nodes()
    err = max(
        cnorm((u[0] - amp / math.cosh(x), u[1]))
        for x, u in zip(xs, rec.u())
    )
    assert err / amp < 1e-4, err / amp
    print(f"sech({amp}) round trip: relative Linf error {err / amp:.3e}")

    # archive save/load round trip
    with tempfile.TemporaryDirectory() as tmp:
        path = str(pathlib.Path(tmp) / "scattering.json")
        data.save_json(path)
        back = nlsgi.Scattering.load_json(path)
        assert abs(back.min_abs_a - data.min_abs_a) < 1e-15
    print("archive JSON save/load round trip")

    # IST evolution vs the direct reference solver
    t = 0.05
    ist = nlsgi.ist_evolve(f"sech({amp})", t, L, N, Z, M)
    ref = nlsgi.reference(f"sech({amp})", t, L, N)
    gap = max(
        math.hypot(a[0] - b[0], a[1] - b[1]) for a, b in zip(ist.u(), ref)
    )
    assert gap / amp < 1e-2, gap / amp
    print(f"ist vs reference at t = {t}: relative Linf gap {gap / amp:.3e}")

    # the analytic gate bound is 1 for zero and negative for a huge preset
    assert nlsgi.analytic_gate_bound("zero", L, N) == 1.0
    assert nlsgi.analytic_gate_bound("sech(5)", L, N) < 0.0
    print("analytic gate bound sanity")

    print("smoke test OK")


if __name__ == "__main__":
    main()
