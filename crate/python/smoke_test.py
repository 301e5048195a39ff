"""Smoke test for the propcalc_py extension.

Build first with `cargo build --release -p propcalc-py --features extension-module`,
or install it with `maturin develop -m crates/py/Cargo.toml`.
"""

import importlib.machinery
import importlib.util
import json
import pathlib
import sys


def load():
    try:
        import propcalc_py

        return propcalc_py
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for profile in ("release", "debug"):
        lib = root / "target" / profile / "libpropcalc_py.so"
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("propcalc_py", str(lib))
            spec = importlib.util.spec_from_file_location("propcalc_py", lib, loader=loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("propcalc_py is not built")


def main():
    pc = load()
    assert "ainfty" in pc.shipped_fixtures()

    c = pc.Coproperad.shipped("pair_w2")
    assert c.audit() == []
    assert all(c.cobar_d2().values())
    assert pc.Coproperad.parse(c.to_text()).to_text() == c.to_text()

    k = pc.LAlgebra.k(c, 2, 2)
    x = pc.standard_mc_element(c, 2, 2, 7)
    assert k.mc_residual(x) == {}

    y = dict(x)
    first = next(iter(y))
    y[first] = "0"
    assert k.mc_residual({i: v for i, v in y.items() if v != "0"}) != {}

    report = json.loads(pc.run_suites(["cobar-d2", "maps"], max_weight=2))
    assert all(ch["status"] == "pass" for ch in report["checks"])
    bad = json.loads(pc.run_suites(["jacobi"], max_weight=2, bracket_arity=2, negative_control=True))
    assert any(ch["status"] == "fail" for ch in bad["checks"])
    print("smoke test passed:", len(report["checks"]), "checks")


if __name__ == "__main__":
    main()
