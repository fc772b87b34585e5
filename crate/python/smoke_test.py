"""Smoke test for the `hubbard` extension module.

Build and install first, e.g. `pip install --no-build-isolation ./crates/py`
or `maturin develop -m crates/py/Cargo.toml`.
"""

import json
import math

import hubbard


def main() -> None:
    params = hubbard.HubbardParams(4, t=1.0, u=1.0)
    assert params.num_qubits == 8
    assert any(letters == "ZIIIIIII" for _, letters in params.hamiltonian())

    assert hubbard.convention_depth("first", 3) == 69
    assert hubbard.convention_depth("second-optimized", 2) == 70
    assert len(hubbard.cz_twirls()) == 16

    circuit = hubbard.Circuit.trotter(params, "first", 4, 0.25)
    basis = circuit.to_basis()
    assert basis.cz_count() > 0
    assert hubbard.Circuit.from_json(circuit.to_json()).depth() == circuit.depth()

    psi = hubbard.StateVector.neel(4)
    assert abs(psi.expectation("neel") - 0.5) < 1e-12
    psi.apply(hubbard.Circuit.trotter(params, "first", 4, 0.25, prepare_neel=False))
    assert abs(psi.expectation("n_tot") - 4.0) < 1e-10
    assert abs(psi.expectation("sz_tot")) < 1e-10

    exact = hubbard.StateVector.neel(4).evolve_exact(params, 1.0)
    second = hubbard.StateVector.neel(4)
    second.apply(hubbard.Circuit.trotter(params, "second", 4, 0.25, prepare_neel=False))
    assert abs(abs(second.inner(exact)) - 1.0) < 1e-3
    assert abs(sum(abs(a) ** 2 for a in psi.amplitudes()) - 1.0) < 1e-12

    mps = hubbard.Mps.neel(4, chi_max=64, cutoff=0.0)
    mps.apply(hubbard.Circuit.trotter(params, "first", 4, 0.25, prepare_neel=False))
    assert abs(mps.expectation("neel") - psi.expectation("neel")) < 1e-9
    assert max(mps.bond_dims()) <= 64

    ideal = hubbard.StateVector.neel(4)
    ideal.apply(hubbard.Circuit.trotter(params, "first", 4, 0.25, prepare_neel=False))
    noisy = hubbard.noisy_estimate(circuit, "neel", p2=2.5e-3, p01=6e-3, p10=1.2e-2, shots=4000, seed=3)
    assert math.isfinite(noisy) and abs(noisy - ideal.expectation("neel")) < 0.5

    toml = "schema_version = 1\nbackend = \"exact\"\n[model]\nsites = 2\nt = 1.0\nu = 1.0\n[plan]\nr_max = 2\n"
    results = json.loads(hubbard.run_experiment(toml=toml))
    assert [p["r"] for p in results["points"]] == [1, 2]

    try:
        hubbard.run_experiment(toml="schema_version = 9\n")
    except hubbard.ConfigError:
        pass
    else:
        raise AssertionError("bad schema accepted")

    try:
        hubbard.Circuit.trotter(params, "third", 1, 0.1)
    except hubbard.HubbardError:
        pass
    else:
        raise AssertionError("unknown order accepted")

    print("python smoke test ok")


if __name__ == "__main__":
    main()
