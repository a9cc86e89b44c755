use std::f64::consts::FRAC_PI_2;

use causal_chain::fermion::{
    build_quadratic_form, correlation_matrix, ground_state_observables, observables, solve_ground_state,
    solve_modes, string_expectation_len,
};
use causal_chain::kernel::{eigensolve, expectation, to_dense, Axis, OperatorExpr, Spectrum};
use causal_chain::lattice::{build_tfim, TfimSpec};

fn dense_ground(spec: &TfimSpec) -> Spectrum {
    eigensolve(&to_dense(&build_tfim(spec)).unwrap()).unwrap()
}

fn string_op(m: usize, len: usize) -> OperatorExpr {
    let f: Vec<_> = (0..len).map(|j| (j, Axis::X)).collect();
    OperatorExpr::zero(m).unwrap().with(1.0, &f).unwrap()
}

#[test]
fn matches_dense_diagonalization() {
    for m in 2..=10 {
        for k in 0..16 {
            let theta = k as f64 * FRAC_PI_2 / 15.0;
            let spec = TfimSpec::new(m, theta).unwrap();
            let ed = dense_ground(&spec);
            let gs = ed.ground_state();
            let x0 = OperatorExpr::zero(m).unwrap().with(1.0, &[(0, Axis::X)]).unwrap();
            let zz = OperatorExpr::zero(m)
                .unwrap()
                .with(1.0, &[(0, Axis::Z), (1, Axis::Z)])
                .unwrap();
            let l = (m / 2).max(1);

            let sol = solve_ground_state(&spec).unwrap();
            let (obs, string) = ground_state_observables(&spec).unwrap();
            let tag = format!("M={m} theta={theta}");
            assert!((sol.energy - ed.ground_energy()).abs() < 1e-8, "{tag} energy {} vs {}", sol.energy, ed.ground_energy());
            assert!((obs.m_x - expectation(&gs, &x0).unwrap()).abs() < 1e-8, "{tag} m_x");
            assert!((obs.c_zz - expectation(&gs, &zz).unwrap()).abs() < 1e-8, "{tag} c_zz");
            assert!(
                (string - expectation(&gs, &string_op(m, l)).unwrap()).abs() < 1e-8,
                "{tag} string"
            );
        }
    }
}

#[test]
fn mode_energies_match_excitation_gaps() {
    // single-particle energies appear as gaps above the ground state within
    // the same symmetry sector
    let spec = TfimSpec::new(6, std::f64::consts::FRAC_PI_4).unwrap();
    let ed = dense_ground(&spec);
    let sol = solve_ground_state(&spec).unwrap();
    let e0 = ed.ground_energy();
    let lam = sol.modes.lambdas();
    // two-quasiparticle excitations stay in the ground-state sector
    for a in 0..lam.len() {
        for b in a + 1..lam.len() {
            let target = e0 + lam[a] + lam[b];
            let hit = ed.eigenvalues().iter().any(|e| (e - target).abs() < 1e-8);
            assert!(hit, "missing level {target}");
        }
    }
}

#[test]
fn mode_equations_hold() {
    for (m, theta) in [(5, 0.3), (8, 0.785), (9, 1.4)] {
        let q = build_quadratic_form(&TfimSpec::new(m, theta).unwrap());
        let modes = solve_modes(&q).unwrap();
        let apb = q.a() + q.b();
        let amb = q.a() - q.b();
        let prod = &apb * &amb;
        for k in 0..m {
            let lam = modes.lambdas()[k];
            for i in 0..m {
                let lhs: f64 = (0..m).map(|j| prod[(i, j)] * modes.psi()[(k, j)]).sum();
                assert!((lhs - lam * lam * modes.psi()[(k, i)]).abs() < 1e-9);
                let phi: f64 = (0..m).map(|j| amb[(i, j)] * modes.psi()[(k, j)]).sum();
                if lam > 1e-12 {
                    assert!((phi / lam - modes.phi()[(k, i)]).abs() < 1e-9);
                }
            }
        }
        let g = correlation_matrix(&modes);
        assert!(g.max_abs() <= 1.0 + 1e-10);
        for a in 0..m {
            for b in 0..m {
                let pp: f64 = (0..m).map(|i| modes.psi()[(a, i)] * modes.psi()[(b, i)]).sum();
                let ff: f64 = (0..m).map(|i| modes.phi()[(a, i)] * modes.phi()[(b, i)]).sum();
                let id = if a == b { 1.0 } else { 0.0 };
                assert!((pp - id).abs() < 1e-10 && (ff - id).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn kramers_wannier_self_duality() {
    for m in [4, 8, 10, 40] {
        for k in 1..16 {
            let theta = k as f64 * FRAC_PI_2 / 16.0;
            let a = observables(&solve_ground_state(&TfimSpec::new(m, theta).unwrap()).unwrap().correlation);
            let b = observables(
                &solve_ground_state(&TfimSpec::new(m, FRAC_PI_2 - theta).unwrap())
                    .unwrap()
                    .correlation,
            );
            assert!((a.m_x - b.c_zz).abs() < 1e-9, "M={m} theta={theta}");
        }
    }
}

#[test]
fn full_string_is_the_symmetry() {
    let spec = TfimSpec::new(7, 0.9).unwrap();
    let sol = solve_ground_state(&spec).unwrap();
    let full = string_expectation_len(&sol.correlation, 7).unwrap();
    assert!((full - 1.0).abs() < 1e-10);
}
