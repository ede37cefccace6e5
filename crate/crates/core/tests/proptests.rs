//! Property tests for structural invariants.

use num_complex::Complex64 as C;
use proptest::prelude::*;
use wavestab_core::action::{action_hessian, to_matrix};
use wavestab_core::asymptotics::harmonic_wave;
use wavestab_core::madelung::{from_hydro, to_hydro, HydroState};
use wavestab_core::model::reference_defocusing;
use wavestab_core::modulation::assemble;
use wavestab_core::profile::Averages;
use wavestab_core::{make_model, Coefficient};

fn coeffs(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, 1..=max_len)
}

fn averages(s: [f64; 3]) -> Averages {
    Averages {
        m_bar: 0.0,
        q_bar: 0.0,
        sigma1: s[0],
        sigma2: s[1],
        sigma3: s[2],
        tau0: 0.0,
        tau1: 0.0,
        tau2: 0.0,
        tau3: 0.0,
        sigma_tau_defect: 0.0,
    }
}

proptest! {
    #[test]
    fn transverse_shifts_compose(w in coeffs(5), k1 in 0.5..2.0f64, a in 0.0..3.0f64, b in 0.0..3.0f64) {
        let m = make_model(&[1.0, k1], &w, None, 10.0).unwrap();
        let two = m.shift_transverse_phase(a).shift_transverse_phase(b);
        let one = m.shift_transverse_phase(a + b);
        for x in [0.0, 0.3, 1.7, 4.0] {
            let (p, q) = (two.w(x), one.w(x));
            prop_assert!((p - q).abs() <= 1e-12 * (1.0 + q.abs()));
            prop_assert_eq!(two.kappa(x), m.kappa(x));
        }
    }

    #[test]
    fn eval_derivatives_match_finite_differences(w in coeffs(5), alpha in 0.1..2.0f64, order in 0usize..4) {
        let m = make_model(&[1.0], &w, None, 10.0).unwrap();
        let h = 1e-4;
        let f = |x: f64| m.eval(Coefficient::W, x, order).unwrap();
        let fd = (f(alpha + h) - f(alpha - h)) / (2.0 * h);
        let exact = m.eval(Coefficient::W, alpha, order + 1).unwrap();
        let scale = w.iter().fold(1.0f64, |s, c| s.max(c.abs())) * 100.0;
        prop_assert!((fd - exact).abs() <= 1e-6 * scale, "{} vs {}", fd, exact);
    }

    #[test]
    fn plane_waves_roundtrip(rho0 in 0.1..3.0f64, k in -2.0..2.0f64, theta0 in -3.0..3.0f64) {
        let x: Vec<f64> = (0..64).map(|i| i as f64 * 0.05).collect();
        let state = HydroState { rho: vec![rho0; 64], v: vec![k; 64], x_grid: x.clone(), rho_x: None };
        let (u, ux) = from_hydro(&state, theta0);
        let back = to_hydro(&u, &ux, &x).unwrap();
        for i in 0..64 {
            prop_assert!((back.rho[i] - rho0).abs() < 1e-12);
            prop_assert!((back.v[i] - k).abs() < 1e-12);
            let t = theta0 + k * x[i];
            let a = (2.0 * rho0).sqrt();
            prop_assert!((u[i][0] - a * t.cos()).abs() < 1e-12 && (u[i][1] + a * t.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_coefficients_respect_parity(
        h in prop::array::uniform10(-3.0..3.0f64),
        s in prop::array::uniform3(-2.0..2.0f64),
        l in (0.2..2.0f64, -2.0..2.0f64),
        z in (-1.0..1.0f64, -1.0..1.0f64),
        zeta in (-1.0..1.0f64, -1.0..1.0f64),
    ) {
        let mut hm = [[0.0; 4]; 4];
        let mut k = 0;
        for i in 0..4 {
            for j in i..4 {
                hm[i][j] = h[k];
                hm[j][i] = h[k];
                k += 1;
            }
        }
        prop_assume!(to_matrix(&hm).determinant().abs() > 0.1);
        let data = assemble(&hm, &averages(s), 1.0).unwrap();
        for d in &data.delta {
            if (d.m + d.n + d.p) % 2 == 1 {
                prop_assert!(d.value.abs() < 1e-12, "δ({},{},{}) = {}", d.m, d.n, d.p, d.value);
            }
        }
        let (l, z, zeta) = (C::new(l.0, l.1), C::new(z.0, z.1), C::new(zeta.0, zeta.1));
        let base = data.delta0(l, z, zeta);
        let scale = 1.0 + base.norm();
        prop_assert!((data.delta0(-l, -z, zeta) - base).norm() <= 1e-9 * scale);
        prop_assert!((data.delta0(l, z, -zeta) - base).norm() <= 1e-9 * scale);
        let direct = data.delta0_direct(l, z, zeta);
        let mag = 1.0 + direct.norm() + data.delta.iter().fold(0.0f64, |a, d| a.max(d.value.abs())) * 16.0;
        prop_assert!((direct - base).norm() <= 1e-9 * mag, "{} vs {}", base, direct);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn hessian_is_symmetric_on_harmonic_waves(
        c_x in -0.5..0.5f64,
        rho0 in 0.8..1.2f64,
        k_phi in 0.9..1.4f64,
        eps in 0.01..0.04f64,
    ) {
        let m = reference_defocusing();
        let params = harmonic_wave(&m, c_x, rho0, k_phi, eps);
        // Constant states that are not minima, or whose barrier is below eps^2, have no harmonic wave.
        prop_assume!(!matches!(
            params,
            Err(wavestab_core::Error::NotAMinimum { .. } | wavestab_core::Error::NoWellFound)
        ));
        let params = params.unwrap();
        let ad = action_hessian(&m, &params).unwrap();
        let scale = ad.hess.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        for i in 0..4 {
            for j in 0..4 {
                prop_assert_eq!(ad.hess[i][j], ad.hess[j][i]);
            }
        }
        prop_assert!(ad.asymmetry < 1e-4, "asymmetry {} (scale {})", ad.asymmetry, scale);
    }
}
