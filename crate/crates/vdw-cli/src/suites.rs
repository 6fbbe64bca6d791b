//! Self-check suites: randomized identity checks over the response-function
//! layer and the finite-mode oracle comparison.  Each check prints one line;
//! the suite result feeds the process exit status.

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vdw_core::atom::{
    alpha_feynman, alpha_offdiagonal_broadened, alpha_retarded, alpha_sharp, AtomState,
    TwoLevelAtom,
};
use vdw_core::green::{
    bose_occupation, contract, coth_half, green_retarded, keldysh_components, AtomPairGreen,
    Medium, RetardedGreen,
};
use vdw_core::oracle::{ed_lambda4_fit, rspt4_ground_shift, ModeGreen, ModeModel};
use vdw_core::quadrature::Tolerance;
use vdw_core::rates::{
    sigma_ge_feynman, sigma_ge_keldysh, sigma_ge_keldysh_four_term, sigma_gg, sigma_gg_with,
};

pub struct Check {
    pub name: &'static str,
    pub deviation: f64,
    pub threshold: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.deviation < self.threshold
    }
}

pub fn print_report(checks: &[Check]) -> bool {
    let mut all = true;
    for c in checks {
        println!(
            "{:<52} max deviation {:9.3e}  (< {:.0e})  {}",
            c.name,
            c.deviation,
            c.threshold,
            if c.passed() { "PASS" } else { "FAIL" }
        );
        all &= c.passed();
    }
    all
}

/// Randomized identity suite over the propagator components, the
/// polarizability family, and the self-energy breakdown.
pub fn identities(seed: u64, samples: usize) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let medium = Medium::vacuum();
    let zhat = Vector3::new(0.0, 0.0, 1.0);
    let xhat = Vector3::new(1.0, 0.0, 0.0);

    let mut retarded_sub = 0.0f64;
    let mut advanced_sub = 0.0f64;
    let mut conjugation = 0.0f64;
    let mut coth_identity = 0.0f64;
    let mut reciprocity = 0.0f64;
    for k in 0..samples {
        let omega: f64 =
            rng.random_range(0.2..2.5) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let r = rng.random_range(0.4..4.0);
        let t = if k % 4 == 0 { 0.0 } else { rng.random_range(0.1..2.0) };
        let rand_vec = |rng: &mut ChaCha8Rng| {
            Vector3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            )
        };
        let (da, db) = (rand_vec(&mut rng), rand_vec(&mut rng));
        let rb = rand_vec(&mut rng) + Vector3::new(0.0, 0.0, r + 1.5);
        let gc = keldysh_components(omega, &rb, &Vector3::zeros(), &db, &da, &medium, t).unwrap();
        let scale =
            gc.d11.norm().max(gc.d_r.norm()).max(gc.d12.norm()).max(gc.d21.norm()).max(1.0);
        retarded_sub = retarded_sub.max((gc.d11 - gc.d12 - gc.d_r).norm() / scale);
        advanced_sub = advanced_sub.max((gc.d11 - gc.d21 - gc.d_a).norm() / scale);
        conjugation = conjugation.max((gc.d_a - gc.d_r.conj()).norm() / scale);
        if t > 0.0 {
            let bo = omega / t;
            coth_identity = coth_identity.max(
                (coth_half(bo) - (1.0 + 2.0 * bose_occupation(bo))).abs() / coth_half(bo).abs(),
            );
        }
        let z = Complex64::new(omega.abs(), 0.0);
        let g_ba = green_retarded(z, &rb, &Vector3::zeros(), &medium).unwrap();
        let g_ab = green_retarded(z, &Vector3::zeros(), &rb, &medium).unwrap();
        let s1 = contract(&g_ba, &db, &da);
        let s2 = contract(&g_ab, &da, &db);
        reciprocity = reciprocity.max((s1 - s2).norm() / s1.norm().max(1e-300));
    }

    let mut alpha_identity = 0.0f64;
    let mut alpha_symmetry = 0.0f64;
    for _ in 0..samples {
        let wn = rng.random_range(0.3..2.0);
        let w = rng.random_range(0.0..4.0);
        let eps = 1e-3;
        for state in [AtomState::Ground, AtomState::Excited] {
            let a11 = alpha_feynman(state, wn, w, eps).unwrap();
            let a12 = alpha_offdiagonal_broadened(state, wn, w, eps).unwrap();
            let ar = alpha_retarded(state, wn, w, eps).unwrap();
            alpha_identity = alpha_identity.max((a11 - a12 - ar).norm());
        }
        let e = alpha_retarded(AtomState::Excited, wn, w, 1e-3).unwrap();
        let g = alpha_retarded(AtomState::Ground, wn, w, 1e-3).unwrap();
        alpha_symmetry = alpha_symmetry.max((e + g).norm() / g.norm().max(1.0));
    }

    // Self-energy structure on a few separations.
    let tol = Tolerance::rel(1e-11);
    let mut additivity = 0.0f64;
    let mut two_level = 0.0f64;
    let mut ordering_diff = 0.0f64;
    let mut cancellation = 0.0f64;
    for &r in &[0.6, 2.0, 8.0] {
        let a_exc = TwoLevelAtom::new(Vector3::zeros(), 1.0, xhat, AtomState::Excited).unwrap();
        let a_gnd = TwoLevelAtom::new(Vector3::zeros(), 1.0, xhat, AtomState::Ground).unwrap();
        let b = TwoLevelAtom::new(r * zhat, 1.35, xhat, AtomState::Ground).unwrap();

        let k = sigma_ge_keldysh(&a_exc, &b, &medium, tol).unwrap();
        let f = sigma_ge_feynman(&a_exc, &b, &medium, tol).unwrap();
        let gg = sigma_gg(&a_gnd, &b, &medium, tol).unwrap();

        additivity = additivity.max(
            ((k.nonresonant + k.resonant + k.oscillating) - k.total()).norm()
                / k.total().norm(),
        );
        two_level = two_level.max((k.nonresonant + gg.total()).norm() / gg.total().norm());

        let green = AtomPairGreen::between(&a_exc, &b, &medium).unwrap();
        let dr = green.dr(Complex64::new(1.0, 0.0)).unwrap();
        let expected = -alpha_sharp(AtomState::Ground, 1.35, 1.0)
            * (dr * dr - Complex64::new(dr.norm_sqr(), 0.0));
        ordering_diff = ordering_diff
            .max((f.total() - k.total() - expected).norm() / expected.norm().max(1e-300));

        let four = sigma_ge_keldysh_four_term(&a_exc, &b, &medium, tol).unwrap();
        cancellation = cancellation.max((four.total() - k.total()).norm() / k.total().norm());
    }

    vec![
        Check { name: "retarded = d11 - d12", deviation: retarded_sub, threshold: 1e-10 },
        Check { name: "advanced = d11 - d21", deviation: advanced_sub, threshold: 1e-10 },
        Check { name: "advanced = conj(retarded)", deviation: conjugation, threshold: 1e-10 },
        Check { name: "coth(βω/2) = 1 + 2n̄(ω)", deviation: coth_identity, threshold: 1e-10 },
        Check { name: "reciprocity of the contracted propagator", deviation: reciprocity, threshold: 1e-10 },
        Check { name: "α₁₁ − α₁₂ = α_R (broadened)", deviation: alpha_identity, threshold: 1e-10 },
        Check { name: "excited α_R = −ground α_R", deviation: alpha_symmetry, threshold: 1e-10 },
        Check { name: "breakdown parts sum to the total", deviation: additivity, threshold: 1e-10 },
        Check { name: "nonresonant part = −(ground–ground)", deviation: two_level, threshold: 1e-10 },
        Check { name: "ordering difference identity", deviation: ordering_diff, threshold: 1e-10 },
        Check { name: "four-term = two-term self-energy", deviation: cancellation, threshold: 1e-10 },
    ]
}

/// Finite-mode oracle: pipeline vs fourth-order perturbation theory on
/// randomized models, plus an exact-diagonalization coupling fit.
pub fn oracle(models: usize, seed: u64, tol: Tolerance) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mk_atom = |w: f64| {
        TwoLevelAtom::new(Vector3::zeros(), w, Vector3::new(1.0, 0.0, 0.0), AtomState::Ground)
            .unwrap()
    };

    let mut pt_dev = 0.0f64;
    for k in 0..models {
        let model = ModeModel::random(8, 2, seed.wrapping_add(k as u64));
        let wa = rng.random_range(0.9..1.3);
        let wb = rng.random_range(0.8..1.6);
        let (a, b) = (mk_atom(wa), mk_atom(wb));
        let pt = rspt4_ground_shift(&model, &a, &b).unwrap();
        let se = sigma_gg_with(&ModeGreen::new(&model), wa, wb, tol).unwrap();
        pt_dev = pt_dev.max((se.shift() - pt.connected_e4).abs() / pt.connected_e4.abs());
    }

    let mut ed_dev = 0.0f64;
    for k in 0..2u64 {
        let model = ModeModel::random(4, 3, seed.wrapping_add(900 + k));
        let (a, b) = (mk_atom(1.05), mk_atom(1.4));
        let pt = rspt4_ground_shift(&model.clone().with_truncation(2), &a, &b).unwrap();
        let fit = ed_lambda4_fit(&model, &a, &b, &[0.01, 0.02, 0.03, 0.04, 0.05]).unwrap();
        ed_dev = ed_dev.max((fit - pt.connected_e4).abs() / pt.connected_e4.abs());
    }

    vec![
        Check {
            name: "pipeline Σ^gg = perturbation-theory cross shift",
            deviation: pt_dev,
            threshold: 1e-8,
        },
        Check {
            name: "exact-diagonalization λ⁴ fit",
            deviation: ed_dev,
            threshold: 1e-4,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_suite_passes() {
        let checks = identities(7, 40);
        for c in &checks {
            assert!(c.passed(), "{}: {:.3e}", c.name, c.deviation);
        }
    }

    #[test]
    fn oracle_suite_passes() {
        let checks = oracle(5, 99, Tolerance::rel(1e-11));
        for c in &checks {
            assert!(c.passed(), "{}: {:.3e}", c.name, c.deviation);
        }
    }
}
