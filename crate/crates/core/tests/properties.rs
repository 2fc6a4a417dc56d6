use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use z2scars::basis::{reflect_state, translate_state};
use z2scars::hamiltonian::{apply_full, build_full, dimer_count, Model};
use z2scars::scalar::{inner, norm, normalize};
use z2scars::scars::{scar_state, tower_energy, tower_labels};
use z2scars::spectral::eigvalsh;
use z2scars::{
    classify_point, entanglement_entropy, evolve_fidelity, gap_ratio, s_rmt, ModelParams, Region, SectorBasis,
    SymmetrySector, Tower,
};

/// Box-Muller normal deviate.
fn gaussian(rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

fn params() -> impl Strategy<Value = ModelParams> {
    (0.0..2.0f64, 0.0..2.0f64, 0.2..2.0f64).prop_map(|(t, h, mu)| ModelParams::new(t, h).with_mu(mu))
}

fn even_len(max: usize) -> impl Strategy<Value = usize> {
    (1..=max / 2).prop_map(|k| 2 * k)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sector_vectors_are_symmetry_eigenstates(len in even_len(10), k_frac in 0.0..1.0f64, seed in any::<u64>()) {
        let k = ((k_frac * len as f64) as usize).min(len - 1);
        for sector in SymmetrySector::all(len).into_iter().filter(|s| s.momentum() == k) {
            let basis = SectorBasis::new(len, sector).unwrap();
            if basis.is_empty() {
                continue;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v: Vec<Complex64> = (0..basis.dim()).map(|_| Complex64::new(gaussian(&mut rng), gaussian(&mut rng))).collect();
            normalize(&mut v);
            let full = basis.to_full(&v).unwrap();
            prop_assert!((norm(&full) - 1.0).abs() < 1e-12);
            prop_assert!((inner(&full, &translate_state(&full, len)).norm() - 1.0).abs() < 1e-10);
            if let Some(p) = sector.parity() {
                let overlap = inner(&full, &reflect_state(&full, len));
                prop_assert!((overlap.re - p.sign()).abs() < 1e-10, "{sector}: {overlap}");
            }
            let back = basis.from_full(&full).unwrap();
            let err = back.iter().zip(&v).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            prop_assert!(err < 1e-12);
        }
    }

    #[test]
    fn full_models_are_symmetric(p in params(), len in even_len(8)) {
        for model in [Model::Ising, Model::Effective] {
            let m = build_full(model, &p, len).unwrap();
            let asym = (0..m.nrows())
                .flat_map(|i| (0..i).map(move |j| (i, j)))
                .map(|(i, j)| (m[(i, j)] - m[(j, i)]).abs())
                .fold(0.0, f64::max);
            prop_assert!(asym == 0.0);
        }
    }

    #[test]
    fn effective_model_conserves_domain_walls(p in params(), len in even_len(10), config in any::<u64>()) {
        let config = config & ((1 << len) - 1);
        let mut state = vec![0.0; 1 << len];
        state[config as usize] = 1.0;
        let image = apply_full(Model::Effective, &p, len, &state).unwrap();
        let d = dimer_count(config, len);
        for (s, a) in image.iter().enumerate() {
            if *a != 0.0 {
                prop_assert_eq!(dimer_count(s as u64, len), d);
            }
        }
    }

    #[test]
    fn towers_are_exact_eigenstates(p in params(), len in prop::sample::select(vec![4usize, 6, 8, 10])) {
        for tower in [Tower::Magnon, Tower::Antimagnon] {
            for label in tower_labels(tower, len) {
                let (v, _) = scar_state(label, len).unwrap();
                let hv = apply_full(Model::Effective, &p, len, &v).unwrap();
                let e = tower_energy(tower, label.n, &p, len);
                let residual = hv.iter().zip(&v).map(|(a, b)| (a - b * e).norm_sqr()).sum::<f64>().sqrt();
                prop_assert!(residual < 1e-10, "{tower} n={} residual {residual}", label.n);
            }
        }
    }

    #[test]
    fn entropy_bounds_and_products(len in even_len(10), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let half = len / 2;
        let a: Vec<f64> = { let mut a: Vec<f64> = (0..1 << half).map(|_| gaussian(&mut rng)).collect(); normalize(&mut a); a };
        let b: Vec<f64> = { let mut b: Vec<f64> = (0..1 << half).map(|_| gaussian(&mut rng)).collect(); normalize(&mut b); b };
        let product: Vec<f64> = (0..1usize << len).map(|s| a[s & ((1 << half) - 1)] * b[s >> half]).collect();
        prop_assert!(entanglement_entropy(&product, len).unwrap().abs() < 1e-10);

        let mut psi: Vec<f64> = (0..1 << len).map(|_| gaussian(&mut rng)).collect();
        normalize(&mut psi);
        let s = entanglement_entropy(&psi, len).unwrap();
        prop_assert!(s >= 0.0 && s <= half as f64 * std::f64::consts::LN_2 + 1e-12);
    }

    #[test]
    fn gap_ratio_is_affine_invariant(seed in any::<u64>(), scale in 0.1..10.0f64, shift in -5.0..5.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let levels = sorted((0..200).map(|_| gaussian(&mut rng)).collect());
        let r = gap_ratio(&levels, 0.1).unwrap();
        let moved: Vec<f64> = levels.iter().map(|e| scale * e + shift).collect();
        prop_assert!((0.0..=1.0).contains(&r));
        prop_assert!((gap_ratio(&moved, 0.1).unwrap() - r).abs() < 1e-10);
    }

    #[test]
    fn fidelity_starts_at_one_and_stays_bounded(p in params()) {
        let len = 8;
        let basis = Arc::new(SectorBasis::new(len, SymmetrySector::zero_even()).unwrap());
        let sol = z2scars::diagonalize(&z2scars::hamiltonian::build_ising::<f64>(&p, &basis).unwrap()).unwrap();
        let psi0 = basis.from_full(&z2scars::prepare_initial(len).unwrap()).unwrap();
        let trace = evolve_fidelity(&psi0, &sol, &z2scars::dynamics::time_grid(10.0, 0.5)).unwrap();
        prop_assert!((trace.fidelity[0] - 1.0).abs() < 1e-12);
        prop_assert!(trace.fidelity.iter().all(|f| (-1e-12..=1.0 + 1e-12).contains(f)));
    }

    #[test]
    fn classification_follows_thresholds(r in 0.0..1.0f64, s in 0.0..1.5f64) {
        let region = classify_point(r, s, &Default::default());
        let expected = match (r > 0.5, s < 0.5) {
            (true, true) => Region::QmbsPossible,
            (true, false) => Region::ChaoticNoScars,
            (false, true) => Region::Mixed,
            (false, false) => Region::NonergodicHighEntropy,
        };
        prop_assert_eq!(region, expected);
    }

    #[test]
    fn negative_couplings_are_rejected(t in -2.0..-1e-6f64, h in 0.0..1.0f64) {
        prop_assert!(ModelParams::new(t, h).validate().is_err());
        prop_assert!(ModelParams::new(h, t).validate().is_err());
    }
}

#[test]
fn goe_gap_ratio_calibration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let n = 800;
    let samples = 4;
    let mean: f64 = (0..samples)
        .map(|_| {
            let a = Mat::<f64>::from_fn(n, n, |_, _| gaussian(&mut rng));
            let sym = Mat::<f64>::from_fn(n, n, |i, j| a[(i, j)] + a[(j, i)]);
            gap_ratio(&eigvalsh(&sym).unwrap(), 0.1).unwrap()
        })
        .sum::<f64>()
        / samples as f64;
    assert!((mean - 0.5307).abs() < 0.01, "GOE r = {mean}");
}

#[test]
fn poisson_gap_ratio_calibration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let levels = sorted((0..20000).map(|_| rng.random::<f64>()).collect());
    // 2 ln 2 - 1
    assert!((gap_ratio(&levels, 0.0).unwrap() - 0.3863).abs() < 0.01);
}

#[test]
fn page_value_tracks_random_states() {
    let len = 12;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut psi: Vec<f64> = (0..1 << len).map(|_| gaussian(&mut rng)).collect();
    normalize(&mut psi);
    let s = entanglement_entropy(&psi, len).unwrap();
    assert!((s / s_rmt(len) - 1.0).abs() < 0.03, "{s} vs {}", s_rmt(len));
}

#[test]
fn sector_spectra_reassemble_full_spectrum() {
    let p = ModelParams::new(0.41, 0.23).with_mu(0.9);
    for len in [4, 6, 8] {
        for model in [Model::Ising, Model::Effective] {
            let mut union = Vec::new();
            for sector in SymmetrySector::all(len) {
                let basis = Arc::new(SectorBasis::new(len, sector).unwrap());
                let block = z2scars::hamiltonian::build_sector::<Complex64>(model, &p, &basis).unwrap();
                union.extend(z2scars::spectral::eigenvalues(&block).unwrap());
            }
            let full = eigvalsh(&build_full(model, &p, len).unwrap()).unwrap();
            let union = sorted(union);
            let err = union.iter().zip(&full).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-10, "{model:?} L={len}: {err}");
        }
    }
}
