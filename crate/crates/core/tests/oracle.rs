//! Sampler and selection results checked against independent brute force.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use channel_qubo::channel_flow::{assemble_system, FlowParams, SolutionProfile};
use channel_qubo::fixed_point::FixedPointFormat;
use channel_qubo::qubo::{build_qubo, Qubo};
use channel_qubo::samplers::{
    ground_states, sample_annealing, sample_exhaustive, AnnealSchedule, SamplerConfig,
};
use channel_qubo::selection::{select, Strategy};

fn bits_of(code: u64, m: usize) -> DVector<f64> {
    DVector::from_fn(m, |j, _| (code >> (m - 1 - j) & 1) as f64)
}

fn random_system(
    rng: &mut ChaCha8Rng,
    max_bits: usize,
) -> (DMatrix<f64>, Vec<f64>, FixedPointFormat) {
    let count = rng.gen_range(1..=3usize);
    let n = rng.gen_range(1..=max_bits / count) as u32;
    let rows = rng.gen_range(count..=count + 1);
    let a = DMatrix::from_fn(rows, count, |_, _| rng.gen_range(-1.5..1.5));
    let b = (0..rows).map(|_| rng.gen_range(-2.0..2.0)).collect();
    (
        a,
        b,
        FixedPointFormat::new(n, rng.gen_range(0..=1)).unwrap(),
    )
}

fn channel_qubo(ngp: usize, n: u32, prev: &SolutionProfile) -> Qubo {
    let params = FlowParams::default().with_grid_points(ngp);
    let sys = assemble_system(&params, prev).unwrap();
    let fmt = FixedPointFormat::new(n, 1).unwrap();
    build_qubo(&fmt.expand_matrix(&sys.to_dense()), &sys.rhs).unwrap()
}

#[test]
fn qubo_and_residual_share_minimizers() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut cases: Vec<(DMatrix<f64>, Vec<f64>, FixedPointFormat)> =
        (0..40).map(|_| random_system(&mut rng, 12)).collect();
    // one full-size case: 4 interior points at 5 bits
    let params = FlowParams::default().with_grid_points(6);
    let sys = assemble_system(&params, &SolutionProfile::zeros(6)).unwrap();
    cases.push((
        sys.to_dense(),
        sys.rhs.clone(),
        FixedPointFormat::new(5, 1).unwrap(),
    ));

    for (case, (a, b, fmt)) in cases.iter().enumerate() {
        let ad = fmt.expand_matrix(a);
        let qubo = build_qubo(&ad, b).unwrap();
        let m = qubo.num_vars();
        assert!(m <= 20);
        let bvec = DVector::from_column_slice(b);
        let residuals: Vec<f64> = (0..1u64 << m)
            .map(|code| (&ad * bits_of(code, m) - &bvec).norm_squared())
            .collect();
        let best_residual = residuals.iter().copied().fold(f64::INFINITY, f64::min);
        let tol = 1e-10 * (1.0 + bvec.norm_squared());

        let samples = sample_exhaustive(&qubo).unwrap();
        let best_energy = samples.lowest().unwrap().energy;
        for s in samples.iter().take_while(|s| s.energy == best_energy) {
            let code = s.packed()[0] >> (64 - m);
            assert!(
                residuals[code as usize] <= best_residual + tol,
                "case {case}: energy minimizer {code:b} is not a residual minimizer"
            );
        }
        for (code, &r) in residuals.iter().enumerate() {
            if r == best_residual {
                let e = qubo.energy_by(|j| code >> (m - 1 - j) & 1 == 1);
                assert!(
                    e <= best_energy + tol,
                    "case {case}: residual minimizer {code:b} has energy {e} > {best_energy}"
                );
            }
        }
    }
}

fn scaled(q: &Qubo, c: f64) -> Qubo {
    Qubo::new(
        q.linear().iter().map(|v| v * c).collect(),
        q.couplings()
            .iter()
            .map(|(&jk, &w)| (jk, w * c))
            .collect::<BTreeMap<_, _>>(),
        q.offset() * c,
    )
    .unwrap()
}

#[test]
fn lowest_energy_selection_is_scale_invariant() {
    let fmt = FixedPointFormat::new(4, 1).unwrap();
    let params = FlowParams::default();
    let mut prev = SolutionProfile::zeros(5);
    for step in 0..4 {
        let qubo = channel_qubo(5, 4, &prev);
        let base = select(
            &sample_exhaustive(&qubo).unwrap(),
            Strategy::LowestEnergy,
            &fmt,
            3,
        )
        .unwrap();
        for c in [0.125, 2.0, 1024.0, 3.0, 0.1] {
            let set = sample_exhaustive(&scaled(&qubo, c)).unwrap();
            assert_eq!(
                select(&set, Strategy::LowestEnergy, &fmt, 3).unwrap(),
                base,
                "step {step}, scale {c}"
            );
        }
        prev = SolutionProfile::from_interior(&base, step + 1);
        assert_eq!(prev.len(), params.grid_points);
    }
}

#[test]
fn annealing_agrees_with_exhaustive_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let shapes = [
        (5, 2),
        (5, 4),
        (6, 3),
        (6, 5),
        (7, 2),
        (7, 4),
        (9, 2),
        (11, 2),
    ];
    let mut agreed = 0;
    for trial in 0..100u64 {
        let (ngp, n) = shapes[trial as usize % shapes.len()];
        let fmt = FixedPointFormat::new(n, 1).unwrap();
        let interior: Vec<f64> = (0..ngp - 2)
            .map(|_| rng.gen_range(0.0..fmt.max_value()))
            .collect();
        let qubo = channel_qubo(ngp, n, &SolutionProfile::from_interior(&interior, 0));
        assert!(qubo.num_vars() <= 20);
        let cfg = SamplerConfig::new(1000, trial, AnnealSchedule::default_for(&qubo));
        let set = sample_annealing(&qubo, &cfg).unwrap();
        set.verify(&qubo).unwrap();
        let exact = ground_states(&qubo).unwrap().energy;
        if set.lowest().unwrap().energy.to_bits() == exact.to_bits() {
            agreed += 1;
        }
    }
    assert!(
        agreed >= 99,
        "annealing matched the exhaustive minimum in {agreed}/100 trials"
    );
}
