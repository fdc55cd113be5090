mod common;

use cmnb::analysis::moments;
use cmnb::datasets::ALL;
use cmnb::dist::{CmnbParams, NormalizedPmf};
use cmnb::estimation::{mle_fit, score, FitConfig, FitStatus, ModelKind, ModelParams};
use cmnb::table::FrequencyTable;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

// Fixed generator seeds: some rare random cases made the suite run for
// minutes, so the case set is pinned for reproducible run times.
proptest! {
    #![proptest_config(ProptestConfig {
        rng_seed: RngSeed::Fixed(0x5eed),
        ..ProptestConfig::with_cases(50)
    })]

    #[test]
    fn score_agrees_with_finite_differences(
        seed in any::<u64>(),
        r in 0.1f64..6.0,
        nu in 0.2f64..3.0,
        p in 0.02f64..0.7,
    ) {
        let mut rng = common::rng(seed);
        let truth = common::random_cmnb(&mut rng);
        let t = common::simulated_table(&mut rng, truth, 1500);
        let at: ModelParams = CmnbParams::new(r, nu, p).unwrap().into();
        let s = score(&t, at).unwrap();
        let fd = common::fd_score(&t, at);
        for (a, b) in s.iter().zip(&fd) {
            prop_assert!((a - b).abs() <= 1e-4 * b.abs().max(1.0), "{a} vs {b}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        rng_seed: RngSeed::Fixed(0x5eed),
        ..ProptestConfig::with_cases(16)
    })]

    #[test]
    fn fit_ignores_row_order_and_splitting(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let truth = common::random_cmnb(&mut rng);
        let t = common::simulated_table(&mut rng, truth, 800);
        let mut rows: Vec<(u64, u64)> = Vec::new();
        for &(v, c) in t.entries().iter().rev() {
            rows.push((v, c / 3));
            rows.push((v, c - c / 3));
        }
        let shuffled = FrequencyTable::from_pairs(rows).unwrap();
        // An all-zero sample has no estimate; both layouts must then fail alike.
        let (a, b) = match (mle_fit(&t, &FitConfig::default()), mle_fit(&shuffled, &FitConfig::default())) {
            (Ok(a), Ok(b)) => (a, b),
            (a, b) => {
                prop_assert_eq!(a.err(), b.err());
                return Ok(());
            }
        };
        for (x, y) in a.model.values().iter().zip(b.model.values()) {
            prop_assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0));
        }
    }
}

#[test]
fn converged_fits_match_sample_moments() {
    let mut rng = common::rng(21);
    let mut tables: Vec<FrequencyTable> = ALL.iter().map(|d| d.table()).collect();
    for _ in 0..10 {
        let truth = common::random_cmnb(&mut rng);
        tables.push(common::simulated_table(&mut rng, truth, 3000));
    }
    let mut converged = 0;
    for t in &tables {
        for kind in [ModelKind::Cmnb, ModelKind::Nb, ModelKind::Cmp] {
            let fit = kind.fit(t, &FitConfig::default()).unwrap();
            assert!(
                fit.loglik_trace.windows(2).all(|w| w[1] >= w[0]),
                "ascent violated"
            );
            assert!(fit.log_likelihood.is_finite());
            assert_eq!(fit.converged, fit.status == FitStatus::Converged);
            if fit.converged {
                converged += 1;
                assert!(fit.gradient_norm <= 1e-8);
                let m =
                    moments(&NormalizedPmf::with_defaults(fit.model.family()).unwrap()).unwrap();
                assert!(
                    (m.mean - t.mean()).abs() <= 1e-6 * t.mean(),
                    "{kind:?} {:?}",
                    fit.model
                );
            }
        }
    }
    assert!(converged >= tables.len());
}

#[test]
fn cmnb_dominates_nb_on_every_dataset() {
    for d in ALL {
        let t = d.table();
        let cmnb = ModelKind::Cmnb.fit(&t, &FitConfig::default()).unwrap();
        let nb = ModelKind::Nb.fit(&t, &FitConfig::default()).unwrap();
        assert!(
            cmnb.log_likelihood >= nb.log_likelihood - 1e-8,
            "{}",
            d.name
        );
    }
}

#[test]
fn sufficient_statistics_match_at_interior_optimum() {
    // Large exact-shape sample: the fit converges in the interior.
    let truth = CmnbParams::new(0.5, 2.0, 0.3).unwrap();
    let d = NormalizedPmf::with_defaults(truth).unwrap();
    let counts: Vec<u64> = d
        .support_pmf()
        .iter()
        .map(|p| (p * 1e8).round() as u64)
        .collect();
    let t = FrequencyTable::from_counts(&counts).unwrap();
    let fit = mle_fit(&t, &FitConfig::default()).unwrap();
    assert!(fit.converged);
    let s = score(&t, fit.model).unwrap();
    let n = t.n() as f64;
    for v in s {
        assert!(v.abs() / n < 1e-6);
    }
}
