use proptest::prelude::*;
use risop_core::model::Sigmas;
use risop_core::montecarlo::wilson_interval;
use risop_core::specfun::{bessel_j0, kummer_1f1, pcf_d, reg_lower_gamma};
use risop_core::surrogate::{read_dataset, write_dataset, Dataset, DatasetRecord, MlpModel};
use risop_core::{
    db_to_linear, linear_to_db, op_approx_closed, op_approx_numeric, op_exact, pdf_x_exact, GammaFit, GridSpec,
    SystemParams,
};

fn sigma() -> impl Strategy<Value = f64> {
    0.5..2.0f64
}

fn scenario() -> impl Strategy<Value = SystemParams> {
    (2u32..24, sigma(), sigma(), sigma(), sigma(), -5.0..25.0f64, -5.0..10.0f64, -5.0..5.0f64).prop_map(
        |(n, sr, rd, ir, id, snr, inr, th)| {
            SystemParams::new(n, Sigmas { sr, rd, ir, id }, snr, inr, th).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn db_round_trip(db in -80.0..80.0f64) {
        prop_assert!((linear_to_db(db_to_linear(db)) - db).abs() < 1e-12);
    }

    #[test]
    fn gamma_fit_recovers_moments(mean in 0.01..100.0f64, cv in 0.05..3.0f64) {
        let var = (cv * mean).powi(2);
        let f = GammaFit::from_moments(mean, var).unwrap();
        prop_assert!((f.mean() / mean - 1.0).abs() < 1e-12);
        prop_assert!((f.variance() / var - 1.0).abs() < 1e-12);
    }

    #[test]
    fn regularized_gamma_is_a_cdf(a in 0.05..40.0f64, x in 0.0..80.0f64, dx in 0.0..5.0f64) {
        let p = reg_lower_gamma(a, x).unwrap();
        let q = reg_lower_gamma(a, x + dx).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!(q >= p - 1e-15);
    }

    #[test]
    fn kummer_transformation(a in 0.1..5.0f64, b in 0.5..6.0f64, z in -10.0..10.0f64) {
        let lhs = kummer_1f1(a, b, z).unwrap();
        let rhs = z.exp() * kummer_1f1(b - a, b, -z).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(rhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn pcf_three_term_recurrence(nu in -6.0..0.0f64, z in 0.0..6.0f64) {
        // D_{ν+1}(z) − z D_ν(z) + ν D_{ν−1}(z) = 0.
        let (dm, d0, dp) = (pcf_d(nu - 1.0, z).unwrap(), pcf_d(nu, z).unwrap(), pcf_d(nu + 1.0, z).unwrap());
        let scale = dp.abs().max((z * d0).abs()).max((nu * dm).abs());
        prop_assert!((dp - z * d0 + nu * dm).abs() <= 1e-9 * scale);
    }

    #[test]
    fn j0_is_even_and_bounded(x in 0.0..500.0f64) {
        let v = bessel_j0(x);
        prop_assert!(v.abs() <= 1.0);
        prop_assert_eq!(v, bessel_j0(-x));
    }

    #[test]
    fn wilson_interval_is_proper(n in 1u64..10_000_000, frac in 0.0..=1.0f64, z in 0.5..4.0f64) {
        let hits = ((n as f64) * frac) as u64;
        let (c, h) = wilson_interval(hits, n, z);
        let p = hits as f64 / n as f64;
        prop_assert!(h > 0.0);
        prop_assert!(c - h >= -1e-15 && c + h <= 1.0 + 1e-15);
        prop_assert!(c - h <= p + 1e-15 && p <= c + h + 1e-15);
    }

    #[test]
    fn closed_form_matches_numeric(kx in 1u32..8, ky in 0.3..10.0f64, tx in 0.2..4.0f64, ty in 0.2..4.0f64,
                                   th in 0.2..5.0f64, gb_db in -5.0..30.0f64) {
        let fx = GammaFit::new(kx as f64, tx).unwrap();
        let fy = GammaFit::new(ky, ty).unwrap();
        let gb = db_to_linear(gb_db);
        let a = op_approx_closed(&fx, &fy, th, gb).unwrap().value;
        let b = op_approx_numeric(&fx, &fy, th, gb).unwrap().value;
        prop_assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn dataset_csv_round_trip(rows in prop::collection::vec(
        (prop::array::uniform6(-50.0..50.0f64), 1u32..200, 0.0..=1.0f64), 1..20)) {
        let records: Vec<DatasetRecord> = rows
            .iter()
            .map(|(x, n, t)| {
                let mut input = [0.0; 7];
                input[..6].copy_from_slice(x);
                input[6] = *n as f64;
                DatasetRecord::new(input, *t).unwrap()
            })
            .collect();
        let mut buf = Vec::new();
        write_dataset(&mut buf, records.clone()).unwrap();
        prop_assert_eq!(read_dataset(buf.as_slice()).unwrap(), Dataset { records });
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn outage_is_a_probability_and_monotone(p in scenario(), dth in 0.5..5.0f64, dsnr in 0.5..5.0f64) {
        let base = op_exact(&p).unwrap().value;
        prop_assert!((0.0..=1.0).contains(&base));
        let harder = op_exact(&p.with_gamma_th_db(p.gamma_th_db() + dth).unwrap()).unwrap().value;
        let easier = op_exact(&p.with_snr_db(p.snr_db() + dsnr).unwrap()).unwrap().value;
        let noisier = op_exact(&p.with_inr_db(p.inr_db() + dsnr).unwrap()).unwrap().value;
        let slack = 1e-12;
        prop_assert!(harder >= base - slack, "threshold: {harder} < {base}");
        prop_assert!(easier <= base + slack, "snr: {easier} > {base}");
        prop_assert!(noisier >= base - slack, "inr: {noisier} < {base}");
    }

    #[test]
    fn exact_x_density_is_normalized(p in scenario()) {
        let g = pdf_x_exact(&p, GridSpec::default()).unwrap();
        prop_assert!(g.density.iter().all(|&d| d >= -1e-10));
        prop_assert!((g.integral() - 1.0).abs() < 1e-6, "{}", g.integral());
    }

    #[test]
    fn surrogate_output_is_a_probability(seed in any::<u64>(), x in prop::array::uniform7(-100.0..100.0f64)) {
        let data = Dataset {
            records: (0..4)
                .map(|i| {
                    let v = i as f64;
                    DatasetRecord::new([v - 5.0, 10.0 * v, 1.0, 1.0, 1.0, 1.0, 2.0 + v], 0.1 * v).unwrap()
                })
                .collect(),
        };
        let m = MlpModel::init(&data, seed).unwrap();
        let y = m.predict(&x);
        prop_assert!((0.0..=1.0).contains(&y));
    }
}
