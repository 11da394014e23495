mod common;

use common::{naive_dft_magnitudes, XorShift};
use pentropy::classify::{
    default_standardize, evaluate, fit_predict, snr_sweep, split, write_sweep_csv, Example,
    Method, SweepConfig,
};
use pentropy::entropy::mspe;
use pentropy::features::{
    extract_dataset, mspe_features, raw_features, spectrogram_features, FeatureKind, MspeGrid,
    SPECTROGRAM_CONFIGS,
};
use pentropy::synth::{make_dataset, DatasetConfig, Scheme};

fn noise(seed: u64, len: usize) -> Vec<f64> {
    let mut rng = XorShift(seed);
    (0..len).map(|_| rng.unit() - 0.5).collect()
}

#[test]
fn mspe_flatten_order_is_window_then_dimension_then_delay() {
    let x = noise(1, 2048);
    let grid = MspeGrid::default();
    let f = mspe_features(&x, &grid).unwrap();
    assert_eq!(f.len(), 280);
    let windows: [(usize, usize); 7] = [
        (0, 2048),
        (0, 1024),
        (1024, 2048),
        (0, 512),
        (512, 1024),
        (1024, 1536),
        (1536, 2048),
    ];
    for (index, &v) in f.values.iter().enumerate() {
        let (w, n, tau) = grid.locate(index).unwrap();
        let (a, b) = windows[w];
        let m = mspe::<f64, f64>(&x[a..b], &[n], &[tau], false).unwrap();
        assert_eq!(v, m.get(0, 0), "index {index}");
    }
    // golden positions
    assert_eq!(grid.locate(41), Some((1, 3, 5)));
    assert_eq!(grid.locate(3 * 40 + 2 * 8 + 5), Some((3, 5, 30)));
}

#[test]
fn mspe_is_affine_invariant_but_raw_and_spectrogram_are_not() {
    let x = noise(2, 2048);
    let y: Vec<f64> = x.iter().map(|v| 5.0 * v).collect();
    let z: Vec<f64> = x.iter().map(|v| 2.5 * v + 7.0).collect();
    let grid = MspeGrid::default();
    let fx = mspe_features(&x, &grid).unwrap();
    assert_eq!(fx.values, mspe_features(&y, &grid).unwrap().values);
    assert_eq!(fx.values, mspe_features(&z, &grid).unwrap().values);
    assert_ne!(raw_features(&x).values, raw_features(&z).values);
    assert_ne!(
        spectrogram_features(&x).unwrap().values,
        spectrogram_features(&z).unwrap().values
    );
}

#[test]
fn normalized_grid_switches_scale() {
    let x = noise(3, 2048);
    let raw = mspe_features(&x, &MspeGrid::default()).unwrap();
    let norm = mspe_features(&x, &MspeGrid::new(vec![3, 4, 5, 6, 7], vec![1, 5, 10, 15, 20, 30, 40, 50], true).unwrap()).unwrap();
    assert!(raw.values.iter().any(|&v| v > 1.0));
    assert!(norm.values.iter().all(|&v| (0.0..=1.0).contains(&v)));
}

#[test]
fn spectrogram_matches_direct_dft() {
    let x = noise(4, 2048);
    let f = spectrogram_features(&x).unwrap();
    let mut offset = 0;
    for &(len, count) in &SPECTROGRAM_CONFIGS {
        for w in 0..count {
            let window = &x[w * len..(w + 1) * len];
            let expect = naive_dft_magnitudes(window);
            let got = &f.values[offset..offset + expect.len()];
            for (a, b) in got.iter().zip(&expect) {
                assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "{a} vs {b}");
            }
            // Parseval over the full spectrum, reconstructed from the one-sided half
            let energy: f64 = window.iter().map(|v| v * v).sum();
            let half = len / 2;
            let spectral: f64 = (0..=half)
                .map(|k| {
                    let m2 = got[k] * got[k];
                    if k == 0 || k == half { m2 } else { 2.0 * m2 }
                })
                .sum::<f64>()
                / len as f64;
            assert!((energy - spectral).abs() <= 1e-6 * energy);
            offset += expect.len();
        }
    }
    assert_eq!(offset, f.len());
}

#[test]
fn centroid_ignores_constant_feature() {
    let mut rng = XorShift(5);
    let items: Vec<Example<f64>> = (0..60)
        .map(|i| Example::new(i % 3, vec![(i % 3) as f64 + rng.unit(), rng.unit()]))
        .collect();
    let (train, test) = split(&items, 0.3, 2).unwrap();
    let labels: Vec<String> = (0..3).map(|i| i.to_string()).collect();
    let base = fit_predict(&train, &test, &labels, Method::Centroid, false).unwrap();
    let pad = |v: &[Example<f64>]| -> Vec<Example<f64>> {
        v.iter()
            .map(|e| {
                let mut f = e.features.clone();
                f.push(42.0);
                Example::new(e.label, f)
            })
            .collect()
    };
    let padded = fit_predict(&pad(&train), &pad(&test), &labels, Method::Centroid, false).unwrap();
    assert_eq!(base, padded);
}

#[test]
fn knn1_reproduces_duplicated_training_labels() {
    let items: Vec<Example<f64>> = (0..20)
        .map(|i| Example::new(i % 4, vec![i as f64 * 3.0, -(i as f64)]))
        .collect();
    let labels: Vec<String> = (0..4).map(|i| i.to_string()).collect();
    let cm = fit_predict(&items, &items, &labels, Method::Knn(1), false).unwrap();
    assert_eq!(cm.trace(), 20);
    assert_eq!(cm.row_sums(), vec![5, 5, 5, 5]);
}

#[test]
fn pipeline_is_deterministic_and_mspe_beats_raw() {
    let cfg = DatasetConfig::new(40, Some(25.0), 11);
    let ds = make_dataset(&Scheme::ALL, &cfg).unwrap();
    let grid = MspeGrid::default();
    let run = |kind| {
        let fs = extract_dataset(&ds, kind, &grid).unwrap();
        evaluate(&fs, Method::Centroid, default_standardize(kind), 0.3, 11).unwrap()
    };
    let mspe_cm = run(FeatureKind::Mspe);
    assert_eq!(mspe_cm, run(FeatureKind::Mspe));
    let raw_cm = run(FeatureKind::Raw);
    assert_eq!(mspe_cm.total(), 60);
    assert_eq!(mspe_cm.row_sums(), vec![12; 5]);
    assert!(mspe_cm.accuracy() > raw_cm.accuracy());
}

#[test]
fn sweep_shape_and_csv() {
    let mut cfg = SweepConfig::new(
        vec![Scheme::Bpsk, Scheme::Am],
        vec![25.0],
        vec![FeatureKind::Mspe, FeatureKind::Raw],
        3,
    );
    cfg.per_class = 6;
    let rows = snr_sweep(&cfg).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].kind, FeatureKind::Mspe);
    assert_eq!(rows, snr_sweep(&cfg).unwrap());
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &rows).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "snr,kind,accuracy,seed");
    assert!(lines[1].starts_with("25,mspe,"));
    assert!(lines[1].ends_with(",3"));
}

#[test]
fn feature_exports() {
    let ds = make_dataset(&[Scheme::Ook, Scheme::Fsk2], &DatasetConfig::new(2, Some(5.0), 1)).unwrap();
    let fs = extract_dataset(&ds, FeatureKind::Mspe, &MspeGrid::default()).unwrap();
    let mut buf = Vec::new();
    fs.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), 281);
    assert_eq!(header[0], "label");
    assert_eq!(header[280], "f_279");
    assert!(lines.next().unwrap().starts_with("ook,"));
    let json: serde_json::Value = serde_json::from_str(&fs.to_json().unwrap()).unwrap();
    assert_eq!(json["kind"], "mspe");
    assert_eq!(json["dimension"], 280);
    assert_eq!(json["grid"]["delays"][7], 50);
    assert_eq!(json["rows"].as_array().unwrap().len(), 4);
    assert!(json["spec_version"].is_string());
}
