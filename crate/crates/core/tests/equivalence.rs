#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use num_complex::Complex64;
use recursive_dft::windows::{freq_to_time, slepian_time, sum_of_cosine, CosineWindow};
use recursive_dft::{FilterBank, Method};

#[test]
fn fir_methods_match_direct_dft() {
    for (seed, k) in [(1, 8), (2, 16), (3, 64)] {
        let m = 2 * k + 1;
        let b = k / 2;
        let xs = random_stream(seed, 3 * m);
        let rect = vec![1.0; m];
        for method in [
            Method::DirectDft,
            Method::Sdft,
            Method::RecursiveModulatedSdft,
            Method::TableModulatedSdft,
        ] {
            let (raw, _) = run(&cfg(method, k, b), &xs);
            for n in m..3 * m {
                for kk in -(b as isize)..=b as isize {
                    let d =
                        (raw[n][(kk + b as isize) as usize] - direct_dft(&xs, n, kk, &rect)).norm();
                    assert!(d < 1e-10, "method {method} K={k} n={n} k={kk}: {d}");
                }
            }
        }
    }
}

#[test]
fn constant_input_hits_dc_only() {
    let xs = vec![1.0; 60];
    for method in [
        Method::DirectDft,
        Method::Sdft,
        Method::RecursiveModulatedSdft,
        Method::TableModulatedSdft,
    ] {
        let (raw, _) = run(&cfg(method, 8, 8), &xs);
        for row in &raw[17..] {
            for (i, v) in row.iter().enumerate() {
                let expect = if i == 8 { 1.0 } else { 0.0 };
                assert!((v - expect).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn real_tone_splits_into_two_halves() {
    let m = 33;
    let k0 = 5;
    let xs: Vec<f64> = (0..4 * m)
        .map(|n| (2.0 * std::f64::consts::PI * (k0 * n) as f64 / m as f64).cos())
        .collect();
    for method in [Method::DirectDft, Method::Sdft, Method::TableModulatedSdft] {
        let (raw, _) = run(&cfg(method, 16, 8), &xs);
        for row in &raw[m..] {
            assert!((row[8 + k0].norm() - 0.5).abs() < 1e-9);
            assert!((row[8 - k0].norm() - 0.5).abs() < 1e-9);
        }
    }
}

#[test]
fn table_modulator_matches_resonators() {
    let xs = random_stream(7, 3 * 65);
    let (a, _) = run(&cfg(Method::TableModulatedSdft, 32, 32), &xs);
    let (b, _) = run(&cfg(Method::Sdft, 32, 32), &xs);
    assert!(max_dev(&a, &b, 0) < 1e-10);
}

#[test]
fn deadbeat_observer_matches_sliding_dft() {
    for (seed, k) in [(11, 4), (12, 8), (13, 32)] {
        let m = 2 * k + 1;
        let xs = random_stream(seed, 4 * m);
        let (obs, _) = run(&cfg(Method::DeadbeatObserver, k, k), &xs);
        let (dft, _) = run(&cfg(Method::DirectDft, k, k), &xs);
        let d = max_dev(&obs, &dft, m);
        assert!(d < 1e-9, "K={k}: {d}");
    }
}

#[test]
fn deadbeat_prediction_error_vanishes_on_bin_tones() {
    let k = 8;
    let m = 17;
    let xs: Vec<f64> = (0..10 * m)
        .map(|n| {
            (0..=3)
                .map(|b| (2.0 * std::f64::consts::PI * (b * n) as f64 / m as f64 + b as f64).cos())
                .sum()
        })
        .collect();
    let mut bank = FilterBank::<f64>::build(cfg(Method::DeadbeatObserver, k, k)).unwrap();
    let frames = bank.process_real(&xs);
    let q = recursive_dft::quality(&frames[2 * m..]).unwrap();
    assert!(q < 1e-9, "{q}");
}

#[test]
fn slepian_dft_matches_windowed_direct_dft() {
    let k = 16;
    let m = 33;
    let xs = random_stream(21, 3 * m);
    let w = slepian_time(m, 2.0 / m as f64).unwrap().coeffs;
    let (raw, win) = run(&cfg(Method::SlepianDft, k, 8), &xs);
    for n in m..3 * m {
        for kk in -8isize..=8 {
            let idx = (kk + 8) as usize;
            let o = direct_dft(&xs, n, kk, &w);
            assert!((raw[n][idx] - o).norm() < 1e-10);
            assert!((win[n][idx] - o).norm() < 1e-10);
        }
    }
}

/// Applies `X̂(k) = Σ c(k') X_raw(k+k')` with edge pass-through, written out longhand.
fn correlate(raw: &[Complex64], coeffs: &[Complex64], half: usize) -> Vec<Complex64> {
    let b = (raw.len() - 1) / 2;
    (0..raw.len())
        .map(|i| {
            let k = i as isize - b as isize;
            if k.unsigned_abs() + half > b {
                return raw[i];
            }
            (0..coeffs.len())
                .map(|j| coeffs[j] * raw[(i as isize + j as isize - half as isize) as usize])
                .sum()
        })
        .collect()
}

#[test]
fn slepian_freq_window_is_correlation_of_method5() {
    let k = 16;
    let m = 33;
    let xs = random_stream(31, 3 * m);
    let c6 = cfg(Method::SlepianModulatedSdft, k, 10);
    let bank = FilterBank::<f64>::build(c6.clone()).unwrap();
    let win = bank.design().freq_window.clone().unwrap();
    let (_, w6) = run(&c6, &xs);
    let (r5, _) = run(&cfg(Method::TableModulatedSdft, k, 10), &xs);
    let expect: Vec<Vec<Complex64>> = r5
        .iter()
        .map(|r| correlate(r, &win.coeffs, win.half_width))
        .collect();
    assert!(max_dev(&w6, &expect, 0) < 1e-10);

    // Interior bins equal a direct DFT with the implied time window.
    let tw = freq_to_time(&win, m).unwrap().coeffs;
    let sum: f64 = tw.iter().sum();
    for n in m..3 * m {
        for kk in -8isize..=8 {
            let o = direct_dft(&xs, n, kk, &tw) * (sum / m as f64);
            assert!(
                (w6[n][(kk + 10) as usize] - o).norm() < 1e-9,
                "n={n} k={kk}"
            );
        }
    }
}

#[test]
fn hann_window_matches_time_taper() {
    let k = 8;
    let m = 17;
    let hann = sum_of_cosine(&CosineWindow::Hann, m).unwrap();
    let tw = freq_to_time(&hann, m).unwrap().coeffs;
    for (i, v) in tw.iter().enumerate() {
        let expect = 1.0 + (2.0 * std::f64::consts::PI * (i as f64 - k as f64) / m as f64).cos();
        assert!((v - expect).abs() < 1e-9, "{i}");
    }

    let xs = random_stream(41, 200);
    let (r11, w11) = run(&cfg(Method::HannFadingModulatedSdft, k, 6), &xs);
    let (r10, _) = run(&cfg(Method::FadingModulatedSdft, k, 6), &xs);
    let expect: Vec<Vec<Complex64>> = r10.iter().map(|r| correlate(r, &hann.coeffs, 1)).collect();
    assert!(max_dev(&w11, &expect, 0) < 1e-10);
    assert!(max_dev(&r11, &r10, 0) < 1e-10);
}

#[test]
fn stabilized_equals_fading_sdft_when_full_band() {
    let k = 8;
    let m = 17;
    let xs = random_stream(51, 20 * m);
    let (a, _) = run(&cfg(Method::StabilizedSdft, k, k), &xs);
    let (b, _) = run(&cfg(Method::FadingSdft, k, k), &xs);
    assert!(max_dev(&a, &b, 10 * m) < 1e-6);
}

#[test]
fn stabilized_hann_fused_matches_separate_window() {
    let k = 8;
    let xs = random_stream(61, 300);
    let c = cfg(Method::StabilizedSdft, k, 6).with_window(Some(recursive_dft::WindowSpec::Hann));
    let (raw, win) = run(&c, &xs);
    let hann = sum_of_cosine(&CosineWindow::Hann, 17).unwrap();
    let expect: Vec<Vec<Complex64>> = raw.iter().map(|r| correlate(r, &hann.coeffs, 1)).collect();
    assert!(max_dev(&win, &expect, 0) < 1e-10);
}
