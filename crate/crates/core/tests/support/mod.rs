//! Fixtures and randomized invariant checks shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;

use ndarray::Array2;
use photonic_snn::dpe::*;
use photonic_snn::energy::EnergyModel;
use photonic_snn::neuron::{if_step, NeuronState};
use photonic_snn::optics::*;
use photonic_snn::rng::purpose_rng;
use photonic_snn::snn::*;
use photonic_snn::sum::ExactSum;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::Rng;

pub const CASES: u32 = 1000;

/// MNIST directory: `PSNN_MNIST_DIR` or `<workspace>/data/mnist`.
pub fn mnist_dir() -> PathBuf {
    std::env::var_os("PSNN_MNIST_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/mnist"))
}

pub struct Fixture {
    pub stack: WaveguideStack,
    pub bank: RingBank,
    pub device: DeviceContext,
}

pub fn fixture() -> Fixture {
    let stack = WaveguideStack::default();
    let bank = design_ring_bank(&RingDesign::default(), &stack, &BankSpec::default()).unwrap();
    let table = build_level_table(&bank, &stack, &LevelSpec::default()).unwrap();
    let alpha = crosstalk_alpha(&bank, &table, &stack).unwrap();
    let readout = Readout::normalized(&table, 1.0);
    Fixture { stack, bank, device: DeviceContext { table, alpha, readout } }
}

fn runner() -> TestRunner {
    TestRunner::new(Config { cases: CASES, failure_persistence: None, ..Config::default() })
}

fn outcome<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

/// Random tile on the fixture's level table.
fn tile_strategy(fx: &Fixture) -> impl Strategy<Value = DpeTile> {
    let table = fx.device.table.clone();
    let readout = fx.device.readout;
    let levels = table.level_count() as u16;
    let width = table.ring_count();
    (1usize..6).prop_flat_map(move |rows| {
        let table = table.clone();
        proptest::collection::vec((0..levels, 0..levels), rows * width).prop_map(move |lv| {
            let n = lv.len();
            let mut tile = DpeTile {
                rows: n / width,
                width,
                level_pos: vec![0; n],
                level_neg: vec![0; n],
                t_pos: vec![0.0; n],
                t_neg: vec![0.0; n],
                readout,
            };
            for (k, (p, q)) in lv.into_iter().enumerate() {
                tile.level_pos[k] = p;
                tile.level_neg[k] = q;
                tile.t_pos[k] = table.transmission(k % width, p as usize);
                tile.t_neg[k] = table.transmission(k % width, q as usize);
            }
            tile
        })
    })
}

fn powers(width: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.0f64..1e-3, width)
}

fn rel_close(a: f64, b: f64, scale: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * scale.max(f64::MIN_POSITIVE)
}

// ---- optics -----------------------------------------------------------

pub fn pass_transmission_bounded() -> Result<(), String> {
    outcome(runner().run(&(1e-6f64..=1.0, 1e-6f64..0.999_999, -50.0f64..50.0, -20i32..20), |(a, r, theta, k)| {
        let t = pass_transmission(a, r, theta);
        prop_assert!((0.0..=1.0).contains(&t), "T = {t}");
        let on = pass_transmission(a, r, 2.0 * PI * f64::from(k));
        let closed = ((a - r) / (1.0 - a * r)).powi(2);
        prop_assert!((on - closed).abs() <= 1e-9 * closed.max(1e-12), "{on} vs {closed}");
        Ok(())
    }))
}

pub fn resonant_transmission_monotone_in_p() -> Result<(), String> {
    let fx = fixture();
    for (i, ring) in fx.bank.rings.iter().enumerate() {
        let mut last = -1.0;
        for k in 0..=20 {
            let p = GstState::new(f64::from(k) / 20.0).unwrap();
            let t = ring.resonant_transmission(p, &fx.stack, fx.bank.mode_order).unwrap();
            if t < last {
                return Err(format!("ring {i}: T decreases at p = {}", p.p()));
            }
            last = t;
        }
    }
    Ok(())
}

pub fn mode_index_strictly_increasing() -> Result<(), String> {
    let stack = WaveguideStack::default();
    outcome(runner().run(&(0.0f64..=1.0, 0.0f64..=1.0), |(x, y)| {
        prop_assume!((x - y).abs() > 1e-9);
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        let a = effective_mode_index(GstState::new(lo).unwrap(), &stack);
        let b = effective_mode_index(GstState::new(hi).unwrap(), &stack);
        prop_assert!(b.n > a.n && b.kappa > a.kappa);
        Ok(())
    }))
}

pub fn permittivity_endpoints() -> Result<(), String> {
    let check = |got: num_complex::Complex64, want: num_complex::Complex64| (got - want).norm() <= 1e-12 * want.norm();
    let a = ComplexIndex::AMORPHOUS_GST.permittivity();
    let c = ComplexIndex::CRYSTALLINE_GST.permittivity();
    if check(effective_permittivity(GstState::AMORPHOUS), a) && check(effective_permittivity(GstState::CRYSTALLINE), c) {
        Ok(())
    } else {
        Err("endpoint permittivities differ from the pure phases".into())
    }
}

pub fn spectral_identities() -> Result<(), String> {
    let stack = WaveguideStack::default();
    outcome(runner().run(&(1.45e-6f64..1.65e-6, 150e-9f64..230e-9, 0.0f64..=1.0), |(radius, l_gst, p)| {
        let base = RingDesign { radius, l_gst, ..RingDesign::default() };
        let ring = calibrate_critical_coupling(&base, &stack, REFERENCE_WAVELENGTH).unwrap();
        let p = GstState::new(p).unwrap();
        let s = spectral_summary(&ring, p, &stack, DEFAULT_BAND).unwrap();
        prop_assert!(s.fsr > s.fwhm && s.fwhm > 0.0);
        prop_assert_eq!(s.finesse, s.fsr / s.fwhm);
        for r in &s.resonances {
            prop_assert_eq!(r.finesse, r.fsr / r.fwhm);
            let theta = ring.phase(p, &stack, r.wavelength);
            let k = (theta / (2.0 * PI)).round();
            prop_assert!((theta - 2.0 * PI * k).abs() < 1e-6);
        }
        Ok(())
    }))
}

// ---- dpe --------------------------------------------------------------

pub fn bank_fits_in_fsr() -> Result<(), String> {
    let fx = fixture();
    let n = fx.bank.len() as f64;
    let w = &fx.bank.channel_wavelengths;
    if !w.windows(2).all(|p| p[1] > p[0]) {
        return Err("channel wavelengths not strictly increasing".into());
    }
    if !(fx.bank.span() < fx.bank.fsr && n * fx.bank.channel_spacing < fx.bank.fsr) {
        return Err(format!("span {} / N·spacing {} exceed FSR {}", fx.bank.span(), n * fx.bank.channel_spacing, fx.bank.fsr));
    }
    Ok(())
}

pub fn dpe_is_linear() -> Result<(), String> {
    let fx = fixture();
    let alpha = fx.device.alpha.clone();
    let w = fx.bank.len();
    let strat = (tile_strategy(&fx), powers(w), powers(w), 0.0f64..10.0, 0.0f64..10.0);
    outcome(runner().run(&strat, |(tile, p1, p2, a, b)| {
        let mix: Vec<f64> = p1.iter().zip(&p2).map(|(x, y)| a * x + b * y).collect();
        let (o, on) = dpe_forward(&tile, &mix, &alpha).unwrap();
        let (o1, n1) = dpe_forward(&tile, &p1, &alpha).unwrap();
        let (o2, n2) = dpe_forward(&tile, &p2, &alpha).unwrap();
        for j in 0..tile.rows {
            for (got, x, y) in [(o[j], o1[j], o2[j]), (on[j], n1[j], n2[j])] {
                let want = a * x + b * y;
                prop_assert!(rel_close(got, want, want.abs().max(a * x.abs() + b * y.abs()), 1e-12), "{got} vs {want}");
            }
        }
        Ok(())
    }))
}

pub fn dpe_matches_scalar_loop() -> Result<(), String> {
    let fx = fixture();
    let alpha = fx.device.alpha.clone();
    let strat = (tile_strategy(&fx), powers(fx.bank.len()));
    outcome(runner().run(&strat, |(tile, p)| {
        let (pos, neg) = dpe_forward(&tile, &p, &alpha).unwrap();
        for j in 0..tile.rows {
            let (mut sp, mut sn) = (0.0, 0.0);
            for i in 0..tile.width {
                let k = j * tile.width + i;
                sp += alpha.get(i, tile.level_pos[k] as usize) * tile.t_pos[k] * p[i];
                sn += alpha.get(i, tile.level_neg[k] as usize) * tile.t_neg[k] * p[i];
            }
            let r = tile.readout;
            let (wp, wn) = (r.gain_k * (r.responsivity * sp), r.gain_k * (r.responsivity * sn));
            prop_assert!(rel_close(pos[j], wp, wp.abs(), 1e-12) && rel_close(neg[j], wn, wn.abs(), 1e-12));
        }
        Ok(())
    }))
}

pub fn unit_alpha_is_ideal_product() -> Result<(), String> {
    let fx = fixture();
    let ideal = CrosstalkMap::ideal(fx.bank.len(), fx.device.table.level_count());
    let strat = (tile_strategy(&fx), powers(fx.bank.len()));
    outcome(runner().run(&strat, |(tile, p)| {
        let (pos, neg) = dpe_forward(&tile, &p, &ideal).unwrap();
        for j in 0..tile.rows {
            let (mut sp, mut sn) = (ExactSum::new(), ExactSum::new());
            for i in 0..tile.width {
                let k = j * tile.width + i;
                sp.add(tile.t_pos[k] * p[i]);
                sn.add(tile.t_neg[k] * p[i]);
            }
            let r = tile.readout;
            prop_assert_eq!(pos[j], r.gain_k * (r.responsivity * sp.value()));
            prop_assert_eq!(neg[j], r.gain_k * (r.responsivity * sn.value()));
        }
        Ok(())
    }))
}

fn weight_matrix() -> impl Strategy<Value = Array2<f64>> {
    (1usize..6, 1usize..40).prop_flat_map(|(r, c)| {
        proptest::collection::vec(-2.0f64..2.0, r * c).prop_map(move |v| Array2::from_shape_vec((r, c), v).unwrap())
    })
}

pub fn quantization_is_total_and_antisymmetric() -> Result<(), String> {
    let fx = fixture();
    let table = fx.device.table.clone();
    let readout = fx.device.readout;
    outcome(runner().run(&weight_matrix(), |w| {
        let m = map_weights(&w, &table, readout).unwrap();
        let n = map_weights(&w.mapv(|x| -x), &table, readout).unwrap();
        let step = m.weight_scale / (table.level_count() - 1) as f64;
        for (t, (a, b)) in m.tiles.iter().zip(&n.tiles).enumerate() {
            prop_assert_eq!(&a.t_pos, &b.t_neg);
            prop_assert_eq!(&a.t_neg, &b.t_pos);
            for k in 0..a.t_pos.len() {
                let ring = k % m.width;
                prop_assert!(table.contains(ring, a.t_pos[k]) && table.contains(ring, a.t_neg[k]));
                prop_assert!(a.t_pos[k] >= table.t_low(ring) && a.t_neg[k] >= table.t_low(ring));
                let col = t * m.width + ring;
                if col < m.in_dim {
                    let row = k / m.width;
                    let level = m.levels[row * m.in_dim + col];
                    let deq = f64::from(level) * step;
                    prop_assert!((deq - w[[row, col]]).abs() <= 0.5 * step * (1.0 + 1e-12));
                }
            }
        }
        Ok(())
    }))
}

// ---- neuron -----------------------------------------------------------

pub fn constant_drive_interval() -> Result<(), String> {
    let dyadic = || (1i32..256).prop_map(|k| f64::from(k) / 64.0);
    outcome(runner().run(&(dyadic(), dyadic(), 0usize..50), |(v_th, c, warmup)| {
        let mut n = NeuronState::new(v_th, 0.0).unwrap();
        // Arbitrary history, then a reset.
        for _ in 0..warmup {
            if_step(&mut n, c, 0.0);
        }
        n.reset();
        let expected = (v_th / c).ceil() as usize;
        let mut fires = Vec::new();
        for t in 0..4 * expected + 4 {
            if if_step(&mut n, c, 0.0) {
                fires.push(t + 1);
            }
        }
        prop_assert_eq!(fires[0], expected);
        for w in fires.windows(2) {
            prop_assert_eq!(w[1] - w[0], expected);
        }
        Ok(())
    }))
}

pub fn trace_translation_invariant() -> Result<(), String> {
    let strat = (proptest::collection::vec(-64i32..96, 1..80), -32i32..32);
    outcome(runner().run(&strat, |(drives, shift)| {
        let d = f64::from(shift) / 8.0;
        let mut a = NeuronState::new(1.0, 0.0).unwrap();
        let mut b = NeuronState::new(1.0 + d, d).unwrap();
        for k in drives {
            let x = f64::from(k) / 64.0;
            prop_assert_eq!(if_step(&mut a, x.max(0.0), (-x).max(0.0)), if_step(&mut b, x.max(0.0), (-x).max(0.0)));
            prop_assert_eq!(a.v_mem + d, b.v_mem);
        }
        Ok(())
    }))
}

pub fn no_spontaneous_firing() -> Result<(), String> {
    outcome(runner().run(&(1usize..300, -5.0f64..0.999, 0.5f64..3.0), |(steps, v0, v_th)| {
        let mut n = NeuronState::new(v_th, 0.0).unwrap();
        n.v_mem = v0 * v_th;
        let start = n.v_mem;
        for _ in 0..steps {
            prop_assert!(!if_step(&mut n, 0.0, 0.0));
        }
        prop_assert_eq!(n.v_mem, start);
        Ok(())
    }))
}

// ---- snn --------------------------------------------------------------

/// A random converted network with a partial last tile.
pub fn random_snn(seed: u64, sizes: &[usize]) -> SnnModel {
    let mut rng = purpose_rng(seed, "fixture");
    let weights: Vec<Array2<f64>> = sizes
        .windows(2)
        .map(|w| Array2::from_shape_simple_fn((w[1], w[0]), || rng.random_range(-0.5..1.0)))
        .collect();
    let thresholds = sizes.windows(2).map(|w| 0.15 * w[0] as f64).collect();
    SnnModel {
        model: MlpModel::from_weights(weights, seed).unwrap(),
        scales: vec![1.0; sizes.len() - 1],
        thresholds,
        conversion: ConversionConfig::default(),
    }
}

fn random_encoding(seed: u64, width: usize) -> SpikeEncoding {
    let mut rng = purpose_rng(seed, "pixels");
    let x: Vec<f64> = (0..width).map(|_| rng.random::<f64>()).collect();
    encode_poisson(&x, 12, 1.0, &mut purpose_rng(seed, "spikes")).unwrap()
}

fn snn_runner() -> TestRunner {
    TestRunner::new(Config { cases: 200, failure_persistence: None, ..Config::default() })
}

pub fn tiling_invariance() -> Result<(), String> {
    let fx = fixture();
    let trace = TraceOptions { rasters: true, vmem_layer: None };
    outcome(snn_runner().run(&(any::<u64>(), 17usize..60), |(seed, width)| {
        let snn = random_snn(seed, &[width, 20, 5]);
        let net = SnnNetwork::new(&snn, Mode::Crosstalk, Some(&fx.device), DEFAULT_AMPLITUDE).unwrap();
        let enc = random_encoding(seed, width);
        let a = run_inference(&net, &enc, Evaluation::Monolithic, trace).unwrap();
        let b = run_inference(&net, &enc, Evaluation::Tiled, trace).unwrap();
        prop_assert_eq!(a, b);
        Ok(())
    }))
}

pub fn determinism() -> Result<(), String> {
    let fx = fixture();
    let trace = TraceOptions { rasters: true, vmem_layer: Some(0) };
    outcome(snn_runner().run(&any::<u64>(), |seed| {
        let snn = random_snn(seed, &[24, 10, 4]);
        let net = SnnNetwork::new(&snn, Mode::Quantized, Some(&fx.device), DEFAULT_AMPLITUDE).unwrap();
        let x: Vec<f64> = (0..24).map(|i| f64::from(i as u32) / 24.0).collect();
        let config = RunConfig { seed, ..RunConfig::default() };
        let e1 = encode_image(&x, 5, &config).unwrap();
        let e2 = encode_image(&x, 5, &config).unwrap();
        prop_assert_eq!(&e1, &e2);
        let a = run_inference(&net, &e1, Evaluation::Monolithic, trace).unwrap();
        let b = run_inference(&net, &e2, Evaluation::Monolithic, trace).unwrap();
        let model = EnergyModel::new(&net.mapped, DEFAULT_AMPLITUDE, DEFAULT_PULSE_WIDTH).unwrap();
        prop_assert_eq!(
            model.image_ledger(&a.input_counts, 35).unwrap(),
            model.image_ledger(&b.input_counts, 35).unwrap()
        );
        prop_assert_eq!(a, b);
        Ok(())
    }))
}

pub fn amplitude_homogeneity() -> Result<(), String> {
    let fx = fixture();
    let trace = TraceOptions { rasters: true, vmem_layer: None };
    outcome(snn_runner().run(&(any::<u64>(), -3i32..4), |(seed, e)| {
        let snn = random_snn(seed, &[30, 12, 4]);
        let c = 2f64.powi(e);
        let base = SnnNetwork::new(&snn, Mode::Crosstalk, Some(&fx.device), DEFAULT_AMPLITUDE).unwrap();
        let scaled = SnnNetwork::new(&snn, Mode::Crosstalk, Some(&fx.device), c * DEFAULT_AMPLITUDE).unwrap();
        for (a, b) in base.thresholds.iter().zip(&scaled.thresholds) {
            prop_assert_eq!(c * a, *b);
        }
        let enc = random_encoding(seed, 30);
        let a = run_inference(&base, &enc, Evaluation::Monolithic, trace).unwrap();
        let b = run_inference(&scaled, &enc, Evaluation::Monolithic, trace).unwrap();
        prop_assert_eq!(a.rasters, b.rasters);
        Ok(())
    }))
}

pub fn weight_threshold_homogeneity() -> Result<(), String> {
    let trace = TraceOptions { rasters: true, vmem_layer: None };
    outcome(snn_runner().run(&(any::<u64>(), -3i32..4, 0usize..2), |(seed, e, layer)| {
        let snn = random_snn(seed, &[30, 12, 4]);
        let c = 2f64.powi(e);
        let mut scaled = snn.clone();
        scaled.model.weights[layer].mapv_inplace(|w| w * c);
        scaled.thresholds[layer] *= c;
        let a = SnnNetwork::new(&snn, Mode::Ideal, None, 1.0).unwrap();
        let b = SnnNetwork::new(&scaled, Mode::Ideal, None, 1.0).unwrap();
        let enc = random_encoding(seed, 30);
        let ra = run_inference(&a, &enc, Evaluation::Monolithic, trace).unwrap();
        let rb = run_inference(&b, &enc, Evaluation::Monolithic, trace).unwrap();
        prop_assert_eq!(ra.rasters, rb.rasters);
        Ok(())
    }))
}

/// With 1024 levels over a range shared by every ring and unit α, mapped
/// weights approach the real ones and predictions agree with ideal mode.
pub fn mode_nesting() -> Result<(), String> {
    let fx = fixture();
    let rings = fx.bank.len();
    let low = (0..rings).map(|r| fx.device.table.t_low(r)).fold(0.0, f64::max);
    let high = (0..rings).map(|r| fx.device.table.t_high(r)).fold(1.0, f64::min);
    let spec = LevelSpec { count: 1024, t_low: Some(low), t_high: Some(high) };
    let table = build_level_table(&fx.bank, &fx.stack, &spec).map_err(|e| e.to_string())?;
    let device = DeviceContext {
        alpha: CrosstalkMap::ideal(rings, 1024),
        readout: Readout::normalized(&table, 1.0),
        table,
    };
    let snn = random_snn(11, &[40, 16, 4]);
    let ideal = SnnNetwork::new(&snn, Mode::Ideal, None, 1.0).unwrap();
    let fine = SnnNetwork::new(&snn, Mode::Crosstalk, Some(&device), DEFAULT_AMPLITUDE).unwrap();
    let coarse = SnnNetwork::new(&snn, Mode::Crosstalk, Some(&fx.device), DEFAULT_AMPLITUDE).unwrap();
    let error = |net: &SnnNetwork| -> f64 {
        (0..2)
            .map(|l| {
                let w = &snn.model.weights[l];
                let scale = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let eff = effective_weights(net, l);
                let c = net.thresholds[l] / snn.thresholds[l];
                eff.iter().zip(w).map(|(e, w)| (e / c - w).abs() / scale).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    };
    let (fine_err, coarse_err) = (error(&fine), error(&coarse));
    if !(fine_err < 1e-3 && fine_err < coarse_err / 20.0) {
        return Err(format!("relative weight error {fine_err} at 1024 levels vs {coarse_err} at 16"));
    }
    let mut agree = 0;
    for seed in 0..200 {
        let enc = random_encoding(seed, 40);
        let a = run_inference(&ideal, &enc, Evaluation::Monolithic, TraceOptions::default()).unwrap();
        let b = run_inference(&fine, &enc, Evaluation::Monolithic, TraceOptions::default()).unwrap();
        agree += usize::from(a.prediction == b.prediction);
    }
    if agree < 190 {
        return Err(format!("1024-level device mode agrees with ideal on {agree}/200 inputs"));
    }
    Ok(())
}

// ---- energy -----------------------------------------------------------

pub fn energy_additive_and_monotone() -> Result<(), String> {
    let fx = fixture();
    let snn = random_snn(3, &[37, 9, 3]);
    let net = SnnNetwork::new(&snn, Mode::Quantized, Some(&fx.device), DEFAULT_AMPLITUDE).unwrap();
    let model = EnergyModel::new(&net.mapped, DEFAULT_AMPLITUDE, DEFAULT_PULSE_WIDTH).unwrap();
    let counts = |n| proptest::collection::vec(0u32..40, n);
    let strat = (counts(37), counts(37), counts(9), counts(9), 1usize..40, 1usize..40, 0usize..37);
    outcome(runner().run(&strat, |(a0, b0, a1, b1, sa, sb, extra)| {
        let whole: Vec<Vec<u32>> = vec![
            a0.iter().zip(&b0).map(|(x, y)| x + y).collect(),
            a1.iter().zip(&b1).map(|(x, y)| x + y).collect(),
        ];
        let mut merged = model.image_ledger(&[a0.clone(), a1.clone()], sa).unwrap();
        merged.merge(&model.image_ledger(&[b0, b1], sb).unwrap());
        let total = model.image_ledger(&whole, sa + sb).unwrap();
        prop_assert_eq!(&merged.layers, &total.layers);
        prop_assert_eq!(merged.total_zj(), total.total_zj());
        let mut more = vec![a0, a1];
        let before = model.image_ledger(&more, sa).unwrap().synaptic_zj();
        more[0][extra] += 1;
        prop_assert!(model.image_ledger(&more, sa).unwrap().synaptic_zj() >= before);
        Ok(())
    }))
}

pub type Property = (&'static str, fn() -> Result<(), String>);

pub const PROPERTIES: &[Property] = &[
    ("pass transmission in [0,1]", pass_transmission_bounded),
    ("resonant T monotone in p", resonant_transmission_monotone_in_p),
    ("mode index increasing in p", mode_index_strictly_increasing),
    ("permittivity endpoints", permittivity_endpoints),
    ("finesse identity and resonance phase", spectral_identities),
    ("bank fits in one FSR", bank_fits_in_fsr),
    ("dot product linearity", dpe_is_linear),
    ("dot product matches scalar loop", dpe_matches_scalar_loop),
    ("unit alpha recovers ideal product", unit_alpha_is_ideal_product),
    ("quantization total and antisymmetric", quantization_is_total_and_antisymmetric),
    ("IF constant-drive interval", constant_drive_interval),
    ("IF translation invariance", trace_translation_invariant),
    ("IF no spontaneous firing", no_spontaneous_firing),
    ("tiling invariance", tiling_invariance),
    ("determinism", determinism),
    ("amplitude/threshold homogeneity", amplitude_homogeneity),
    ("weight/threshold homogeneity", weight_threshold_homogeneity),
    ("mode nesting", mode_nesting),
    ("energy additivity and monotonicity", energy_additive_and_monotone),
];
